#ifndef FILTER_AUDIT_LINKER_H_
#define FILTER_AUDIT_LINKER_H_

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filter_audit/ingest.h"
#include "filter_audit/kb.h"

namespace filter_audit {

struct MentionSpan {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::size_t token_start = 0;  // [token_start, token_end) over Sentence::tokens
  std::size_t token_end = 0;
  std::string surface;

  bool operator==(const MentionSpan&) const = default;
};

struct LinkedMention {
  MentionSpan span;
  std::string entity_id;
  DemographicGroup group = DemographicGroup::kUnknown;
  double similarity = 0.0;

  bool operator==(const LinkedMention&) const = default;
};

// Greedy leftmost-longest gazetteer matches over token norms. Spans are
// disjoint and sorted by (sentence, start).
std::vector<MentionSpan> DetectPersonMentions(const Document& doc, const Gazetteer& gaz);

// 1 - Levenshtein / max length, over code points of the normalized strings.
double NameSimilarity(std::string_view a, std::string_view b);

// People Dataset keyed by entity id, with each record's group precomputed.
class PeopleIndex {
 public:
  PeopleIndex() = default;
  PeopleIndex(const std::vector<PersonRecord>& records, const RegionMap& map);

  const PersonRecord* Find(std::string_view entity_id) const;
  DemographicGroup GroupOf(std::string_view entity_id) const;
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    PersonRecord record;
    DemographicGroup group;
  };
  std::map<std::string, Entry, std::less<>> entries_;
};

struct Resolution {
  std::string title;
  std::string entity_id;
};

// Looks a surface up on a MediaWiki-compatible search API and maps the top
// title to its Wikidata id. Answers, including misses, are cached on disk.
class OnlineResolver {
 public:
  struct Options {
    std::string base_url;  // e.g. https://en.wikipedia.org/w/api.php
    std::filesystem::path cache_path;
    std::chrono::milliseconds min_interval{100};
    std::chrono::seconds timeout{10};
    bool offline = false;  // cache only
  };
  struct Stats {
    std::size_t requests = 0;
    std::size_t cache_hits = 0;
    std::size_t failures = 0;
  };

  explicit OnlineResolver(Options options);

  // nullopt on a miss or on any network/format failure.
  std::optional<Resolution> Resolve(std::string_view surface);
  Stats stats() const;

 private:
  std::optional<std::string> Get(const std::string& query);
  std::optional<Resolution> Fetch(const std::string& surface);
  void Persist();

  Options options_;
  std::string scheme_host_;
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, std::optional<Resolution>> cache_;
  std::chrono::steady_clock::time_point last_request_{};
  Stats stats_;
};

// Runs an external NER command once per document. The command reads one
// sentence per line on stdin and prints "sentence_index TAB start TAB end"
// token spans.
class NerAdapter {
 public:
  explicit NerAdapter(std::string command) : command_(std::move(command)) {}
  std::vector<MentionSpan> Detect(const Document& doc) const;

 private:
  std::string command_;
};

// Parses adapter output against `doc`. Out-of-range or malformed lines are
// skipped; overlapping spans keep the earlier one.
std::vector<MentionSpan> ParseNerOutput(const Document& doc, std::string_view output);

struct LinkOptions {
  double tau = 0.85;
  OnlineResolver* resolver = nullptr;
};

struct LinkStats {
  std::size_t spans = 0;
  std::size_t linked = 0;
  std::size_t unlinked = 0;
  std::size_t online = 0;

  LinkStats& operator+=(const LinkStats& o);
  bool operator==(const LinkStats&) const = default;
};

// Resolves spans to People Dataset entries. The best candidate by similarity
// wins, ties to the smallest entity id; spans below tau are dropped.
std::vector<LinkedMention> LinkSpans(const std::vector<MentionSpan>& spans,
                                     const Gazetteer& gaz, const PeopleIndex& people,
                                     const LinkOptions& options, LinkStats* stats = nullptr);

std::vector<LinkedMention> LinkMentions(const Document& doc, const Gazetteer& gaz,
                                        const PeopleIndex& people, const LinkOptions& options,
                                        LinkStats* stats = nullptr);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_LINKER_H_
