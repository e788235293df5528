#include "filter_audit/linker.h"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "filter_audit/text.h"
#include "filter_audit/util.h"
#include "httplib.h"
#include "json.hpp"

namespace filter_audit {

using nlohmann::json;

namespace {

std::string SentenceSlice(const Sentence& s, std::size_t start, std::size_t end) {
  std::size_t b = s.tokens[start].begin;
  std::size_t e = s.tokens[end - 1].end;
  return s.text.substr(b, e - b);
}

std::size_t Levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace

std::vector<MentionSpan> DetectPersonMentions(const Document& doc, const Gazetteer& gaz) {
  std::vector<MentionSpan> spans;
  for (const auto& sentence : doc.sentences) {
    const auto& toks = sentence.tokens;
    std::size_t i = 0;
    while (i < toks.size()) {
      int node = 0;
      std::size_t best_end = 0;
      for (std::size_t j = i; j < toks.size(); ++j) {
        node = gaz.Child(node, toks[j].norm);
        if (node < 0) break;
        if (gaz.NodeIds(node) != nullptr) best_end = j + 1;
      }
      if (best_end == 0) {
        ++i;
        continue;
      }
      spans.push_back({doc.doc_id, sentence.index, i, best_end,
                       SentenceSlice(sentence, i, best_end)});
      i = best_end;
    }
  }
  return spans;
}

double NameSimilarity(std::string_view a, std::string_view b) {
  std::u32string x = ToCodePoints(NormalizeText(a));
  std::u32string y = ToCodePoints(NormalizeText(b));
  std::size_t longest = std::max(x.size(), y.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(Levenshtein(x, y)) / static_cast<double>(longest);
}

PeopleIndex::PeopleIndex(const std::vector<PersonRecord>& records, const RegionMap& map) {
  for (const auto& r : records) entries_.emplace(r.entity_id, Entry{r, ClassifyGroup(r, map)});
}

const PersonRecord* PeopleIndex::Find(std::string_view entity_id) const {
  auto it = entries_.find(entity_id);
  return it == entries_.end() ? nullptr : &it->second.record;
}

DemographicGroup PeopleIndex::GroupOf(std::string_view entity_id) const {
  auto it = entries_.find(entity_id);
  return it == entries_.end() ? DemographicGroup::kUnknown : it->second.group;
}

// ---- online resolver ----

OnlineResolver::OnlineResolver(Options options) : options_(std::move(options)) {
  const std::string& url = options_.base_url;
  std::size_t scheme_end = url.find("://");
  std::size_t path_begin =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  scheme_host_ = url.substr(0, path_begin);
  path_ = path_begin == std::string::npos ? "/" : url.substr(path_begin);

  if (!options_.cache_path.empty() && std::filesystem::exists(options_.cache_path)) {
    std::ifstream in(options_.cache_path);
    std::string line;
    while (std::getline(in, line)) {
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("surface")) continue;
      std::optional<Resolution> r;
      if (j.value("id", json()).is_string() && j.value("title", json()).is_string()) {
        r = Resolution{j["title"].get<std::string>(), j["id"].get<std::string>()};
      }
      cache_[j["surface"].get<std::string>()] = r;
    }
  }
}

OnlineResolver::Stats OnlineResolver::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::optional<Resolution> OnlineResolver::Resolve(std::string_view surface) {
  std::string key = NormalizeText(surface);
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  if (options_.offline || options_.base_url.empty()) return std::nullopt;
  std::optional<Resolution> result;
  try {
    result = Fetch(key);
  } catch (const Error&) {
    ++stats_.failures;
    return std::nullopt;
  }
  cache_[key] = result;
  Persist();
  return result;
}

std::optional<std::string> OnlineResolver::Get(const std::string& query) {
  auto now = std::chrono::steady_clock::now();
  auto due = last_request_ + options_.min_interval;
  if (now < due) std::this_thread::sleep_for(due - now);
  last_request_ = std::chrono::steady_clock::now();
  ++stats_.requests;

  httplib::Client client(scheme_host_);
  client.set_connection_timeout(options_.timeout);
  client.set_read_timeout(options_.timeout);
  client.set_follow_location(true);
  httplib::Result res = client.Get(path_ + "?" + query,
                                   {{"User-Agent", "filter-audit-harness/1.0"}});
  if (!res || res->status != 200) return std::nullopt;
  return res->body;
}

std::optional<Resolution> OnlineResolver::Fetch(const std::string& surface) {
  auto fail = [](const std::string& what) -> RuntimeError {
    return RuntimeError("resolver: " + what);
  };
  auto search = Get("action=query&list=search&srlimit=1&format=json&srsearch=" +
                    httplib::detail::encode_query_param(surface));
  if (!search) throw fail("search request failed");
  json sj = json::parse(*search, nullptr, false);
  if (sj.is_discarded()) throw fail("malformed search response");
  const json* hits = sj.contains("query") ? &sj["query"]["search"] : nullptr;
  if (hits == nullptr || !hits->is_array()) throw fail("search response lacks query.search");
  if (hits->empty()) return std::nullopt;
  const json& top = hits->at(0);
  if (!top.contains("title") || !top["title"].is_string()) throw fail("search hit lacks title");
  std::string title = top["title"].get<std::string>();

  auto props = Get("action=query&prop=pageprops&ppprop=wikibase_item&format=json&titles=" +
                   httplib::detail::encode_query_param(title));
  if (!props) throw fail("pageprops request failed");
  json pj = json::parse(*props, nullptr, false);
  if (pj.is_discarded() || !pj.contains("query") || !pj["query"].contains("pages")) {
    throw fail("malformed pageprops response");
  }
  const json& pages = pj["query"]["pages"];
  auto read_page = [&](const json& page) -> std::optional<Resolution> {
    if (!page.is_object() || !page.contains("pageprops")) return std::nullopt;
    const json& pp = page["pageprops"];
    if (!pp.contains("wikibase_item") || !pp["wikibase_item"].is_string()) return std::nullopt;
    return Resolution{title, pp["wikibase_item"].get<std::string>()};
  };
  // Legacy format keys pages by page id; formatversion=2 uses an array.
  if (pages.is_object() || pages.is_array()) {
    for (const auto& page : pages) {
      if (auto r = read_page(page)) return r;
    }
    return std::nullopt;
  }
  throw fail("malformed pageprops response");
}

void OnlineResolver::Persist() {
  if (options_.cache_path.empty()) return;
  std::string out;
  for (const auto& [surface, r] : cache_) {
    json j = {{"surface", surface}};
    j["title"] = r ? json(r->title) : json();
    j["id"] = r ? json(r->entity_id) : json();
    out += j.dump() + "\n";
  }
  WriteFileAtomic(options_.cache_path, out);
}

// ---- NER adapter ----

std::vector<MentionSpan> ParseNerOutput(const Document& doc, std::string_view output) {
  std::vector<MentionSpan> spans;
  for (const auto& raw : SplitString(output, '\n')) {
    std::string_view line = Trim(raw);
    if (line.empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields.size() != 3) continue;
    std::size_t v[3];
    bool ok = true;
    for (int k = 0; k < 3 && ok; ++k) {
      const std::string& f = fields[static_cast<std::size_t>(k)];
      ok = !f.empty() && std::all_of(f.begin(), f.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
           f.size() < 10;
      if (ok) v[k] = std::stoul(f);
    }
    if (!ok || v[0] >= doc.sentences.size()) continue;
    const Sentence& s = doc.sentences[v[0]];
    if (v[1] >= v[2] || v[2] > s.tokens.size()) continue;
    spans.push_back({doc.doc_id, v[0], v[1], v[2], SentenceSlice(s, v[1], v[2])});
  }
  std::sort(spans.begin(), spans.end(), [](const MentionSpan& a, const MentionSpan& b) {
    return std::tie(a.sentence_index, a.token_start, a.token_end) <
           std::tie(b.sentence_index, b.token_start, b.token_end);
  });
  std::vector<MentionSpan> disjoint;
  for (auto& s : spans) {
    if (!disjoint.empty() && disjoint.back().sentence_index == s.sentence_index &&
        s.token_start < disjoint.back().token_end) {
      continue;
    }
    disjoint.push_back(std::move(s));
  }
  return disjoint;
}

std::vector<MentionSpan> NerAdapter::Detect(const Document& doc) const {
  std::string input;
  for (const auto& s : doc.sentences) {
    std::string line = s.text;
    std::replace(line.begin(), line.end(), '\n', ' ');
    std::replace(line.begin(), line.end(), '\r', ' ');
    input += line + "\n";
  }
  std::string tmpl = (std::filesystem::temp_directory_path() / "fa_ner_XXXXXX").string();
  int fd = mkstemp(tmpl.data());
  if (fd < 0) throw IoError("ner: cannot create temp file");
  close(fd);
  struct Cleanup {
    std::string path;
    ~Cleanup() { std::filesystem::remove(path); }
  } cleanup{tmpl};
  {
    std::ofstream out(tmpl, std::ios::binary);
    out << input;
    if (!out) throw IoError("ner: cannot write temp file");
  }
  std::string cmd = "(" + command_ + ") < '" + tmpl + "'";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw RuntimeError("ner: cannot start '" + command_ + "'");
  std::string output;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, n);
  int status = pclose(pipe);
  if (status != 0) {
    throw RuntimeError("ner: '" + command_ + "' exited with status " + std::to_string(status));
  }
  return ParseNerOutput(doc, output);
}

// ---- linking ----

LinkStats& LinkStats::operator+=(const LinkStats& o) {
  spans += o.spans;
  linked += o.linked;
  unlinked += o.unlinked;
  online += o.online;
  return *this;
}

std::vector<LinkedMention> LinkSpans(const std::vector<MentionSpan>& spans,
                                     const Gazetteer& gaz, const PeopleIndex& people,
                                     const LinkOptions& options, LinkStats* stats) {
  if (!(options.tau >= 0.0 && options.tau <= 1.0)) {
    throw ValidationError("link threshold must lie in [0,1]");
  }
  LinkStats local;
  std::vector<LinkedMention> out;
  for (const auto& span : spans) {
    ++local.spans;
    std::optional<LinkedMention> best;

    if (options.resolver != nullptr) {
      if (auto r = options.resolver->Resolve(span.surface)) {
        double sim = NameSimilarity(span.surface, r->title);
        if (people.Find(r->entity_id) != nullptr && sim >= options.tau) {
          best = LinkedMention{span, r->entity_id, people.GroupOf(r->entity_id), sim};
          ++local.online;
        }
      }
    }

    if (!best) {
      if (const auto* ids = gaz.Lookup(span.surface)) {
        for (const auto& id : *ids) {  // ascending, so ties keep the smallest
          const PersonRecord* rec = people.Find(id);
          if (rec == nullptr) continue;
          double sim = NameSimilarity(span.surface, rec->primary_name);
          for (const auto& alias : rec->aliases) {
            sim = std::max(sim, NameSimilarity(span.surface, alias));
          }
          if (sim < options.tau) continue;
          if (!best || sim > best->similarity) {
            best = LinkedMention{span, id, people.GroupOf(id), sim};
          }
        }
      }
    }

    if (best) {
      ++local.linked;
      out.push_back(std::move(*best));
    } else {
      ++local.unlinked;
    }
  }
  if (stats) *stats += local;
  return out;
}

std::vector<LinkedMention> LinkMentions(const Document& doc, const Gazetteer& gaz,
                                        const PeopleIndex& people, const LinkOptions& options,
                                        LinkStats* stats) {
  return LinkSpans(DetectPersonMentions(doc, gaz), gaz, people, options, stats);
}

}  // namespace filter_audit
