#ifndef FILTER_AUDIT_INGEST_H_
#define FILTER_AUDIT_INGEST_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "filter_audit/langid.h"
#include "filter_audit/text.h"
#include "filter_audit/warc.h"

namespace filter_audit {

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::vector<Token> tokens;  // offsets into `text`

  bool operator==(const Sentence&) const = default;
};

enum class GateStatus { kKept, kDroppedLanguage, kDroppedTooFewSentences, kDroppedShortSentences };

const char* GateStatusName(GateStatus s);

struct Document {
  std::string doc_id;
  std::optional<std::string> url;
  std::vector<Sentence> sentences;
  std::string lang;
  double lang_confidence = 0.0;
  GateStatus gate_status = GateStatus::kKept;

  // Sentences joined by single spaces.
  std::string Text() const;
  bool operator==(const Document&) const = default;
};

// Byte spans [begin, end) of sentences in `text`, trimmed of surrounding
// whitespace. Boundaries: line breaks, and a run of . ? ! (plus closing
// quotes/brackets) followed by whitespace and then an uppercase letter or an
// opening quote. A period ending a known abbreviation ("Dr.", "U.S.") does
// not end a sentence.
std::vector<std::pair<std::size_t, std::size_t>> SplitSentenceSpans(std::string_view text);

std::vector<Sentence> SplitSentences(std::string_view text);

bool IsAbbreviation(std::string_view word_with_period);

struct GateThresholds {
  std::size_t min_sentences = 5;
  double min_mean_words = 5.0;
  std::string language = "en";
};

// Language, sentence-count and words-per-sentence gates. Thresholds keep at
// equality: exactly 5 sentences passes. Token-less sentences are dropped
// before counting.
Document GateDocument(const RawDocument& raw, const LanguageIdentifier& langid,
                      const GateThresholds& thresholds = {});

struct SampleResult {
  std::vector<std::size_t> indices;  // ascending positions in the input
  bool truncated = false;            // asked for more than available
};

// Uniform sample of n positions out of `available`, without replacement.
SampleResult SampleIndices(std::size_t available, std::size_t n, std::uint64_t seed);

std::vector<Document> SampleCorpus(const std::vector<Document>& docs, std::size_t n,
                                   std::uint64_t seed, bool* truncated = nullptr);

// `count` samples of `size` documents each. Disjoint samples partition one
// seeded shuffle; otherwise each sample is drawn independently with a
// per-sample derived seed.
std::vector<SampleResult> DrawSamples(std::size_t available, std::size_t count,
                                      std::size_t size, std::uint64_t seed, bool disjoint);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_INGEST_H_
