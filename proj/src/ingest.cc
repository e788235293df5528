#include "filter_audit/ingest.h"

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "filter_audit/util.h"

namespace filter_audit {

const char* GateStatusName(GateStatus s) {
  switch (s) {
    case GateStatus::kKept: return "kept";
    case GateStatus::kDroppedLanguage: return "dropped_language";
    case GateStatus::kDroppedTooFewSentences: return "dropped_too_few_sentences";
    case GateStatus::kDroppedShortSentences: return "dropped_short_sentences";
  }
  return "kept";
}

std::string Document::Text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s.text;
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 44> kAbbreviations = {
    "mr.",   "mrs.",  "ms.",   "dr.",  "prof.", "sr.",   "jr.",   "st.",   "mt.",
    "u.s.",  "u.k.",  "e.g.",  "i.e.", "etc.",  "vs.",   "inc.",  "ltd.",  "co.",
    "corp.", "no.",   "gen.",  "gov.", "sen.",  "rep.",  "lt.",   "col.",  "capt.",
    "ave.",  "fig.",  "approx.", "dept.", "est.", "jan.", "feb.", "mar.", "apr.",
    "aug.",  "sep.",  "sept.", "oct.",  "nov.", "dec.",  "rev.",  "hon."};

bool IsTerminal(char c) { return c == '.' || c == '?' || c == '!'; }
bool IsSpace(char c) { return c == ' ' || c == '\t'; }

// Closing quote/bracket at i; returns its byte length or 0.
std::size_t ClosingAt(std::string_view s, std::size_t i) {
  char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') return 1;
  if (s.substr(i, 3) == "\xE2\x80\x9D" || s.substr(i, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

bool OpeningQuoteAt(std::string_view s, std::size_t i) {
  char c = s[i];
  if (c == '"' || c == '\'') return true;
  return s.substr(i, 3) == "\xE2\x80\x9C" || s.substr(i, 3) == "\xE2\x80\x98";
}

void SplitLine(std::string_view text, std::size_t begin, std::size_t end,
               std::vector<std::pair<std::size_t, std::size_t>>& out) {
  auto emit = [&](std::size_t b, std::size_t e) {
    while (b < e && IsSpace(text[b])) ++b;
    while (e > b && IsSpace(text[e - 1])) --e;
    if (e > b) out.emplace_back(b, e);
  };
  std::size_t start = begin;
  std::size_t i = begin;
  while (i < end) {
    if (!IsTerminal(text[i])) {
      ++i;
      continue;
    }
    std::size_t run_begin = i;
    std::size_t j = i;
    while (j < end && IsTerminal(text[j])) ++j;
    bool single_period = (j - run_begin == 1 && text[run_begin] == '.');
    std::size_t close_end = j;
    while (close_end < end) {
      std::size_t len = ClosingAt(text, close_end);
      if (len == 0) break;
      close_end += len;
    }
    std::size_t k = close_end;
    while (k < end && IsSpace(text[k])) ++k;
    bool boundary = k > close_end && k < end &&
                    (IsUppercaseAt(text, k) || OpeningQuoteAt(text, k));
    if (boundary && single_period) {
      std::size_t word_begin = run_begin;
      while (word_begin > start && !IsSpace(text[word_begin - 1])) --word_begin;
      if (IsAbbreviation(text.substr(word_begin, j - word_begin))) boundary = false;
    }
    if (boundary) {
      emit(start, close_end);
      start = k;
      i = k;
    } else {
      i = j;
    }
  }
  emit(start, end);
}

}  // namespace

bool IsAbbreviation(std::string_view word) {
  // Leading quotes/brackets do not belong to the word.
  while (!word.empty() && (word.front() == '(' || word.front() == '"' || word.front() == '\'')) {
    word.remove_prefix(1);
  }
  std::string lower(word);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end();
}

std::vector<std::pair<std::size_t, std::size_t>> SplitSentenceSpans(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t line_begin = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == '\n' || text[i] == '\r') {
      SplitLine(text, line_begin, i, spans);
      line_begin = i + 1;
    }
  }
  return spans;
}

std::vector<Sentence> SplitSentences(std::string_view text) {
  std::vector<Sentence> out;
  for (const auto& [b, e] : SplitSentenceSpans(text)) {
    Sentence s;
    s.index = out.size();
    s.text = std::string(text.substr(b, e - b));
    s.tokens = Tokenize(s.text);
    out.push_back(std::move(s));
  }
  return out;
}

Document GateDocument(const RawDocument& raw, const LanguageIdentifier& langid,
                      const GateThresholds& thresholds) {
  Document doc;
  doc.doc_id = raw.doc_id;
  doc.url = raw.url;
  LanguageGuess guess = langid.Detect(raw.body);
  doc.lang = guess.lang;
  doc.lang_confidence = guess.confidence;

  for (auto& s : SplitSentences(raw.body)) {
    if (s.tokens.empty()) continue;
    s.index = doc.sentences.size();
    doc.sentences.push_back(std::move(s));
  }

  if (doc.lang != thresholds.language) {
    doc.gate_status = GateStatus::kDroppedLanguage;
  } else if (doc.sentences.size() < thresholds.min_sentences) {
    doc.gate_status = GateStatus::kDroppedTooFewSentences;
  } else {
    std::size_t words = 0;
    for (const auto& s : doc.sentences) words += s.tokens.size();
    double mean = static_cast<double>(words) / static_cast<double>(doc.sentences.size());
    doc.gate_status = mean < thresholds.min_mean_words ? GateStatus::kDroppedShortSentences
                                                       : GateStatus::kKept;
  }
  return doc;
}

SampleResult SampleIndices(std::size_t available, std::size_t n, std::uint64_t seed) {
  SampleResult result;
  if (n > available) {
    result.truncated = true;
    n = available;
  }
  std::vector<std::size_t> idx(available);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first n slots become the sample.
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = i + UniformBelow(rng, available - i);
    std::swap(idx[i], idx[j]);
  }
  result.indices.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n));
  std::sort(result.indices.begin(), result.indices.end());
  return result;
}

std::vector<Document> SampleCorpus(const std::vector<Document>& docs, std::size_t n,
                                   std::uint64_t seed, bool* truncated) {
  SampleResult r = SampleIndices(docs.size(), n, seed);
  if (truncated) *truncated = r.truncated;
  std::vector<Document> out;
  out.reserve(r.indices.size());
  for (std::size_t i : r.indices) out.push_back(docs[i]);
  return out;
}

std::vector<SampleResult> DrawSamples(std::size_t available, std::size_t count,
                                      std::size_t size, std::uint64_t seed, bool disjoint) {
  std::vector<SampleResult> samples;
  if (!disjoint) {
    for (std::size_t s = 0; s < count; ++s) {
      samples.push_back(SampleIndices(available, size, DeriveSeed(seed, s)));
    }
    return samples;
  }
  std::vector<std::size_t> idx(available);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  DeterministicShuffle(idx, rng);
  std::size_t cursor = 0;
  for (std::size_t s = 0; s < count; ++s) {
    SampleResult r;
    std::size_t take = std::min(size, available - cursor);
    r.truncated = take < size;
    r.indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(cursor),
                     idx.begin() + static_cast<std::ptrdiff_t>(cursor + take));
    std::sort(r.indices.begin(), r.indices.end());
    cursor += take;
    samples.push_back(std::move(r));
  }
  return samples;
}

}  // namespace filter_audit
