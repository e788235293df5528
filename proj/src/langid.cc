#include "filter_audit/langid.h"

#include <cmath>

#include "filter_audit/text.h"

namespace filter_audit {

std::unordered_map<std::string, double> LanguageIdentifier::Trigrams(std::string_view text) {
  std::unordered_map<std::string, double> counts;
  for (const auto& token : Tokenize(text)) {
    // Digits carry no language signal.
    bool has_letter = false;
    for (unsigned char c : token.norm) {
      if (!(c >= '0' && c <= '9')) has_letter = true;
    }
    if (!has_letter) continue;
    std::u32string cps = U" " + ToCodePoints(token.norm) + U" ";
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
      std::string key;
      for (std::size_t k = i; k < i + 3; ++k) {
        char32_t c = cps[k];
        // Encode each code point as UTF-8.
        if (c < 0x80) {
          key.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
          key.push_back(static_cast<char>(0xC0 | (c >> 6)));
          key.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
          key.push_back(static_cast<char>(0xE0 | (c >> 12)));
          key.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
          key.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
          key.push_back(static_cast<char>(0xF0 | (c >> 18)));
          key.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
          key.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
          key.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
      }
      counts[key] += 1.0;
    }
  }
  return counts;
}

void LanguageIdentifier::AddProfile(const std::string& lang, std::string_view training_text) {
  Profile p;
  p.weights = Trigrams(training_text);
  for (auto& [k, v] : p.weights) v = std::sqrt(v);
  double sq = 0.0;
  for (const auto& [k, v] : p.weights) sq += v * v;
  p.norm = std::sqrt(sq);
  profiles_[lang] = std::move(p);
}

LanguageGuess LanguageIdentifier::Detect(std::string_view text) const {
  auto counts = Trigrams(text);
  double sq = 0.0;
  for (const auto& [k, v] : counts) sq += v * v;
  if (counts.empty() || sq == 0.0) return {std::string(kUnknownLanguage), 0.0};
  double norm = std::sqrt(sq);

  LanguageGuess best{std::string(kUnknownLanguage), 0.0};
  // profiles_ is ordered, so ties resolve to the smallest code.
  for (const auto& [lang, profile] : profiles_) {
    if (profile.norm == 0.0) continue;
    double dot = 0.0;
    for (const auto& [k, v] : counts) {
      auto it = profile.weights.find(k);
      if (it != profile.weights.end()) dot += v * it->second;
    }
    double score = dot / (norm * profile.norm);
    if (score > best.confidence) best = {lang, score};
  }
  return best;
}

std::vector<std::string> LanguageIdentifier::languages() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : profiles_) out.push_back(k);
  return out;
}

const LanguageIdentifier& LanguageIdentifier::Bundled() {
  static const LanguageIdentifier* id = [] {
    auto* li = new LanguageIdentifier();
    for (const auto& [lang, text] : BundledLanguageText()) li->AddProfile(lang, text);
    return li;
  }();
  return *id;
}

}  // namespace filter_audit
