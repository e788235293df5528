#ifndef FILTER_AUDIT_LANGID_H_
#define FILTER_AUDIT_LANGID_H_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace filter_audit {

struct LanguageGuess {
  std::string lang;         // ISO-639-1 code, or "und" when no signal
  double confidence = 0.0;  // cosine similarity of the winning profile

  bool operator==(const LanguageGuess&) const = default;
};

inline constexpr std::string_view kUnknownLanguage = "und";

// Character-trigram language identifier. Each language profile holds the
// square roots of its training trigram counts; a text is assigned the profile
// with the highest cosine similarity to its own trigram counts.
class LanguageIdentifier {
 public:
  // Profiles built from the bundled training text (en, de, fr, es, it, nl, pt).
  static const LanguageIdentifier& Bundled();

  void AddProfile(const std::string& lang, std::string_view training_text);
  LanguageGuess Detect(std::string_view text) const;
  std::vector<std::string> languages() const;

  // Word-padded, normalized trigram counts (" th", "the", "he ").
  static std::unordered_map<std::string, double> Trigrams(std::string_view text);

 private:
  struct Profile {
    std::unordered_map<std::string, double> weights;
    double norm = 0.0;
  };
  std::map<std::string, Profile> profiles_;
};

// Training text for the bundled profiles, keyed by language code.
const std::map<std::string, std::string_view>& BundledLanguageText();

}  // namespace filter_audit

#endif  // FILTER_AUDIT_LANGID_H_
