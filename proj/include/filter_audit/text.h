#ifndef FILTER_AUDIT_TEXT_H_
#define FILTER_AUDIT_TEXT_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace filter_audit {

// Casefold + NFC + whitespace collapse (runs of Unicode whitespace become a
// single ASCII space; leading/trailing whitespace removed). This is the one
// matching normalization used by the gazetteer, lexicons and tokens.
std::string NormalizeText(std::string_view text);

// Replaces invalid UTF-8 sequences with U+FFFD.
std::string SanitizeUtf8(std::string_view bytes);

// A word token. [begin, end) are byte offsets into the tokenized text; `norm`
// is the normalized (casefolded) form used for matching.
struct Token {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string norm;

  bool operator==(const Token&) const = default;
};

// Splits on Unicode whitespace, then strips leading and trailing punctuation
// (general category P*) from each piece. Pieces that are pure punctuation
// produce no token.
std::vector<Token> Tokenize(std::string_view text);

// Normalized token forms only.
std::vector<std::string> TokenNorms(std::string_view text);

// Number of Unicode code points.
std::size_t CodePointLength(std::string_view utf8);
std::u32string ToCodePoints(std::string_view utf8);

bool IsUppercaseAt(std::string_view utf8, std::size_t offset);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_TEXT_H_
