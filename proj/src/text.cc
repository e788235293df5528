#include "filter_audit/text.h"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace filter_audit {
namespace {

bool IsAscii(std::string_view s) {
  for (unsigned char c : s) {
    if (c >= 0x80) return false;
  }
  return true;
}

const icu::Normalizer2& Nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || nfc == nullptr) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  return *nfc;
}

std::string FoldAndCompose(std::string_view text) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  const icu::Normalizer2& nfc = Nfc();
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString composed = nfc.normalize(u, status);
  composed.foldCase(U_FOLD_CASE_DEFAULT);
  icu::UnicodeString refolded = nfc.normalize(composed, status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU normalization failed");
  std::string out;
  refolded.toUTF8String(out);
  return out;
}

// Decodes one code point at `i`, advancing it. Invalid bytes decode as
// negative values and advance by one.
UChar32 NextCodePoint(std::string_view s, std::size_t& i) {
  int32_t pos = static_cast<int32_t>(i);
  UChar32 c;
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), pos,
          static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(pos);
  return c;
}

bool IsWhitespaceCp(UChar32 c) { return c >= 0 && u_isUWhiteSpace(c); }
bool IsPunctCp(UChar32 c) { return c >= 0 && u_ispunct(c); }

std::string NormalizeToken(std::string_view raw) {
  if (IsAscii(raw)) {
    std::string out(raw);
    for (char& c : out) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
  }
  return FoldAndCompose(raw);
}

}  // namespace

std::string SanitizeUtf8(std::string_view bytes) {
  if (IsAscii(bytes)) return std::string(bytes);
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    std::size_t start = i;
    UChar32 c = NextCodePoint(bytes, i);
    if (c < 0) {
      out.append("\xEF\xBF\xBD");
    } else {
      out.append(bytes.substr(start, i - start));
    }
  }
  return out;
}

std::string NormalizeText(std::string_view text) {
  std::string collapsed;
  collapsed.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t start = i;
    UChar32 c = NextCodePoint(text, i);
    if (IsWhitespaceCp(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed.push_back(' ');
      pending_space = false;
    }
    if (c < 0) {
      collapsed.append("\xEF\xBF\xBD");
    } else {
      collapsed.append(text.substr(start, i - start));
    }
  }
  return NormalizeToken(collapsed);
}

std::vector<Token> Tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    // Skip whitespace.
    std::size_t probe = i;
    UChar32 c = NextCodePoint(text, probe);
    if (IsWhitespaceCp(c)) {
      i = probe;
      continue;
    }
    // Piece runs to the next whitespace.
    std::size_t piece_begin = i;
    std::size_t piece_end = i;
    while (piece_end < text.size()) {
      std::size_t next = piece_end;
      UChar32 d = NextCodePoint(text, next);
      if (IsWhitespaceCp(d)) break;
      piece_end = next;
    }
    i = piece_end;

    // Strip leading punctuation.
    std::size_t b = piece_begin;
    while (b < piece_end) {
      std::size_t next = b;
      if (!IsPunctCp(NextCodePoint(text, next))) break;
      b = next;
    }
    // Strip trailing punctuation: walk forward remembering the end of the
    // last non-punctuation code point.
    std::size_t e = b;
    std::size_t cur = b;
    while (cur < piece_end) {
      std::size_t next = cur;
      UChar32 d = NextCodePoint(text, next);
      if (!IsPunctCp(d)) e = next;
      cur = next;
    }
    if (e > b) {
      tokens.push_back(Token{b, e, NormalizeToken(text.substr(b, e - b))});
    }
  }
  return tokens;
}

std::vector<std::string> TokenNorms(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : Tokenize(text)) out.push_back(std::move(t.norm));
  return out;
}

std::size_t CodePointLength(std::string_view utf8) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < utf8.size()) {
    NextCodePoint(utf8, i);
    ++n;
  }
  return n;
}

std::u32string ToCodePoints(std::string_view utf8) {
  std::u32string out;
  std::size_t i = 0;
  while (i < utf8.size()) {
    UChar32 c = NextCodePoint(utf8, i);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

bool IsUppercaseAt(std::string_view utf8, std::size_t offset) {
  if (offset >= utf8.size()) return false;
  std::size_t i = offset;
  UChar32 c = NextCodePoint(utf8, i);
  return c >= 0 && u_isupper(c);
}

}  // namespace filter_audit
