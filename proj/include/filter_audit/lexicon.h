#ifndef FILTER_AUDIT_LEXICON_H_
#define FILTER_AUDIT_LEXICON_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace filter_audit {

// Lexicon file: UTF-8, one term per line, '#' starts a comment.
std::vector<std::string> ParseLexicon(std::string_view text);

// Aho-Corasick automaton over token sequences. Terms are normalized with
// TokenNorms, so "Married  To" and "married to" are the same term.
class LexiconMatcher {
 public:
  struct Match {
    std::size_t start = 0;  // token range [start, end)
    std::size_t end = 0;
    std::size_t term = 0;   // index into terms()

    bool operator==(const Match&) const = default;
  };

  // Throws ValidationError if no term survives normalization.
  static LexiconMatcher Compile(const std::vector<std::string>& terms);
  static LexiconMatcher Load(const std::filesystem::path& path);

  // Every occurrence, ordered by (start, end).
  std::vector<Match> FindAll(const std::vector<std::string>& token_norms) const;

  // Matched term strings ordered by start position, then term.
  std::vector<std::string> MatchedTerms(const std::vector<std::string>& token_norms) const;

  // Normalized terms, tokens joined by single spaces. Sorted, unique.
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::string>& term_tokens(std::size_t i) const { return term_tokens_[i]; }

 private:
  struct Node {
    std::unordered_map<int, int> next;
    int fail = 0;
    int dict = -1;                    // nearest proper suffix node with output
    std::vector<std::size_t> output;  // terms ending exactly here
  };

  int TokenId(const std::string& token) const;

  std::vector<std::string> terms_;
  std::vector<std::vector<std::string>> term_tokens_;
  std::unordered_map<std::string, int> vocab_;
  std::vector<Node> nodes_;
};

}  // namespace filter_audit

#endif  // FILTER_AUDIT_LEXICON_H_
