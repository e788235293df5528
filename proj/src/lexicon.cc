#include "filter_audit/lexicon.h"

#include <algorithm>
#include <deque>

#include "filter_audit/text.h"
#include "filter_audit/util.h"

namespace filter_audit {

std::vector<std::string> ParseLexicon(std::string_view text) {
  std::vector<std::string> terms;
  for (const auto& raw : SplitString(text, '\n')) {
    std::string_view line = raw;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) terms.emplace_back(line);
  }
  return terms;
}

LexiconMatcher LexiconMatcher::Compile(const std::vector<std::string>& raw_terms) {
  LexiconMatcher m;
  std::vector<std::vector<std::string>> seqs;
  for (const auto& t : raw_terms) {
    auto toks = TokenNorms(t);
    if (!toks.empty()) seqs.push_back(std::move(toks));
  }
  std::sort(seqs.begin(), seqs.end(), [](const auto& a, const auto& b) {
    return JoinStrings(a, " ") < JoinStrings(b, " ");
  });
  seqs.erase(std::unique(seqs.begin(), seqs.end()), seqs.end());
  if (seqs.empty()) throw ValidationError("lexicon has no usable terms");

  m.nodes_.emplace_back();
  for (std::size_t t = 0; t < seqs.size(); ++t) {
    int node = 0;
    for (const auto& tok : seqs[t]) {
      auto [it, fresh] = m.vocab_.emplace(tok, static_cast<int>(m.vocab_.size()));
      int id = it->second;
      auto nx = m.nodes_[static_cast<std::size_t>(node)].next.find(id);
      if (nx == m.nodes_[static_cast<std::size_t>(node)].next.end()) {
        m.nodes_.emplace_back();
        int child = static_cast<int>(m.nodes_.size()) - 1;
        m.nodes_[static_cast<std::size_t>(node)].next.emplace(id, child);
        node = child;
      } else {
        node = nx->second;
      }
    }
    m.nodes_[static_cast<std::size_t>(node)].output.push_back(t);
    m.terms_.push_back(JoinStrings(seqs[t], " "));
  }
  m.term_tokens_ = std::move(seqs);

  // Breadth-first failure and dictionary links.
  std::deque<int> queue;
  for (const auto& [id, child] : m.nodes_[0].next) {
    m.nodes_[static_cast<std::size_t>(child)].fail = 0;
    queue.push_back(child);
  }
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    for (const auto& [id, v] : m.nodes_[static_cast<std::size_t>(u)].next) {
      int f = m.nodes_[static_cast<std::size_t>(u)].fail;
      while (true) {
        const auto& fn = m.nodes_[static_cast<std::size_t>(f)].next;
        auto it = fn.find(id);
        if (it != fn.end() && it->second != v) {
          f = it->second;
          break;
        }
        if (f == 0) {
          f = 0;
          break;
        }
        f = m.nodes_[static_cast<std::size_t>(f)].fail;
      }
      Node& vn = m.nodes_[static_cast<std::size_t>(v)];
      vn.fail = f;
      const Node& fnode = m.nodes_[static_cast<std::size_t>(f)];
      vn.dict = !fnode.output.empty() ? f : fnode.dict;
      queue.push_back(v);
    }
  }
  return m;
}

LexiconMatcher LexiconMatcher::Load(const std::filesystem::path& path) {
  return Compile(ParseLexicon(ReadFile(path)));
}

int LexiconMatcher::TokenId(const std::string& token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? -1 : it->second;
}

std::vector<LexiconMatcher::Match> LexiconMatcher::FindAll(
    const std::vector<std::string>& norms) const {
  std::vector<Match> out;
  int state = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    int id = TokenId(norms[i]);
    if (id < 0) {
      state = 0;
      continue;
    }
    while (true) {
      const auto& nx = nodes_[static_cast<std::size_t>(state)].next;
      auto it = nx.find(id);
      if (it != nx.end()) {
        state = it->second;
        break;
      }
      if (state == 0) break;
      state = nodes_[static_cast<std::size_t>(state)].fail;
    }
    for (int s = state; s > 0;) {
      const Node& n = nodes_[static_cast<std::size_t>(s)];
      for (std::size_t t : n.output) {
        out.push_back({i + 1 - term_tokens_[t].size(), i + 1, t});
      }
      s = n.dict;
    }
  }
  std::sort(out.begin(), out.end(), [](const Match& a, const Match& b) {
    return std::tie(a.start, a.end, a.term) < std::tie(b.start, b.end, b.term);
  });
  return out;
}

std::vector<std::string> LexiconMatcher::MatchedTerms(
    const std::vector<std::string>& norms) const {
  auto matches = FindAll(norms);
  std::sort(matches.begin(), matches.end(), [&](const Match& a, const Match& b) {
    if (a.start != b.start) return a.start < b.start;
    return terms_[a.term] < terms_[b.term];
  });
  std::vector<std::string> out;
  out.reserve(matches.size());
  for (const auto& m : matches) out.push_back(terms_[m.term]);
  return out;
}

}  // namespace filter_audit
