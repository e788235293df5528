#include "filter_audit/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filter_audit/util.h"

namespace filter_audit {

GroupArray BaselineCounts(const std::vector<LinkedMention>& linked) {
  GroupArray counts{};
  for (const auto& m : linked) ++At(counts, m.group);
  return counts;
}

FlaggedSet FlaggedUnits(const std::vector<StrategyVerdict>& verdicts) {
  FlaggedSet out;
  for (const auto& v : verdicts) {
    if (v.scored && v.flagged) out.insert(v.unit);
  }
  return out;
}

bool IsRemoved(const MentionSpan& span, const FlaggedSet& flagged) {
  if (flagged.empty()) return false;
  return flagged.count(UnitRef{span.doc_id, span.sentence_index}) > 0 ||
         flagged.count(UnitRef{span.doc_id, std::nullopt}) > 0;
}

GroupArray RemovedMentions(const std::vector<LinkedMention>& linked, const FlaggedSet& flagged) {
  GroupArray counts{};
  for (const auto& m : linked) {
    if (IsRemoved(m.span, flagged)) ++At(counts, m.group);
  }
  return counts;
}

RemovalStats RemovalPercentages(const StrategyId& id, const GroupArray& baseline,
                                const GroupArray& removed) {
  RemovalStats s;
  s.strategy = id.name;
  s.category = id.category;
  for (std::size_t g = 0; g < 5; ++g) {
    if (removed[g] > baseline[g]) {
      throw RuntimeError("strategy " + id.name + " removed more mentions than exist in group " +
                         GroupKey(static_cast<DemographicGroup>(g)));
    }
    s.groups[g].baseline = baseline[g];
    s.groups[g].removed = removed[g];
    if (baseline[g] > 0) {
      s.groups[g].percentage =
          -100.0 * static_cast<double>(removed[g]) / static_cast<double>(baseline[g]);
    }
  }
  return s;
}

std::string FormatRatioHalfEven(std::uint64_t num, std::uint64_t den, int decimals) {
  if (den == 0) throw ValidationError("ratio with zero denominator");
  unsigned __int128 scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  unsigned __int128 scaled = static_cast<unsigned __int128>(num) * scale;
  unsigned __int128 q = scaled / den;
  unsigned __int128 r = scaled % den;
  unsigned __int128 twice = r * 2;
  if (twice > den || (twice == den && (q % 2) == 1)) ++q;
  unsigned __int128 whole = q / scale;
  unsigned __int128 frac = q % scale;
  auto digits = [](unsigned __int128 v) {
    std::string s;
    do {
      s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
      v /= 10;
    } while (v > 0);
    return s;
  };
  std::string out = digits(whole);
  if (decimals > 0) {
    std::string f = digits(frac);
    out += "." + std::string(static_cast<std::size_t>(decimals) - f.size(), '0') + f;
  }
  return out;
}

std::string FormatRemovalPercent(std::uint64_t removed, std::uint64_t baseline, int decimals) {
  if (baseline == 0) return "N/A";
  return "-" + FormatRatioHalfEven(removed * 100, baseline, decimals) + "%";
}

// ---- ANOVA ----

AnovaResult AnovaF(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ValidationError("ANOVA needs at least two groups");
  struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::vector<Moments> moments;
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ValidationError("each ANOVA group needs at least two values");
    Moments m;
    for (double x : g) {
      ++m.n;
      double delta = x - m.mean;
      m.mean += delta / static_cast<double>(m.n);
      m.m2 += delta * (x - m.mean);
    }
    moments.push_back(m);
    total += m.n;
  }
  double grand = 0.0;
  for (const auto& m : moments) grand += m.mean * static_cast<double>(m.n);
  grand /= static_cast<double>(total);
  double ssb = 0.0;
  double ssw = 0.0;
  for (const auto& m : moments) {
    ssb += static_cast<double>(m.n) * (m.mean - grand) * (m.mean - grand);
    ssw += m.m2;
  }
  AnovaResult r;
  r.df_between = groups.size() - 1;
  r.df_within = total - groups.size();
  if (ssw <= 0.0) {
    if (ssb == 0.0) return r;  // F = 0, p = 1
    r.f = std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
  }
  r.f = (ssb / static_cast<double>(r.df_between)) / (ssw / static_cast<double>(r.df_within));
  r.p = FSurvival(r.f, static_cast<double>(r.df_between), static_cast<double>(r.df_within));
  return r;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double BetaContinuedFraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 100000; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw RuntimeError("incomplete beta continued fraction did not converge");
}

}  // namespace

double RegularizedIncompleteBeta(double x, double a, double b) {
  if (!(a > 0 && b > 0)) throw ValidationError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("incomplete beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                     b * std::log1p(-x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * BetaContinuedFraction(x, a, b) / a;
  return 1.0 - front * BetaContinuedFraction(1.0 - x, b, a) / b;
}

double FSurvival(double f, double d1, double d2) {
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  double x = d2 / (d2 + d1 * f);
  double p = RegularizedIncompleteBeta(x, d2 / 2.0, d1 / 2.0);
  return std::clamp(p, 0.0, 1.0);
}

// ---- overlap ----

OverlapMatrix ComputeOverlap(const std::vector<std::pair<std::string, FlaggedSet>>& sets) {
  OverlapMatrix m;
  std::size_t n = sets.size();
  m.intersection.assign(n, std::vector<std::size_t>(n, 0));
  m.containment.assign(n, std::vector<std::optional<double>>(n));
  for (const auto& [name, s] : sets) {
    m.names.push_back(name);
    m.sizes.push_back(s.size());
  }
  auto count_common = [](const FlaggedSet& a, const FlaggedSet& b) {
    std::size_t c = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++c;
        ++ia;
        ++ib;
      }
    }
    return c;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      std::size_t c = i == j ? sets[i].second.size() : count_common(sets[i].second, sets[j].second);
      m.intersection[i][j] = m.intersection[j][i] = c;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (m.sizes[i] > 0) {
        m.containment[i][j] =
            static_cast<double>(m.intersection[i][j]) / static_cast<double>(m.sizes[i]);
      }
    }
  }
  if (n > 0) {
    std::size_t smallest = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (m.sizes[i] < m.sizes[smallest]) smallest = i;
    }
    for (const auto& u : sets[smallest].second) {
      bool all = true;
      for (std::size_t i = 0; i < n && all; ++i) all = sets[i].second.count(u) > 0;
      if (all) ++m.all_intersection;
    }
  }
  return m;
}

// ---- retention ----

RetentionStats RetentionOfHarm(const std::string& strategy,
                               const std::map<std::string, std::size_t>& sentence_counts,
                               const FlaggedSet& removed_docs, const FlaggedSet& toxic) {
  RetentionStats r;
  r.strategy = strategy;
  for (const auto& [doc, n] : sentence_counts) {
    r.sentences += n;
    if (removed_docs.count(UnitRef{doc, std::nullopt}) == 0) r.kept_sentences += n;
  }
  for (const auto& u : toxic) {
    if (!u.sentence_index || sentence_counts.count(u.doc_id) == 0) continue;
    ++r.toxic_sentences;
    if (removed_docs.count(UnitRef{u.doc_id, std::nullopt}) == 0) ++r.kept_toxic_sentences;
  }
  if (r.sentences > 0) {
    r.kept_fraction = static_cast<double>(r.kept_sentences) / static_cast<double>(r.sentences);
  }
  if (r.toxic_sentences > 0) {
    r.kept_toxic_fraction =
        static_cast<double>(r.kept_toxic_sentences) / static_cast<double>(r.toxic_sentences);
  }
  return r;
}

// ---- rankings ----

RankedCounts RankCounts(const std::map<std::string, std::uint64_t>& counts, std::size_t k) {
  RankedCounts out(counts.begin(), counts.end());
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (out.size() > k) out.resize(k);
  return out;
}

RankedCounts TopMatchedTerms(const std::vector<StrategyVerdict>& verdicts, std::size_t k) {
  std::map<std::string, std::uint64_t> counts;
  for (const auto& v : verdicts) {
    for (const auto& t : v.matched_terms) ++counts[t];
  }
  return RankCounts(counts, k);
}

OccupationShift ComputeOccupationShift(const std::vector<LinkedMention>& linked,
                                       const FlaggedSet& flagged, const PeopleIndex& people,
                                       std::size_t k) {
  std::array<std::map<std::string, std::uint64_t>, 4> base;
  std::array<std::map<std::string, std::uint64_t>, 4> hit;
  for (const auto& m : linked) {
    if (m.group == DemographicGroup::kUnknown) continue;
    const PersonRecord* rec = people.Find(m.entity_id);
    if (rec == nullptr) continue;
    auto g = static_cast<std::size_t>(m.group);
    bool removed = IsRemoved(m.span, flagged);
    for (const auto& occ : rec->occupations) {
      ++base[g][occ];
      if (removed) ++hit[g][occ];
    }
  }
  OccupationShift s;
  for (std::size_t g = 0; g < 4; ++g) {
    s.baseline[g] = RankCounts(base[g], k);
    s.flagged[g] = RankCounts(hit[g], k);
  }
  return s;
}

}  // namespace filter_audit
