#include <algorithm>
#include <bitset>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>

#include "doctest.h"
#include "filter_audit/audit.h"
#include "filter_audit/util.h"

using namespace filter_audit;

namespace {

struct TwoPass {
  double f;
  double ssb;
  double ssw;
};

// Definitional one-way ANOVA: grand mean first, then both sums of squares.
TwoPass DefinitionalAnova(const std::vector<std::vector<double>>& groups) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& g : groups) {
    for (double x : g) sum += x;
    n += g.size();
  }
  double grand = sum / n;
  double ssb = 0;
  double ssw = 0;
  for (const auto& g : groups) {
    double gs = 0;
    for (double x : g) gs += x;
    double mean = gs / g.size();
    ssb += g.size() * (mean - grand) * (mean - grand);
    for (double x : g) ssw += (x - mean) * (x - mean);
  }
  double dfb = groups.size() - 1.0;
  double dfw = static_cast<double>(n - groups.size());
  return {(ssb / dfb) / (ssw / dfw), ssb, ssw};
}

double RelErr(double a, double b) {
  double s = std::max(std::abs(a), std::abs(b));
  return s == 0 ? 0 : std::abs(a - b) / s;
}

LinkedMention Mention(const std::string& doc, std::size_t sentence, DemographicGroup g,
                      const std::string& id = "Q1") {
  LinkedMention m;
  m.span.doc_id = doc;
  m.span.sentence_index = sentence;
  m.span.token_end = 1;
  m.entity_id = id;
  m.group = g;
  m.similarity = 1.0;
  return m;
}

}  // namespace

TEST_CASE("baseline counts") {
  CHECK(BaselineCounts({}) == GroupArray{});
  std::vector<LinkedMention> ms = {Mention("d", 0, DemographicGroup::kWesternMan),
                                   Mention("d", 1, DemographicGroup::kWesternMan),
                                   Mention("e", 0, DemographicGroup::kWesternMan),
                                   Mention("e", 0, DemographicGroup::kPostColonialWoman)};
  GroupArray c = BaselineCounts(ms);
  CHECK(At(c, DemographicGroup::kWesternMan) == 3);
  CHECK(At(c, DemographicGroup::kPostColonialWoman) == 1);
  CHECK(At(c, DemographicGroup::kWesternWoman) == 0);
}

TEST_CASE("removed mentions: granularity and oracle") {
  std::vector<LinkedMention> ms = {Mention("d", 0, DemographicGroup::kWesternMan),
                                   Mention("d", 3, DemographicGroup::kWesternWoman),
                                   Mention("e", 0, DemographicGroup::kWesternWoman)};
  CHECK(RemovedMentions(ms, {}) == GroupArray{});
  FlaggedSet doc_flag = {UnitRef{"d", std::nullopt}};
  GroupArray r = RemovedMentions(ms, doc_flag);
  CHECK(At(r, DemographicGroup::kWesternMan) == 1);
  CHECK(At(r, DemographicGroup::kWesternWoman) == 1);
  FlaggedSet sent_flag = {UnitRef{"d", 3}};
  r = RemovedMentions(ms, sent_flag);
  CHECK(At(r, DemographicGroup::kWesternMan) == 0);
  CHECK(At(r, DemographicGroup::kWesternWoman) == 1);

  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LinkedMention> linked;
    for (int i = 0; i < 200; ++i) {
      linked.push_back(Mention("doc" + std::to_string(UniformBelow(rng, 10)), UniformBelow(rng, 6),
                               static_cast<DemographicGroup>(UniformBelow(rng, 5))));
    }
    FlaggedSet flagged;
    std::vector<StrategyVerdict> verdicts;
    for (int i = 0; i < 15; ++i) {
      StrategyVerdict v;
      v.unit.doc_id = "doc" + std::to_string(UniformBelow(rng, 10));
      if (UniformBelow(rng, 4)) v.unit.sentence_index = UniformBelow(rng, 6);
      v.flagged = UniformBelow(rng, 2) == 0;
      v.scored = UniformBelow(rng, 5) != 0;
      verdicts.push_back(v);
    }
    flagged = FlaggedUnits(verdicts);
    GroupArray got = RemovedMentions(linked, flagged);
    GroupArray base = BaselineCounts(linked);
    // Flat loop oracle over the verdict list itself.
    GroupArray expect{};
    std::uint64_t total = 0;
    for (const auto& m : linked) {
      bool hit = false;
      for (const auto& v : verdicts) {
        if (!v.flagged || !v.scored || v.unit.doc_id != m.span.doc_id) continue;
        if (!v.unit.sentence_index || *v.unit.sentence_index == m.span.sentence_index) hit = true;
      }
      if (hit) {
        ++expect[static_cast<std::size_t>(m.group)];
        ++total;
      }
    }
    CHECK(got == expect);
    std::uint64_t sum = 0;
    for (std::size_t g = 0; g < 5; ++g) {
      CHECK(got[g] <= base[g]);
      sum += got[g];
    }
    CHECK(sum == total);
  }
}

TEST_CASE("removal percentages and display rounding") {
  GroupArray base{100, 0, 8, 16, 3};
  GroupArray removed{4, 0, 1, 3, 0};
  RemovalStats s = RemovalPercentages(MakeStrategyId("hatebase"), base, removed);
  CHECK(s.groups[0].percentage == std::optional<double>(-4.0));
  CHECK_FALSE(s.groups[1].percentage.has_value());
  CHECK(s.groups[2].percentage == std::optional<double>(-12.5));
  for (const auto& g : s.groups) {
    if (g.percentage) {
      CHECK(*g.percentage <= 0.0);
      CHECK(*g.percentage >= -100.0);
    }
  }
  CHECK_THROWS_AS(RemovalPercentages(MakeStrategyId("hatebase"), GroupArray{1}, GroupArray{2}),
                  RuntimeError);

  CHECK(FormatRemovalPercent(4, 100, 1) == "-4.0%");
  CHECK(FormatRemovalPercent(0, 100, 1) == "-0.0%");
  CHECK(FormatRemovalPercent(0, 0, 1) == "N/A");
  CHECK(FormatRemovalPercent(1, 8, 0) == "-12%");   // 12.5 -> even
  CHECK(FormatRemovalPercent(3, 8, 0) == "-38%");   // 37.5 -> even
  CHECK(FormatRemovalPercent(1, 16, 1) == "-6.2%");  // 6.25
  CHECK(FormatRemovalPercent(3, 16, 1) == "-18.8%");
  CHECK(FormatRemovalPercent(89, 10000, 2) == "-0.89%");
  CHECK(FormatRemovalPercent(100, 100, 1) == "-100.0%");
  CHECK(FormatRatioHalfEven(1, 3, 3) == "0.333");
  CHECK(FormatRatioHalfEven(2, 3, 0) == "1");
}

TEST_CASE("ANOVA examples") {
  auto same = AnovaF({{1, 2, 3}, {1, 2, 3}});
  CHECK(same.f == 0.0);
  CHECK(same.p == 1.0);
  auto eight = AnovaF({{1, 2}, {3, 4}});
  CHECK(eight.f == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(eight.df_between == 1);
  CHECK(eight.df_within == 2);
  auto flat = AnovaF({{5, 5}, {5, 5}, {5, 5}});
  CHECK(flat.f == 0.0);
  CHECK(flat.p == 1.0);
  auto split = AnovaF({{1, 1}, {2, 2}});
  CHECK(std::isinf(split.f));
  CHECK(split.p == 0.0);
  CHECK_THROWS_AS(AnovaF({{1, 2, 3}}), ValidationError);
  CHECK_THROWS_AS(AnovaF({{1, 2}, {3}}), ValidationError);
}

TEST_CASE("ANOVA matches the two-pass oracle on random instances") {
  std::mt19937_64 rng(5150);
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t k = 2 + UniformBelow(rng, 5);
    std::vector<std::vector<double>> groups(k);
    double spread = std::pow(10.0, static_cast<double>(UniformBelow(rng, 5)));
    for (auto& g : groups) {
      std::size_t n = 2 + UniformBelow(rng, 9);
      for (std::size_t i = 0; i < n; ++i) {
        g.push_back(std::floor(UniformUnit(rng) * spread * 100) + UniformBelow(rng, 3) * spread);
      }
    }
    TwoPass oracle = DefinitionalAnova(groups);
    if (oracle.ssw == 0) continue;
    AnovaResult r = AnovaF(groups);
    CHECK(RelErr(r.f, oracle.f) < 1e-9);
    CHECK(r.p >= 0.0);
    CHECK(r.p <= 1.0);
    boost::math::fisher_f_distribution<double> dist(r.df_between, r.df_within);
    CHECK(std::abs(r.p - boost::math::cdf(boost::math::complement(dist, oracle.f))) < 1e-9);

    // Scaling every value leaves F unchanged.
    double c = 1.0 + UniformBelow(rng, 1000) / 7.0;
    auto scaled = groups;
    for (auto& g : scaled) {
      for (double& x : g) x *= c;
    }
    CHECK(RelErr(AnovaF(scaled).f, r.f) < 1e-9);
  }
}

TEST_CASE("incomplete beta agrees with a reference implementation") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) {
    double a = 0.05 + UniformUnit(rng) * 200;
    double b = 0.05 + UniformUnit(rng) * 200;
    double x = UniformUnit(rng);
    CHECK(std::abs(RegularizedIncompleteBeta(x, a, b) - boost::math::ibeta(a, b, x)) < 1e-10);
  }
  CHECK(RegularizedIncompleteBeta(0.0, 2, 3) == 0.0);
  CHECK(RegularizedIncompleteBeta(1.0, 2, 3) == 1.0);
  CHECK(FSurvival(0.0, 3, 10) == 1.0);
}

TEST_CASE("identically distributed samples give a high p-value") {
  // Five samples of per-group counts, each drawn around the same means.
  std::mt19937_64 rng(2024);
  const std::array<double, 4> means = {85276, 15272, 22185, 5292};
  std::vector<std::vector<double>> samples;
  for (int s = 0; s < 5; ++s) {
    std::vector<double> counts;
    for (double m : means) {
      std::poisson_distribution<long> pois(m);
      counts.push_back(static_cast<double>(pois(rng)));
    }
    samples.push_back(counts);
  }
  AnovaResult r = AnovaF(samples);
  CHECK(r.p > 0.9);

  // Permutation oracle: shuffle values across samples 10k times.
  std::vector<double> pooled;
  for (const auto& s : samples) pooled.insert(pooled.end(), s.begin(), s.end());
  std::size_t at_least = 0;
  const int kPerms = 10000;
  for (int i = 0; i < kPerms; ++i) {
    DeterministicShuffle(pooled, rng);
    std::vector<std::vector<double>> perm(5);
    for (std::size_t j = 0; j < pooled.size(); ++j) perm[j / 4].push_back(pooled[j]);
    if (DefinitionalAnova(perm).f >= r.f) ++at_least;
  }
  double perm_p = static_cast<double>(at_least) / kPerms;
  CHECK(perm_p > 0.9);
  CHECK(std::abs(perm_p - r.p) < 0.05);

  // Pairwise mode.
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = i + 1; j < 5; ++j) CHECK(AnovaF({samples[i], samples[j]}).p > 0.9);
  }
}

TEST_CASE("overlap examples") {
  FlaggedSet a = {UnitRef{"d", 1}, UnitRef{"d", 2}};
  FlaggedSet b = {UnitRef{"d", 2}, UnitRef{"d", 3}};
  auto m = ComputeOverlap({{"a", a}, {"b", b}});
  CHECK(m.intersection[0][1] == 1);
  CHECK(m.containment[0][1] == std::optional<double>(0.5));
  CHECK(m.all_intersection == 1);

  FlaggedSet sub = {UnitRef{"d", 2}};
  m = ComputeOverlap({{"sub", sub}, {"b", b}, {"empty", {}}});
  CHECK(m.containment[0][1] == std::optional<double>(1.0));
  CHECK_FALSE(m.containment[2][0].has_value());
  CHECK(m.containment[0][2] == std::optional<double>(0.0));
  CHECK(m.all_intersection == 0);
}

TEST_CASE("overlap equals a bitset oracle") {
  std::mt19937_64 rng(404);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<std::bitset<64>, 3> bits;
    std::vector<std::pair<std::string, FlaggedSet>> sets;
    for (int s = 0; s < 3; ++s) {
      FlaggedSet fs;
      for (int u = 0; u < 64; ++u) {
        if (UniformBelow(rng, 3) == 0) {
          bits[s].set(u);
          fs.insert(UnitRef{"doc" + std::to_string(u / 8), static_cast<std::size_t>(u % 8)});
        }
      }
      sets.emplace_back("s" + std::to_string(s), fs);
    }
    auto m = ComputeOverlap(sets);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        std::size_t common = (bits[i] & bits[j]).count();
        CHECK(m.intersection[i][j] == common);
        CHECK(m.intersection[i][j] <= std::min(bits[i].count(), bits[j].count()));
        if (bits[i].count() > 0) {
          CHECK(*m.containment[i][j] == static_cast<double>(common) / bits[i].count());
        }
      }
    }
    CHECK(m.all_intersection == (bits[0] & bits[1] & bits[2]).count());
  }
}

TEST_CASE("retention of harm") {
  std::map<std::string, std::size_t> counts = {{"a", 4}, {"b", 6}};
  FlaggedSet toxic = {UnitRef{"a", 0}, UnitRef{"b", 2}, UnitRef{"b", 5}};
  auto none = RetentionOfHarm("q", counts, {}, toxic);
  CHECK(none.kept_fraction == 1.0);
  CHECK(none.kept_toxic_fraction == std::optional<double>(1.0));
  auto all_toxic_docs =
      RetentionOfHarm("q", counts, {UnitRef{"a", std::nullopt}, UnitRef{"b", std::nullopt}}, toxic);
  CHECK(all_toxic_docs.kept_toxic_fraction == std::optional<double>(0.0));
  CHECK(all_toxic_docs.kept_fraction == 0.0);
  auto some = RetentionOfHarm("q", counts, {UnitRef{"b", std::nullopt}}, toxic);
  CHECK(some.kept_fraction == 0.4);
  CHECK(*some.kept_toxic_fraction == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(RetentionOfHarm("q", counts, {}, {}).kept_toxic_fraction.has_value());

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    std::map<std::string, std::size_t> sc;
    FlaggedSet removed;
    FlaggedSet tox;
    for (int d = 0; d < 20; ++d) {
      std::string id = "d" + std::to_string(d);
      sc[id] = 1 + UniformBelow(rng, 9);
      if (UniformBelow(rng, 3) == 0) removed.insert(UnitRef{id, std::nullopt});
      for (std::size_t s = 0; s < sc[id]; ++s) {
        if (UniformBelow(rng, 5) == 0) tox.insert(UnitRef{id, s});
      }
    }
    auto r = RetentionOfHarm("q", sc, removed, tox);
    std::uint64_t total = 0, kept = 0, t = 0, kt = 0;
    for (const auto& [id, n] : sc) {
      bool rem = removed.count(UnitRef{id, std::nullopt}) > 0;
      for (std::size_t s = 0; s < n; ++s) {
        ++total;
        kept += !rem;
        if (tox.count(UnitRef{id, s})) {
          ++t;
          kt += !rem;
        }
      }
    }
    CHECK(r.sentences == total);
    CHECK(r.kept_sentences == kept);
    CHECK(r.toxic_sentences == t);
    CHECK(r.kept_toxic_sentences == kt);
    CHECK(r.kept_fraction >= 0.0);
    CHECK(r.kept_fraction <= 1.0);
  }
}

TEST_CASE("top matched terms") {
  CHECK(TopMatchedTerms({}).empty());
  StrategyVerdict v;
  v.matched_terms = {"sex", "sex"};
  CHECK(TopMatchedTerms({v}) == RankedCounts{{"sex", 2}});

  std::mt19937_64 rng(6);
  const std::vector<std::string> terms = {"ass", "dick", "nude", "porn", "sex", "slave", "xxx"};
  std::vector<StrategyVerdict> vs;
  std::map<std::string, std::uint64_t> oracle;
  for (int i = 0; i < 500; ++i) {
    StrategyVerdict x;
    std::size_t n = UniformBelow(rng, 3);
    for (std::size_t j = 0; j < n; ++j) {
      x.matched_terms.push_back(terms[UniformBelow(rng, terms.size())]);
      ++oracle[x.matched_terms.back()];
    }
    vs.push_back(x);
  }
  auto top = TopMatchedTerms(vs, 5);
  REQUIRE(top.size() == 5);
  for (std::size_t i = 0; i < top.size(); ++i) {
    CHECK(oracle[top[i].first] == top[i].second);
    if (i > 0) {
      CHECK((top[i - 1].second > top[i].second ||
             (top[i - 1].second == top[i].second && top[i - 1].first < top[i].first)));
    }
  }
  // Nothing outside the top five beats the fifth.
  for (const auto& [t, c] : oracle) {
    bool inside = std::any_of(top.begin(), top.end(), [&](auto& p) { return p.first == t; });
    if (!inside) CHECK((c < top.back().second || (c == top.back().second && t > top.back().first)));
  }
}

TEST_CASE("occupation shift") {
  RegionMap map = RegionMap::Default();
  PersonRecord writer;
  writer.entity_id = "Q1";
  writer.primary_name = "A";
  writer.gender = Gender::kWoman;
  writer.birth_country = "FR";
  writer.occupations = {"writer"};
  PersonRecord actor = writer;
  actor.entity_id = "Q2";
  actor.occupations = {"actor", "model"};
  PeopleIndex people({writer, actor}, map);

  std::vector<LinkedMention> ms = {Mention("d", 0, DemographicGroup::kWesternWoman, "Q1"),
                                   Mention("d", 1, DemographicGroup::kWesternWoman, "Q2"),
                                   Mention("d", 2, DemographicGroup::kWesternWoman, "Q2")};
  auto empty = ComputeOccupationShift(ms, {}, people);
  const auto ww = static_cast<std::size_t>(DemographicGroup::kWesternWoman);
  CHECK(empty.flagged[ww].empty());
  CHECK(empty.baseline[ww] == RankedCounts{{"actor", 2}, {"model", 2}, {"writer", 1}});

  auto one = ComputeOccupationShift(ms, {UnitRef{"d", 0}}, people);
  CHECK(one.flagged[ww] == RankedCounts{{"writer", 1}});
  for (std::size_t g = 0; g < 4; ++g) {
    if (g != ww) CHECK(one.baseline[g].empty());
  }
}
