#ifndef FILTER_AUDIT_AUDIT_H_
#define FILTER_AUDIT_AUDIT_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "filter_audit/kb.h"
#include "filter_audit/linker.h"
#include "filter_audit/strategies.h"

namespace filter_audit {

// Mention counts indexed by DemographicGroup, Unknown included.
using GroupArray = std::array<std::uint64_t, 5>;

inline std::uint64_t& At(GroupArray& a, DemographicGroup g) {
  return a[static_cast<std::size_t>(g)];
}
inline std::uint64_t At(const GroupArray& a, DemographicGroup g) {
  return a[static_cast<std::size_t>(g)];
}

GroupArray BaselineCounts(const std::vector<LinkedMention>& linked);

using FlaggedSet = std::set<UnitRef>;

// Flagged, scored units of a verdict stream.
FlaggedSet FlaggedUnits(const std::vector<StrategyVerdict>& verdicts);

// A mention is removed when its sentence, or its whole document, is flagged.
bool IsRemoved(const MentionSpan& span, const FlaggedSet& flagged);

GroupArray RemovedMentions(const std::vector<LinkedMention>& linked, const FlaggedSet& flagged);

struct GroupRemoval {
  std::uint64_t baseline = 0;
  std::uint64_t removed = 0;
  std::optional<double> percentage;  // -100 * removed / baseline, unrounded; empty if baseline 0

  bool operator==(const GroupRemoval&) const = default;
};

struct RemovalStats {
  std::string strategy;
  StrategyCategory category = StrategyCategory::kRuleBased;
  std::array<GroupRemoval, 5> groups{};  // indexed by DemographicGroup

  bool operator==(const RemovalStats&) const = default;
};

RemovalStats RemovalPercentages(const StrategyId& id, const GroupArray& baseline,
                                const GroupArray& removed);

// -100 * removed / baseline rounded half-even to `decimals`, computed in
// exact integer arithmetic, e.g. "-4.0%". "N/A" when baseline is 0.
std::string FormatRemovalPercent(std::uint64_t removed, std::uint64_t baseline, int decimals);

// Half-even rounding of a non-negative rational num/den to `decimals`.
std::string FormatRatioHalfEven(std::uint64_t num, std::uint64_t den, int decimals);

struct AnovaResult {
  double f = 0.0;
  double p = 1.0;
  std::size_t df_between = 0;
  std::size_t df_within = 0;

  bool operator==(const AnovaResult&) const = default;
};

// One-way ANOVA. Each inner vector is one group. Throws ValidationError for
// fewer than two groups or a group with fewer than two values. All values
// identical gives F = 0, p = 1; zero within-group spread with distinct group
// means gives F = +inf, p = 0.
AnovaResult AnovaF(const std::vector<std::vector<double>>& groups);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double RegularizedIncompleteBeta(double x, double a, double b);

// P(F > f) for an F(d1, d2) variate.
double FSurvival(double f, double d1, double d2);

struct OverlapMatrix {
  std::vector<std::string> names;
  std::vector<std::size_t> sizes;
  std::vector<std::vector<std::size_t>> intersection;              // symmetric
  std::vector<std::vector<std::optional<double>>> containment;     // |Ai∩Aj| / |Ai|
  std::size_t all_intersection = 0;                                // across every set

  bool operator==(const OverlapMatrix&) const = default;
};

OverlapMatrix ComputeOverlap(const std::vector<std::pair<std::string, FlaggedSet>>& sets);

struct RetentionStats {
  std::string strategy;
  std::uint64_t sentences = 0;
  std::uint64_t kept_sentences = 0;
  std::uint64_t toxic_sentences = 0;
  std::uint64_t kept_toxic_sentences = 0;
  double kept_fraction = 1.0;
  std::optional<double> kept_toxic_fraction;  // empty when nothing is toxic

  bool operator==(const RetentionStats&) const = default;
};

// `sentence_counts` maps each evaluated document to its sentence count;
// `removed_docs` are the quality strategy's flagged documents; `toxic` holds
// harm-flagged sentence units.
RetentionStats RetentionOfHarm(const std::string& strategy,
                               const std::map<std::string, std::size_t>& sentence_counts,
                               const FlaggedSet& removed_docs, const FlaggedSet& toxic);

using RankedCounts = std::vector<std::pair<std::string, std::uint64_t>>;

// Count descending, ties by key ascending, first k.
RankedCounts RankCounts(const std::map<std::string, std::uint64_t>& counts, std::size_t k);

RankedCounts TopMatchedTerms(const std::vector<StrategyVerdict>& verdicts, std::size_t k = 5);

struct OccupationShift {
  std::array<RankedCounts, 4> baseline;  // indexed by reported group
  std::array<RankedCounts, 4> flagged;

  bool operator==(const OccupationShift&) const = default;
};

OccupationShift ComputeOccupationShift(const std::vector<LinkedMention>& linked,
                                       const FlaggedSet& flagged, const PeopleIndex& people,
                                       std::size_t k = 5);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_AUDIT_H_
