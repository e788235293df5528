#ifndef FILTER_AUDIT_REPORT_H_
#define FILTER_AUDIT_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "filter_audit/audit.h"
#include "json.hpp"

namespace filter_audit {

struct CorpusProvenance {
  std::string name;            // path relative to the config directory
  std::string content_sha256;  // over decompressed bytes
  std::uint64_t records = 0;
  std::uint64_t documents = 0;
  std::uint64_t errors = 0;

  bool operator==(const CorpusProvenance&) const = default;
};

struct RunMetadata {
  std::string run_id;
  std::string config_hash;
  std::string region_map_hash;
  std::string people_hash;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, double> thresholds;
  std::vector<std::string> strategies;
  std::vector<CorpusProvenance> corpora;

  bool operator==(const RunMetadata&) const = default;
};

struct SampleCounts {
  std::size_t sample_id = 0;
  std::uint64_t documents = 0;
  GroupArray counts{};

  bool operator==(const SampleCounts&) const = default;
};

struct PairwiseAnova {
  std::size_t a = 0;
  std::size_t b = 0;
  AnovaResult result;

  bool operator==(const PairwiseAnova&) const = default;
};

struct Calibration {
  double target_removal = 0.0;
  double tau = 0.0;
  double heldout_removal = 0.0;
  std::uint64_t heldout_documents = 0;

  bool operator==(const Calibration&) const = default;
};

struct Coverage {
  std::uint64_t unknown_mentions = 0;
  std::uint64_t parse_errors = 0;
  std::uint64_t spans = 0;
  std::uint64_t linked = 0;
  std::uint64_t unlinked = 0;
  std::map<std::string, std::uint64_t> gate;       // gate status -> documents
  std::map<std::string, std::uint64_t> unscored;   // strategy -> units
  std::map<std::string, std::uint64_t> evaluated;  // strategy -> units

  bool operator==(const Coverage&) const = default;
};

struct AuditReport {
  RunMetadata metadata;
  std::vector<SampleCounts> samples;
  std::vector<RemovalStats> removal;
  std::optional<AnovaResult> anova_all;
  std::vector<PairwiseAnova> anova_pairwise;
  OverlapMatrix overlap;
  std::vector<RetentionStats> retention;
  std::map<std::string, RankedCounts> top_terms;
  OccupationShift occupations;
  std::map<std::string, Calibration> calibration;
  Coverage coverage;

  bool operator==(const AuditReport&) const = default;
};

// Sorted keys, two-space indent, floats as %.17g, non-finite floats as null.
std::string CanonicalJson(const nlohmann::json& j);

nlohmann::json ReportToJson(const AuditReport& report);
AuditReport ReportFromJson(const nlohmann::json& j);

std::string RenderJson(const AuditReport& report);
// File name -> CSV contents, e.g. "removal.csv".
std::map<std::string, std::string> RenderCsvBundle(const AuditReport& report);
std::string RenderMarkdown(const AuditReport& report);

// Writes report.json, tables/*.csv and report.md under `dir`.
void WriteReport(const AuditReport& report, const std::filesystem::path& dir);

// Display precision for removal percentages: two decimals for classifier
// strategies, one otherwise.
int RemovalDecimals(StrategyCategory c);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_REPORT_H_
