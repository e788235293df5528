#ifndef FILTER_AUDIT_PIPELINE_H_
#define FILTER_AUDIT_PIPELINE_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "filter_audit/config.h"
#include "filter_audit/ingest.h"
#include "filter_audit/linker.h"
#include "filter_audit/strategies.h"
#include "json.hpp"

namespace filter_audit {

enum class Stage { kBuildKb, kIngest, kTrain, kLink, kFilter, kAudit };

inline constexpr std::array<Stage, 6> kStages = {Stage::kBuildKb, Stage::kIngest, Stage::kTrain,
                                                 Stage::kLink,    Stage::kFilter, Stage::kAudit};

// "build-kb", "ingest", "train", "link", "filter", "audit".
const char* StageName(Stage stage);
std::optional<Stage> ParseStage(std::string_view name);

// Per-stage record written as <stage>/manifest.json. The fingerprint hashes
// the stage name, its parameters and the content hashes of every input,
// upstream stage outputs included, so the manifests chain into a DAG.
struct StageManifest {
  std::string stage;
  std::string fingerprint;
  nlohmann::json params;
  std::map<std::string, std::string> inputs;   // label -> sha256
  std::map<std::string, std::string> outputs;  // path relative to the stage dir -> sha256
  double duration_seconds = 0.0;

  nlohmann::json ToJson() const;
  static StageManifest FromJson(const nlohmann::json& j);
};

struct PipelineOptions {
  unsigned jobs = 1;
  std::ostream* log = nullptr;
};

struct StageOutcome {
  Stage stage;
  bool skipped = false;
  std::string fingerprint;
};

// Drives the stages under <output_dir>/<run_id>/. Each stage builds into
// <stage>.partial and is renamed into place on success; a failed stage's
// partial output moves to quarantine/<stage>-<n>/ with an error.json.
class Pipeline {
 public:
  Pipeline(RunConfig config, PipelineOptions options);

  // Runs one stage unconditionally. Upstream stages must already be complete.
  StageOutcome Run(Stage stage);
  // Runs every stage in order, skipping a stage whose fingerprint is
  // unchanged and whose recorded outputs still verify.
  std::vector<StageOutcome> RunAll();

  const std::filesystem::path& run_dir() const { return run_dir_; }
  std::filesystem::path StageDir(Stage stage) const;
  std::optional<StageManifest> ReadManifest(Stage stage) const;
  // True when the manifest exists and every recorded output hashes to its
  // recorded value.
  bool Verify(Stage stage) const;

 private:
  struct Plan {
    nlohmann::json params;
    std::map<std::string, std::string> inputs;
    std::string fingerprint;
  };

  Plan PlanStage(Stage stage) const;
  void Execute(Stage stage, const std::filesystem::path& dir) const;
  StageOutcome RunPlanned(Stage stage, const Plan& plan);
  void Publish() const;
  void Log(const std::string& line) const;

  void BuildKb(const std::filesystem::path& dir) const;
  void Ingest(const std::filesystem::path& dir) const;
  void Train(const std::filesystem::path& dir) const;
  void Link(const std::filesystem::path& dir) const;
  void Filter(const std::filesystem::path& dir) const;
  void Audit(const std::filesystem::path& dir) const;

  RunConfig config_;
  PipelineOptions options_;
  std::filesystem::path run_dir_;
};

// Artifact codecs shared by the stages and by tests.
nlohmann::json DocumentToJson(const Document& doc);
Document DocumentFromJson(const nlohmann::json& j);
nlohmann::json MentionToJson(const LinkedMention& m);
LinkedMention MentionFromJson(const nlohmann::json& j);
nlohmann::json VerdictToJson(const StrategyVerdict& v);
StrategyVerdict VerdictFromJson(const nlohmann::json& j);

// One JSON value per line.
std::string ToJsonl(const std::vector<nlohmann::json>& rows);
std::vector<nlohmann::json> ReadJsonl(const std::filesystem::path& path);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_PIPELINE_H_
