#ifndef FILTER_AUDIT_CONFIG_H_
#define FILTER_AUDIT_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filter_audit/ingest.h"
#include "json.hpp"

namespace filter_audit {

// Sentence classifier trained in-run from a "label TAB text" file, or loaded
// from a serialized model.
struct ClassifierSpec {
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> model;
  double tau = 0.8;
};

struct QualitySpec {
  std::optional<std::filesystem::path> train;
  std::optional<std::filesystem::path> model;
  double target_removal = 0.0;
};

struct PerspectiveSpec {
  double tau = 0.8;
  std::string endpoint = "https://commentanalyzer.googleapis.com/v1alpha1/comments:analyze";
  std::string api_key_env = "PERSPECTIVE_API_KEY";
  std::optional<std::filesystem::path> replay;
  std::optional<std::filesystem::path> cache;
  bool offline = true;
  std::int64_t min_interval_ms = 1000;
  int max_attempts = 4;
};

struct ResolverSpec {
  std::string base_url;  // empty: offline gazetteer linking only
  std::optional<std::filesystem::path> cache;
  std::int64_t min_interval_ms = 100;
  bool offline = false;  // cache only
};

struct TrainingSpec {
  std::size_t dim = 1000;
  std::size_t epochs = 10;
  double learning_rate = 0.5;
  double l2 = 0.0;
  std::optional<std::filesystem::path> calibration;  // held-out slice for tau_q
};

struct RunConfig {
  std::filesystem::path base_dir;  // directory of the config file
  std::string run_id;
  std::filesystem::path output_dir;

  std::uint64_t sampling_seed = 0;
  std::uint64_t training_seed = 0;

  std::filesystem::path people;
  std::filesystem::path region_map;

  std::vector<std::filesystem::path> corpora;  // globs expanded, sorted
  CorpusFormat format = CorpusFormat::kWarc;
  GateThresholds gate;

  std::size_t samples = 5;
  std::size_t sample_size = 0;
  bool disjoint = true;

  double tau_link = 0.85;
  std::string ner_command;
  ResolverSpec resolver;

  std::vector<std::string> strategies;  // report order
  std::map<std::string, std::filesystem::path> lexicons;
  std::map<std::string, ClassifierSpec> classifiers;
  std::map<std::string, QualitySpec> quality;
  PerspectiveSpec perspective;
  TrainingSpec training;

  std::string toxic_scope = "union";  // or one rule/classifier strategy name
  std::size_t top_k = 5;

  bool Enabled(std::string_view strategy) const;
};

struct ConfigOverrides {
  std::optional<std::uint64_t> seed;  // replaces every seed
  bool offline = false;               // forces adapters offline
};

// INI text: [section] headers, key = value lines, '#' or ';' comment lines.
// Relative paths resolve against `base_dir`. Throws ValidationError on
// unknown keys, missing seeds, out-of-range thresholds or missing paths.
RunConfig ParseConfig(std::string_view text, const std::filesystem::path& base_dir,
                      const ConfigOverrides& overrides = {});
RunConfig LoadConfig(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

// Every setting, with paths written relative to base_dir. Excludes nothing
// that affects outputs.
nlohmann::json CanonicalConfig(const RunConfig& config);
std::string ConfigHash(const RunConfig& config);

// Path relative to the config directory, generic separators.
std::string RelativeName(const RunConfig& config, const std::filesystem::path& p);

// Expands '*' and '?' in the final path component. Sorted, no duplicates.
std::vector<std::filesystem::path> ExpandGlob(const std::filesystem::path& pattern);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_CONFIG_H_
