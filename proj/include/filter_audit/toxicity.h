#ifndef FILTER_AUDIT_TOXICITY_H_
#define FILTER_AUDIT_TOXICITY_H_

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace filter_audit {

// Request body for one comment, in the commentAnalyzer wire format.
std::string BuildToxicityRequest(std::string_view text);

// attributeScores.TOXICITY.summaryScore.value, if present and within [0,1].
std::optional<double> ParseToxicityResponse(std::string_view body);

// Scores text through a Perspective-compatible endpoint. Lookups go to the
// recorded replay file first, then to the on-disk cache, then to the network
// unless offline. Replay and cache are keyed by SHA-256 of the text.
class ToxicityClient {
 public:
  struct Options {
    std::string endpoint;        // full URL of comments:analyze
    std::string api_key_env;     // name of the environment variable holding the key
    std::filesystem::path replay_path;
    std::filesystem::path cache_path;
    bool offline = true;
    int max_attempts = 4;
    std::chrono::milliseconds backoff{250};
    std::chrono::milliseconds min_interval{1000};
    std::chrono::seconds timeout{20};
  };
  struct Stats {
    std::size_t requests = 0;
    std::size_t replay_hits = 0;
    std::size_t cache_hits = 0;
    std::size_t unscored = 0;
  };

  explicit ToxicityClient(Options options);

  // nullopt marks the unit Unscored.
  std::optional<double> Score(std::string_view text);
  Stats stats() const;

 private:
  std::optional<double> Request(std::string_view text);
  void Persist();

  Options options_;
  std::map<std::string, double> replay_;
  mutable std::mutex mu_;
  std::map<std::string, double> cache_;
  std::chrono::steady_clock::time_point last_request_{};
  Stats stats_;
};

// One line of a replay recording.
std::string ReplayLine(std::string_view text, double score);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_TOXICITY_H_
