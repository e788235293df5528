#include "filter_audit/toxicity.h"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <cstdlib>
#include <fstream>
#include <thread>

#include "filter_audit/util.h"
#include "httplib.h"
#include "json.hpp"

namespace filter_audit {

using nlohmann::json;

namespace {

json ResponseFor(double score) {
  return {{"attributeScores",
           {{"TOXICITY",
             {{"summaryScore", {{"value", score}, {"type", "PROBABILITY"}}}}}}},
          {"languages", {"en"}}};
}

// Reads "text_sha256" + "response" lines into `out`.
void LoadScores(const std::filesystem::path& path, std::map<std::string, double>& out) {
  if (path.empty() || !std::filesystem::exists(path)) return;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("text_sha256") ||
        !j["text_sha256"].is_string() || !j.contains("response")) {
      continue;
    }
    if (auto s = ParseToxicityResponse(j["response"].dump())) {
      out[j["text_sha256"].get<std::string>()] = *s;
    }
  }
}

}  // namespace

std::string BuildToxicityRequest(std::string_view text) {
  json body = {{"comment", {{"text", std::string(text)}}},
               {"languages", {"en"}},
               {"requestedAttributes", {{"TOXICITY", json::object()}}}};
  return body.dump();
}

std::optional<double> ParseToxicityResponse(std::string_view body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  const json* v = &j;
  for (const char* key : {"attributeScores", "TOXICITY", "summaryScore", "value"}) {
    if (!v->is_object() || !v->contains(key)) return std::nullopt;
    v = &(*v)[key];
  }
  if (!v->is_number()) return std::nullopt;
  double s = v->get<double>();
  if (!(s >= 0.0 && s <= 1.0)) return std::nullopt;
  return s;
}

std::string ReplayLine(std::string_view text, double score) {
  json j = {{"text_sha256", Sha256Hex(text)}, {"response", ResponseFor(score)}};
  return j.dump();
}

ToxicityClient::ToxicityClient(Options options) : options_(std::move(options)) {
  LoadScores(options_.replay_path, replay_);
  LoadScores(options_.cache_path, cache_);
}

ToxicityClient::Stats ToxicityClient::stats() const {
  std::lock_guard lock(mu_);
  return stats_;
}

std::optional<double> ToxicityClient::Score(std::string_view text) {
  std::string key = Sha256Hex(text);
  std::lock_guard lock(mu_);
  if (auto it = replay_.find(key); it != replay_.end()) {
    ++stats_.replay_hits;
    return it->second;
  }
  if (auto it = cache_.find(key); it != cache_.end()) {
    ++stats_.cache_hits;
    return it->second;
  }
  std::optional<double> s;
  if (!options_.offline && !options_.endpoint.empty()) s = Request(text);
  if (!s) {
    ++stats_.unscored;
    return std::nullopt;
  }
  cache_[key] = *s;
  Persist();
  return s;
}

std::optional<double> ToxicityClient::Request(std::string_view text) {
  const std::string& url = options_.endpoint;
  std::size_t scheme_end = url.find("://");
  std::size_t path_begin = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string host = url.substr(0, path_begin);
  std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);
  if (!options_.api_key_env.empty()) {
    const char* key = std::getenv(options_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') return std::nullopt;
    path += (path.find('?') == std::string::npos ? "?key=" : "&key=") +
            httplib::detail::encode_query_param(key);
  }
  std::string body = BuildToxicityRequest(text);

  auto backoff = options_.backoff;
  for (int attempt = 0; attempt < std::max(1, options_.max_attempts); ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    auto due = last_request_ + options_.min_interval;
    auto now = std::chrono::steady_clock::now();
    if (now < due) std::this_thread::sleep_for(due - now);
    last_request_ = std::chrono::steady_clock::now();
    ++stats_.requests;

    httplib::Client client(host);
    client.set_connection_timeout(options_.timeout);
    client.set_read_timeout(options_.timeout);
    auto res = client.Post(path, body, "application/json");
    if (!res) continue;
    if (res->status == 429 || res->status >= 500) continue;
    if (res->status != 200) return std::nullopt;
    return ParseToxicityResponse(res->body);
  }
  return std::nullopt;
}

void ToxicityClient::Persist() {
  if (options_.cache_path.empty()) return;
  std::string out;
  for (const auto& [key, score] : cache_) {
    json j = {{"text_sha256", key}, {"response", ResponseFor(score)}};
    out += j.dump() + "\n";
  }
  WriteFileAtomic(options_.cache_path, out);
}

}  // namespace filter_audit
