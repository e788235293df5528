#include "filter_audit/config.h"

#include <fnmatch.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <set>
#include <sstream>

#include "filter_audit/report.h"
#include "filter_audit/strategies.h"
#include "filter_audit/util.h"

namespace filter_audit {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using nlohmann::json;

namespace {

const std::map<std::string, std::set<std::string>>& AllowedKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"id", "output"}},
      {"seeds", {"sampling", "training"}},
      {"kb", {"people", "region_map"}},
      {"corpus", {"inputs", "format", "language", "min_sentences", "min_mean_words"}},
      {"sampling", {"samples", "size", "disjoint"}},
      {"linker", {"tau", "ner_command", "resolver_url", "resolver_cache", "resolver_interval_ms"}},
      {"strategies", {"enabled"}},
      {"shutterstock", {"lexicon"}},
      {"hatebase", {"lexicon"}},
      {"fasttext", {"train", "model", "tau"}},
      {"profanity", {"train", "model", "tau"}},
      {"perspective",
       {"tau", "endpoint", "api_key_env", "replay", "cache", "offline", "interval_ms", "max_attempts"}},
      {"quality_wiki", {"train", "model", "target_removal"}},
      {"quality_webtext", {"train", "model", "target_removal"}},
      {"training", {"dim", "epochs", "learning_rate", "l2", "calibration"}},
      {"audit", {"toxic", "top_k"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, fs::path base) : tree_(tree), base_(std::move(base)) {}

  std::optional<std::string> Get(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    std::string t(Trim(*v));
    if (t.empty()) return std::nullopt;
    return t;
  }

  std::string Require(const std::string& section, const std::string& key) const {
    auto v = Get(section, key);
    if (!v) throw ValidationError("config: missing [" + section + "] " + key);
    return *v;
  }

  double Double(const std::string& section, const std::string& key, double def) const {
    auto v = Get(section, key);
    if (!v) return def;
    double out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size()) {
      throw ValidationError("config: [" + section + "] " + key + " is not a number: " + *v);
    }
    return out;
  }

  double Unit(const std::string& section, const std::string& key, double def) const {
    double v = Double(section, key, def);
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError("config: [" + section + "] " + key + " must lie in [0,1]");
    }
    return v;
  }

  std::uint64_t U64(const std::string& section, const std::string& key, std::uint64_t def) const {
    auto v = Get(section, key);
    if (!v) return def;
    return ParseU64(section, key, *v);
  }

  static std::uint64_t ParseU64(const std::string& section, const std::string& key,
                                const std::string& v) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) {
      throw ValidationError("config: [" + section + "] " + key + " is not a non-negative integer: " + v);
    }
    return out;
  }

  bool Bool(const std::string& section, const std::string& key, bool def) const {
    auto v = Get(section, key);
    if (!v) return def;
    std::string s = *v;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    throw ValidationError("config: [" + section + "] " + key + " is not a boolean: " + *v);
  }

  std::optional<fs::path> Path(const std::string& section, const std::string& key) const {
    auto v = Get(section, key);
    if (!v) return std::nullopt;
    return Resolve(*v);
  }

  fs::path Resolve(const std::string& v) const {
    fs::path p(v);
    return (p.is_absolute() ? p : base_ / p).lexically_normal();
  }

 private:
  const pt::ptree& tree_;
  fs::path base_;
};

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  for (const auto& part : SplitString(s, ',')) {
    std::string t(Trim(part));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

void RequireExists(const fs::path& p, const std::string& what) {
  if (!fs::exists(p)) throw ValidationError("config: " + what + " does not exist: " + p.string());
}

void CheckKeys(const pt::ptree& tree) {
  const auto& allowed = AllowedKeys();
  for (const auto& [section, body] : tree) {
    auto it = allowed.find(section);
    if (it == allowed.end()) throw ValidationError("config: unknown section [" + section + "]");
    if (!body.data().empty()) throw ValidationError("config: value outside any section: " + section);
    for (const auto& [key, value] : body) {
      if (it->second.count(key) == 0) {
        throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
      }
      if (!value.empty()) throw ValidationError("config: nested key in [" + section + "]");
    }
  }
}

json OptPath(const RunConfig& c, const std::optional<fs::path>& p) {
  return p ? json(RelativeName(c, *p)) : json();
}

}  // namespace

bool RunConfig::Enabled(std::string_view strategy) const {
  return std::find(strategies.begin(), strategies.end(), strategy) != strategies.end();
}

std::vector<fs::path> ExpandGlob(const fs::path& pattern) {
  std::string name = pattern.filename().string();
  if (name.find_first_of("*?[") == std::string::npos) return {pattern};
  fs::path dir = pattern.parent_path();
  std::vector<fs::path> out;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    if (fnmatch(name.c_str(), it->path().filename().c_str(), 0) == 0) out.push_back(it->path());
  }
  if (ec) throw ValidationError("config: cannot list " + dir.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

RunConfig ParseConfig(std::string_view text, const fs::path& base_dir, const ConfigOverrides& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  CheckKeys(tree);
  Reader r(tree, base_dir);
  RunConfig c;
  c.base_dir = base_dir;

  if (overrides.seed) {
    c.sampling_seed = c.training_seed = *overrides.seed;
  } else {
    c.sampling_seed = Reader::ParseU64("seeds", "sampling", r.Require("seeds", "sampling"));
    c.training_seed = Reader::ParseU64("seeds", "training", r.Require("seeds", "training"));
  }

  c.people = r.Resolve(r.Require("kb", "people"));
  RequireExists(c.people, "[kb] people");
  c.region_map = r.Resolve(r.Require("kb", "region_map"));
  RequireExists(c.region_map, "[kb] region_map");

  std::set<fs::path> corpora;
  for (const auto& item : SplitList(r.Require("corpus", "inputs"))) {
    auto matches = ExpandGlob(r.Resolve(item));
    if (matches.empty()) throw ValidationError("config: corpus input matches nothing: " + item);
    for (const auto& m : matches) {
      RequireExists(m, "corpus input");
      corpora.insert(m);
    }
  }
  c.corpora.assign(corpora.begin(), corpora.end());
  std::string format = r.Get("corpus", "format").value_or("warc");
  if (format == "warc") {
    c.format = CorpusFormat::kWarc;
  } else if (format == "jsonl") {
    c.format = CorpusFormat::kJsonl;
  } else {
    throw ValidationError("config: [corpus] format must be warc or jsonl");
  }
  c.gate.language = r.Get("corpus", "language").value_or("en");
  c.gate.min_sentences = r.U64("corpus", "min_sentences", 5);
  c.gate.min_mean_words = r.Double("corpus", "min_mean_words", 5.0);

  c.samples = r.U64("sampling", "samples", 5);
  c.sample_size = Reader::ParseU64("sampling", "size", r.Require("sampling", "size"));
  if (c.samples == 0 || c.sample_size == 0) {
    throw ValidationError("config: [sampling] samples and size must be positive");
  }
  c.disjoint = r.Bool("sampling", "disjoint", true);

  c.tau_link = r.Unit("linker", "tau", 0.85);
  c.ner_command = r.Get("linker", "ner_command").value_or("");
  c.resolver.base_url = r.Get("linker", "resolver_url").value_or("");
  c.resolver.cache = r.Path("linker", "resolver_cache");
  c.resolver.min_interval_ms = static_cast<std::int64_t>(r.U64("linker", "resolver_interval_ms", 100));
  c.resolver.offline = overrides.offline;
  if (!c.resolver.base_url.empty() && !c.resolver.cache) {
    throw ValidationError("config: [linker] resolver_url needs resolver_cache");
  }

  auto enabled = r.Get("strategies", "enabled");
  std::vector<std::string> names =
      enabled ? SplitList(*enabled) : std::vector<std::string>(kStrategyNames.begin(), kStrategyNames.end());
  std::set<std::string> seen;
  for (const auto& n : names) {
    MakeStrategyId(n);
    if (!seen.insert(n).second) throw ValidationError("config: strategy listed twice: " + n);
  }
  // Report order is fixed regardless of how the list is written.
  for (auto n : kStrategyNames) {
    if (seen.count(std::string(n))) c.strategies.emplace_back(n);
  }
  if (c.strategies.empty()) throw ValidationError("config: no strategies enabled");

  for (const char* lex : {"shutterstock", "hatebase"}) {
    if (!c.Enabled(lex)) continue;
    fs::path p = r.Resolve(r.Require(lex, "lexicon"));
    RequireExists(p, std::string("[") + lex + "] lexicon");
    c.lexicons[lex] = p;
  }
  for (const auto& [name, def_tau] : {std::pair{"fasttext", 0.5}, std::pair{"profanity", 0.8}}) {
    if (!c.Enabled(name)) continue;
    ClassifierSpec spec;
    spec.train = r.Path(name, "train");
    spec.model = r.Path(name, "model");
    spec.tau = r.Unit(name, "tau", def_tau);
    if (spec.train.has_value() == spec.model.has_value()) {
      throw ValidationError(std::string("config: [") + name + "] needs exactly one of train, model");
    }
    RequireExists(spec.train ? *spec.train : *spec.model, std::string("[") + name + "] input");
    c.classifiers[name] = spec;
  }
  for (const auto& [name, def_target] : {std::pair{"quality_wiki", 0.15}, std::pair{"quality_webtext", 0.45}}) {
    if (!c.Enabled(name)) continue;
    QualitySpec spec;
    spec.train = r.Path(name, "train");
    spec.model = r.Path(name, "model");
    spec.target_removal = r.Unit(name, "target_removal", def_target);
    if (spec.train.has_value() == spec.model.has_value()) {
      throw ValidationError(std::string("config: [") + name + "] needs exactly one of train, model");
    }
    RequireExists(spec.train ? *spec.train : *spec.model, std::string("[") + name + "] input");
    c.quality[name] = spec;
  }

  c.perspective.tau = r.Unit("perspective", "tau", 0.8);
  if (auto v = r.Get("perspective", "endpoint")) c.perspective.endpoint = *v;
  if (auto v = r.Get("perspective", "api_key_env")) c.perspective.api_key_env = *v;
  c.perspective.replay = r.Path("perspective", "replay");
  c.perspective.cache = r.Path("perspective", "cache");
  c.perspective.offline = r.Bool("perspective", "offline", true) || overrides.offline;
  c.perspective.min_interval_ms = static_cast<std::int64_t>(r.U64("perspective", "interval_ms", 1000));
  c.perspective.max_attempts = static_cast<int>(r.U64("perspective", "max_attempts", 4));
  if (c.Enabled("perspective")) {
    if (c.perspective.replay) RequireExists(*c.perspective.replay, "[perspective] replay");
    if (c.perspective.offline && !c.perspective.replay && !c.perspective.cache) {
      throw ValidationError("config: offline [perspective] needs replay or cache");
    }
  }

  c.training.dim = r.U64("training", "dim", 1000);
  if (c.training.dim == 0) throw ValidationError("config: [training] dim must be positive");
  c.training.epochs = r.U64("training", "epochs", 10);
  c.training.learning_rate = r.Double("training", "learning_rate", 0.5);
  c.training.l2 = r.Double("training", "l2", 0.0);
  if (!(c.training.learning_rate > 0) || !(c.training.l2 >= 0)) {
    throw ValidationError("config: [training] learning_rate must be positive and l2 non-negative");
  }
  c.training.calibration = r.Path("training", "calibration");
  if (!c.quality.empty()) {
    if (!c.training.calibration) throw ValidationError("config: quality strategies need [training] calibration");
    RequireExists(*c.training.calibration, "[training] calibration");
  }

  c.toxic_scope = r.Get("audit", "toxic").value_or("union");
  if (c.toxic_scope != "union") {
    StrategyId id = MakeStrategyId(c.toxic_scope);
    if (id.category == StrategyCategory::kQualityBased || !c.Enabled(c.toxic_scope)) {
      throw ValidationError("config: [audit] toxic must be union or an enabled rule/classifier strategy");
    }
  }
  c.top_k = r.U64("audit", "top_k", 5);

  c.output_dir = r.Resolve(r.Get("run", "output").value_or("out"));
  c.run_id = r.Get("run", "id").value_or("");
  if (c.run_id.empty()) c.run_id = ConfigHash(c).substr(0, 12);
  if (c.run_id.find_first_of("/\\") != std::string::npos || c.run_id == "." || c.run_id == "..") {
    throw ValidationError("config: [run] id must be a plain name");
  }
  return c;
}

RunConfig LoadConfig(const fs::path& path, const ConfigOverrides& overrides) {
  if (!fs::exists(path)) throw ValidationError("config file does not exist: " + path.string());
  fs::path base = fs::absolute(path).parent_path().lexically_normal();
  return ParseConfig(ReadFile(path), base, overrides);
}

std::string RelativeName(const RunConfig& config, const fs::path& p) {
  fs::path rel = p.lexically_relative(config.base_dir);
  if (rel.empty()) rel = p;
  return rel.generic_string();
}

json CanonicalConfig(const RunConfig& c) {
  json corpora = json::array();
  for (const auto& p : c.corpora) corpora.push_back(RelativeName(c, p));
  json lexicons = json::object();
  for (const auto& [k, v] : c.lexicons) lexicons[k] = RelativeName(c, v);
  json classifiers = json::object();
  for (const auto& [k, v] : c.classifiers) {
    classifiers[k] = {{"train", OptPath(c, v.train)}, {"model", OptPath(c, v.model)}, {"tau", v.tau}};
  }
  json quality = json::object();
  for (const auto& [k, v] : c.quality) {
    quality[k] = {{"train", OptPath(c, v.train)},
                  {"model", OptPath(c, v.model)},
                  {"target_removal", v.target_removal}};
  }
  return {
      {"seeds", {{"sampling", c.sampling_seed}, {"training", c.training_seed}}},
      {"kb", {{"people", RelativeName(c, c.people)}, {"region_map", RelativeName(c, c.region_map)}}},
      {"corpus",
       {{"inputs", corpora},
        {"format", c.format == CorpusFormat::kWarc ? "warc" : "jsonl"},
        {"language", c.gate.language},
        {"min_sentences", c.gate.min_sentences},
        {"min_mean_words", c.gate.min_mean_words}}},
      {"sampling", {{"samples", c.samples}, {"size", c.sample_size}, {"disjoint", c.disjoint}}},
      {"linker",
       {{"tau", c.tau_link},
        {"ner_command", c.ner_command},
        {"resolver_url", c.resolver.base_url},
        {"resolver_cache", OptPath(c, c.resolver.cache)},
        {"resolver_offline", c.resolver.offline}}},
      {"strategies", c.strategies},
      {"lexicons", lexicons},
      {"classifiers", classifiers},
      {"quality", quality},
      {"perspective",
       {{"tau", c.perspective.tau},
        {"endpoint", c.perspective.endpoint},
        {"api_key_env", c.perspective.api_key_env},
        {"replay", OptPath(c, c.perspective.replay)},
        {"cache", OptPath(c, c.perspective.cache)},
        {"offline", c.perspective.offline}}},
      {"training",
       {{"dim", c.training.dim},
        {"epochs", c.training.epochs},
        {"learning_rate", c.training.learning_rate},
        {"l2", c.training.l2},
        {"calibration", OptPath(c, c.training.calibration)}}},
      {"audit", {{"toxic", c.toxic_scope}, {"top_k", c.top_k}}},
  };
}

std::string ConfigHash(const RunConfig& config) { return Sha256Hex(CanonicalJson(CanonicalConfig(config))); }

}  // namespace filter_audit
