#include "filter_audit/pipeline.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <memory>
#include <set>

#include "filter_audit/audit.h"
#include "filter_audit/kb.h"
#include "filter_audit/langid.h"
#include "filter_audit/lexicon.h"
#include "filter_audit/model.h"
#include "filter_audit/report.h"
#include "filter_audit/toxicity.h"
#include "filter_audit/util.h"

namespace filter_audit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";

std::string SampleFile(std::size_t i) { return "sample-" + std::to_string(i) + ".jsonl"; }

std::map<std::string, std::string> HashOutputs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string rel = e.path().lexically_relative(dir).generic_string();
    if (rel == kManifest) continue;
    out[rel] = Sha256File(e.path());
  }
  return out;
}

json ReadJsonFile(const fs::path& path) {
  try {
    return json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw FormatError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

std::size_t StrategyIndex(std::string_view name) {
  auto it = std::find(kStrategyNames.begin(), kStrategyNames.end(), name);
  return static_cast<std::size_t>(it - kStrategyNames.begin());
}

const char* PositiveClass(std::string_view name) {
  if (name == "fasttext") return "hate speech";
  if (name == "profanity") return "profane";
  return "high quality";
}

struct Kb {
  std::vector<PersonRecord> records;
  RegionMap map;
  Gazetteer gazetteer;
  PeopleIndex people;
};

Kb LoadKb(const fs::path& dir) {
  Kb kb;
  kb.records = LoadPersonRecords((dir / "people.tsv").string()).records;
  kb.map = RegionMap::Load((dir / "region_map.conf").string());
  kb.gazetteer = Gazetteer::Deserialize(ReadFile(dir / "gazetteer.tsv"));
  kb.people = PeopleIndex(kb.records, kb.map);
  return kb;
}

std::vector<Document> LoadDocuments(const fs::path& path) {
  std::vector<Document> docs;
  for (const auto& row : ReadJsonl(path)) docs.push_back(DocumentFromJson(row));
  return docs;
}

std::size_t SampleCount(const fs::path& ingest_dir) {
  return ReadJsonFile(ingest_dir / "corpora.json").at("samples").size();
}

// Every sampled document once, ordered by doc_id.
std::vector<Document> UnionDocuments(const fs::path& ingest_dir) {
  std::map<std::string, Document> by_id;
  std::size_t n = SampleCount(ingest_dir);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& d : LoadDocuments(ingest_dir / SampleFile(i))) {
      std::string id = d.doc_id;
      by_id.emplace(std::move(id), std::move(d));
    }
  }
  std::vector<Document> out;
  out.reserve(by_id.size());
  for (auto& [id, d] : by_id) out.push_back(std::move(d));
  return out;
}

std::string ManifestDigest(const StageManifest& m) {
  json outputs = json::object();
  for (const auto& [k, v] : m.outputs) outputs[k] = v;
  return Sha256Hex(CanonicalJson(outputs));
}

}  // namespace

const char* StageName(Stage stage) {
  switch (stage) {
    case Stage::kBuildKb: return "build-kb";
    case Stage::kIngest: return "ingest";
    case Stage::kTrain: return "train";
    case Stage::kLink: return "link";
    case Stage::kFilter: return "filter";
    case Stage::kAudit: return "audit";
  }
  return "?";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (Stage s : kStages) {
    if (name == StageName(s)) return s;
  }
  return std::nullopt;
}

json StageManifest::ToJson() const {
  json in = json::object();
  for (const auto& [k, v] : inputs) in[k] = v;
  json out = json::object();
  for (const auto& [k, v] : outputs) out[k] = v;
  return {{"stage", stage},
          {"fingerprint", fingerprint},
          {"params", params},
          {"inputs", in},
          {"outputs", out},
          {"duration_seconds", duration_seconds}};
}

StageManifest StageManifest::FromJson(const json& j) {
  StageManifest m;
  try {
    m.stage = j.at("stage").get<std::string>();
    m.fingerprint = j.at("fingerprint").get<std::string>();
    m.params = j.at("params");
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed stage manifest: ") + e.what());
  }
  return m;
}

// ---- codecs ----

json DocumentToJson(const Document& doc) {
  json sentences = json::array();
  for (const auto& s : doc.sentences) sentences.push_back(s.text);
  return {{"doc_id", doc.doc_id},
          {"url", doc.url ? json(*doc.url) : json()},
          {"lang", doc.lang},
          {"lang_confidence", doc.lang_confidence},
          {"sentences", sentences}};
}

Document DocumentFromJson(const json& j) {
  Document d;
  try {
    d.doc_id = j.at("doc_id").get<std::string>();
    if (!j.at("url").is_null()) d.url = j.at("url").get<std::string>();
    d.lang = j.at("lang").get<std::string>();
    d.lang_confidence = j.at("lang_confidence").get<double>();
    for (const auto& s : j.at("sentences")) {
      Sentence sent;
      sent.index = d.sentences.size();
      sent.text = s.get<std::string>();
      sent.tokens = Tokenize(sent.text);
      d.sentences.push_back(std::move(sent));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed document record: ") + e.what());
  }
  d.gate_status = GateStatus::kKept;
  return d;
}

json MentionToJson(const LinkedMention& m) {
  return {{"doc_id", m.span.doc_id},   {"sentence", m.span.sentence_index},
          {"start", m.span.token_start}, {"end", m.span.token_end},
          {"surface", m.span.surface}, {"entity_id", m.entity_id},
          {"group", GroupKey(m.group)},  {"similarity", m.similarity}};
}

LinkedMention MentionFromJson(const json& j) {
  LinkedMention m;
  try {
    m.span.doc_id = j.at("doc_id").get<std::string>();
    m.span.sentence_index = j.at("sentence").get<std::size_t>();
    m.span.token_start = j.at("start").get<std::size_t>();
    m.span.token_end = j.at("end").get<std::size_t>();
    m.span.surface = j.at("surface").get<std::string>();
    m.entity_id = j.at("entity_id").get<std::string>();
    auto g = GroupFromKey(j.at("group").get<std::string>());
    if (!g) throw FormatError("unknown group in mention record");
    m.group = *g;
    m.similarity = j.at("similarity").get<double>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed mention record: ") + e.what());
  }
  return m;
}

json VerdictToJson(const StrategyVerdict& v) {
  return {{"doc_id", v.unit.doc_id},
          {"sentence", v.unit.sentence_index ? json(*v.unit.sentence_index) : json()},
          {"flagged", v.flagged},
          {"scored", v.scored},
          {"score", v.score ? json(*v.score) : json()},
          {"terms", v.matched_terms}};
}

StrategyVerdict VerdictFromJson(const json& j) {
  StrategyVerdict v;
  try {
    v.unit.doc_id = j.at("doc_id").get<std::string>();
    if (!j.at("sentence").is_null()) v.unit.sentence_index = j.at("sentence").get<std::size_t>();
    v.flagged = j.at("flagged").get<bool>();
    v.scored = j.at("scored").get<bool>();
    if (!j.at("score").is_null()) v.score = j.at("score").get<double>();
    v.matched_terms = j.at("terms").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed verdict record: ") + e.what());
  }
  return v;
}

std::string ToJsonl(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::vector<json> ReadJsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (Trim(line).empty()) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

// ---- pipeline ----

Pipeline::Pipeline(RunConfig config, PipelineOptions options)
    : config_(std::move(config)), options_(options), run_dir_(config_.output_dir / config_.run_id) {
  if (options_.jobs == 0) options_.jobs = 1;
}

fs::path Pipeline::StageDir(Stage stage) const { return run_dir_ / StageName(stage); }

void Pipeline::Log(const std::string& line) const {
  if (options_.log) *options_.log << line << '\n';
}

std::optional<StageManifest> Pipeline::ReadManifest(Stage stage) const {
  fs::path p = StageDir(stage) / kManifest;
  if (!fs::exists(p)) return std::nullopt;
  try {
    return StageManifest::FromJson(ReadJsonFile(p));
  } catch (const FormatError&) {
    return std::nullopt;
  }
}

bool Pipeline::Verify(Stage stage) const {
  auto m = ReadManifest(stage);
  if (!m) return false;
  fs::path dir = StageDir(stage);
  for (const auto& [rel, hash] : m->outputs) {
    fs::path p = dir / rel;
    if (!fs::is_regular_file(p) || Sha256File(p) != hash) return false;
  }
  return true;
}

Pipeline::Plan Pipeline::PlanStage(Stage stage) const {
  Plan plan;
  auto upstream = [&](Stage s) {
    auto m = ReadManifest(s);
    if (!m) {
      throw ValidationError(std::string("stage ") + StageName(s) + " has not completed; run it before " +
                            StageName(stage));
    }
    plan.inputs[std::string("stage:") + StageName(s)] = ManifestDigest(*m);
  };
  auto file = [&](const std::string& label, const fs::path& p) {
    if (!fs::exists(p)) throw ValidationError("input does not exist: " + p.string());
    plan.inputs[label] = Sha256File(p);
  };
  json canonical = CanonicalConfig(config_);

  switch (stage) {
    case Stage::kBuildKb:
      file("people", config_.people);
      file("region_map", config_.region_map);
      plan.params = json::object();
      break;
    case Stage::kIngest:
      for (const auto& p : config_.corpora) file("corpus:" + RelativeName(config_, p), p);
      plan.params = {{"corpus", canonical["corpus"]},
                     {"sampling", canonical["sampling"]},
                     {"seed", config_.sampling_seed}};
      break;
    case Stage::kTrain: {
      json models = json::object();
      for (const auto& [name, spec] : config_.classifiers) {
        file(name + (spec.train ? ":train" : ":model"), spec.train ? *spec.train : *spec.model);
        models[name] = canonical["classifiers"][name];
        models[name].erase("tau");
      }
      for (const auto& [name, spec] : config_.quality) {
        file(name + (spec.train ? ":train" : ":model"), spec.train ? *spec.train : *spec.model);
        models[name] = canonical["quality"][name];
      }
      if (!config_.quality.empty()) file("calibration", *config_.training.calibration);
      plan.params = {{"models", models},
                     {"training", canonical["training"]},
                     {"gate", canonical["corpus"]},
                     {"seed", config_.training_seed}};
      plan.params["gate"].erase("inputs");
      plan.params["gate"].erase("format");
      break;
    }
    case Stage::kLink:
      upstream(Stage::kBuildKb);
      upstream(Stage::kIngest);
      plan.params = canonical["linker"];
      break;
    case Stage::kFilter:
      upstream(Stage::kIngest);
      upstream(Stage::kTrain);
      for (const auto& [name, p] : config_.lexicons) file(name + ":lexicon", p);
      if (config_.Enabled("perspective") && config_.perspective.replay) {
        file("perspective:replay", *config_.perspective.replay);
      }
      plan.params = {{"strategies", canonical["strategies"]},
                     {"classifiers", canonical["classifiers"]},
                     {"perspective", canonical["perspective"]}};
      break;
    case Stage::kAudit:
      for (Stage s : {Stage::kBuildKb, Stage::kIngest, Stage::kTrain, Stage::kLink, Stage::kFilter}) {
        upstream(s);
      }
      plan.params = {{"run_id", config_.run_id},
                     {"config_hash", ConfigHash(config_)},
                     {"audit", canonical["audit"]},
                     {"strategies", canonical["strategies"]}};
      break;
  }
  json fp = {{"stage", StageName(stage)}, {"params", plan.params}, {"inputs", plan.inputs}};
  plan.fingerprint = Sha256Hex(CanonicalJson(fp));
  return plan;
}

void Pipeline::Execute(Stage stage, const fs::path& dir) const {
  switch (stage) {
    case Stage::kBuildKb: return BuildKb(dir);
    case Stage::kIngest: return Ingest(dir);
    case Stage::kTrain: return Train(dir);
    case Stage::kLink: return Link(dir);
    case Stage::kFilter: return Filter(dir);
    case Stage::kAudit: return Audit(dir);
  }
}

StageOutcome Pipeline::RunPlanned(Stage stage, const Plan& plan) {
  const std::string name = StageName(stage);
  auto start = std::chrono::steady_clock::now();
  fs::path partial = run_dir_ / (name + ".partial");
  std::error_code ec;
  fs::remove_all(partial, ec);
  fs::create_directories(partial, ec);
  if (ec) throw IoError("cannot create " + partial.string() + ": " + ec.message());
  Log("[" + name + "] running");
  try {
    Execute(stage, partial);
  } catch (const std::exception& e) {
    fs::path qdir;
    for (int n = 1;; ++n) {
      qdir = run_dir_ / "quarantine" / (name + "-" + std::to_string(n));
      if (!fs::exists(qdir)) break;
    }
    fs::create_directories(qdir.parent_path(), ec);
    fs::rename(partial, qdir, ec);
    if (ec) fs::create_directories(qdir, ec);
    const auto* err = dynamic_cast<const Error*>(&e);
    json record = {{"stage", name},
                   {"kind", err ? ErrorKindName(err->kind()) : "runtime"},
                   {"message", e.what()}};
    try {
      WriteFileAtomic(qdir / "error.json", CanonicalJson(record));
    } catch (const std::exception&) {
    }
    Log("[" + name + "] failed: " + e.what() + " (quarantined in " + qdir.string() + ")");
    throw;
  }
  StageManifest m;
  m.stage = name;
  m.fingerprint = plan.fingerprint;
  m.params = plan.params;
  m.inputs = plan.inputs;
  m.outputs = HashOutputs(partial);
  m.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  WriteFileAtomic(partial / kManifest, CanonicalJson(m.ToJson()));
  fs::path final_dir = StageDir(stage);
  fs::remove_all(final_dir, ec);
  fs::rename(partial, final_dir, ec);
  if (ec) throw IoError("cannot move " + partial.string() + " into place: " + ec.message());
  if (stage == Stage::kAudit) Publish();
  Log("[" + name + "] done in " + FormatDouble17(m.duration_seconds).substr(0, 6) + " s");
  return {stage, false, plan.fingerprint};
}

StageOutcome Pipeline::Run(Stage stage) { return RunPlanned(stage, PlanStage(stage)); }

std::vector<StageOutcome> Pipeline::RunAll() {
  std::vector<StageOutcome> out;
  for (Stage stage : kStages) {
    Plan plan = PlanStage(stage);
    auto m = ReadManifest(stage);
    if (m && m->fingerprint == plan.fingerprint && Verify(stage)) {
      Log(std::string("[") + StageName(stage) + "] up to date");
      if (stage == Stage::kAudit) Publish();
      out.push_back({stage, true, plan.fingerprint});
      continue;
    }
    out.push_back(RunPlanned(stage, plan));
  }
  return out;
}

void Pipeline::Publish() const {
  fs::path src = StageDir(Stage::kAudit);
  auto copy = [&](const fs::path& rel) {
    std::string body = ReadFile(src / rel);
    fs::path dst = run_dir_ / rel;
    if (fs::exists(dst) && ReadFile(dst) == body) return;
    fs::create_directories(dst.parent_path());
    WriteFileAtomic(dst, body);
  };
  copy("report.json");
  copy("report.md");
  for (const auto& e : fs::directory_iterator(src / "tables")) {
    copy(fs::path("tables") / e.path().filename());
  }
}

// ---- stages ----

void Pipeline::BuildKb(const fs::path& dir) const {
  PersonParseResult parsed = LoadPersonRecords(config_.people.string());
  RegionMap map = RegionMap::Load(config_.region_map.string());
  std::set<std::string> ids;
  std::string people;
  for (const auto& r : parsed.records) {
    if (!ids.insert(r.entity_id).second) throw FormatError("duplicate entity id " + r.entity_id);
    people += FormatPersonLine(r);
    people += '\n';
  }
  WriteFileAtomic(dir / "people.tsv", people);
  WriteFileAtomic(dir / "region_map.conf", map.Serialize());
  WriteFileAtomic(dir / "gazetteer.tsv", Gazetteer::Build(parsed.records).Serialize());
  KbStats stats = ComputeKbStats(parsed.records, map);
  json groups = json::object();
  for (std::size_t g = 0; g < 5; ++g) groups[GroupKey(static_cast<DemographicGroup>(g))] = stats.per_group[g];
  json j = {{"records", parsed.records.size()},
            {"skipped_lines", parsed.skipped},
            {"groups", groups},
            {"region_map_hash", map.Hash()},
            {"people_sha256", Sha256File(config_.people)}};
  WriteFileAtomic(dir / "stats.json", CanonicalJson(j));
  Log("[build-kb] " + std::to_string(parsed.records.size()) + " records, " +
      std::to_string(parsed.skipped) + " skipped");
}

void Pipeline::Ingest(const fs::path& dir) const {
  const LanguageIdentifier& langid = LanguageIdentifier::Bundled();
  std::vector<Document> kept;
  std::set<std::string> seen;
  std::map<std::string, std::uint64_t> gate;
  std::uint64_t duplicates = 0;
  json corpora = json::array();
  for (const auto& path : config_.corpora) {
    CorpusReadStats st;
    std::vector<RawDocument> raws = ReadCorpusFile(path.string(), config_.format, &st);
    std::vector<Document> docs(raws.size());
    ParallelFor(raws.size(), options_.jobs,
                [&](std::size_t i) { docs[i] = GateDocument(raws[i], langid, config_.gate); });
    for (auto& d : docs) {
      ++gate[GateStatusName(d.gate_status)];
      if (d.gate_status != GateStatus::kKept) continue;
      if (!seen.insert(d.doc_id).second) {
        ++duplicates;
        continue;
      }
      kept.push_back(std::move(d));
    }
    corpora.push_back({{"name", RelativeName(config_, path)},
                       {"content_sha256", st.content_hash},
                       {"records", st.records},
                       {"documents", st.documents},
                       {"skipped_types", st.skipped_types},
                       {"errors", st.errors}});
  }
  auto samples = DrawSamples(kept.size(), config_.samples, config_.sample_size, config_.sampling_seed,
                             config_.disjoint);
  json sample_info = json::array();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<json> rows;
    for (std::size_t idx : samples[i].indices) rows.push_back(DocumentToJson(kept[idx]));
    WriteFileAtomic(dir / SampleFile(i), ToJsonl(rows));
    sample_info.push_back(
        {{"sample_id", i}, {"documents", samples[i].indices.size()}, {"truncated", samples[i].truncated}});
    if (samples[i].truncated) {
      Log("[ingest] warning: sample " + std::to_string(i) + " has only " +
          std::to_string(samples[i].indices.size()) + " documents");
    }
  }
  json gate_json = json::object();
  for (const auto& [k, v] : gate) gate_json[k] = v;
  json j = {{"corpora", corpora},
            {"gate", gate_json},
            {"kept", kept.size()},
            {"duplicates", duplicates},
            {"samples", sample_info}};
  WriteFileAtomic(dir / "corpora.json", CanonicalJson(j));
  Log("[ingest] " + std::to_string(kept.size()) + " documents passed the gates");
}

void Pipeline::Train(const fs::path& dir) const {
  struct Job {
    std::string name;
    std::optional<fs::path> train;
    std::optional<fs::path> model;
  };
  std::vector<Job> jobs;
  for (const auto& name : config_.strategies) {
    if (auto it = config_.classifiers.find(name); it != config_.classifiers.end()) {
      jobs.push_back({name, it->second.train, it->second.model});
    } else if (auto q = config_.quality.find(name); q != config_.quality.end()) {
      jobs.push_back({name, q->second.train, q->second.model});
    }
  }
  std::vector<HashedLinearModel> models(jobs.size());
  std::vector<std::pair<std::size_t, std::size_t>> sizes(jobs.size());
  ParallelFor(jobs.size(), options_.jobs, [&](std::size_t i) {
    const Job& job = jobs[i];
    if (job.model) {
      models[i] = HashedLinearModel::Load(*job.model);
      return;
    }
    LabeledTexts texts = LoadLabeledTexts(*job.train);
    TrainOptions opt;
    opt.dim = config_.training.dim;
    opt.epochs = config_.training.epochs;
    opt.learning_rate = config_.training.learning_rate;
    opt.l2 = config_.training.l2;
    opt.seed = DeriveSeed(config_.training_seed, StrategyIndex(job.name));
    opt.positive_class = PositiveClass(job.name);
    models[i] = TrainLinear(texts.positive, texts.negative, opt);
    sizes[i] = {texts.positive.size(), texts.negative.size()};
  });

  std::vector<std::string> calibration_texts;
  if (!config_.quality.empty()) {
    CorpusReadStats st;
    auto raws = ReadCorpusFile(config_.training.calibration->string(), CorpusFormat::kJsonl, &st);
    const LanguageIdentifier& langid = LanguageIdentifier::Bundled();
    std::vector<Document> docs(raws.size());
    ParallelFor(raws.size(), options_.jobs,
                [&](std::size_t i) { docs[i] = GateDocument(raws[i], langid, config_.gate); });
    for (const auto& d : docs) {
      if (d.gate_status == GateStatus::kKept) calibration_texts.push_back(d.Text());
    }
    if (calibration_texts.empty()) throw ValidationError("calibration slice has no document passing the gates");
  }

  json report = json::object();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    const auto& meta = models[i].meta();
    json entry = {{"source", job.model ? "model" : "trained"},
                  {"dim", models[i].dim()},
                  {"epochs", meta.epochs},
                  {"learning_rate", meta.learning_rate},
                  {"l2", meta.l2},
                  {"seed", meta.seed},
                  {"positive_class", meta.positive_class},
                  {"loss_curve", meta.loss_curve},
                  {"positive_examples", sizes[i].first},
                  {"negative_examples", sizes[i].second}};
    if (auto q = config_.quality.find(job.name); q != config_.quality.end()) {
      std::vector<double> scores(calibration_texts.size());
      ParallelFor(scores.size(), options_.jobs,
                  [&](std::size_t k) { scores[k] = models[i].PredictProba(calibration_texts[k]); });
      double tau = CalibrateQualityThreshold(scores, q->second.target_removal);
      entry["calibration"] = {{"target_removal", q->second.target_removal},
                              {"tau", tau},
                              {"heldout_removal", RemovalFraction(scores, tau)},
                              {"heldout_documents", scores.size()}};
      Log("[train] " + job.name + " tau_q = " + FormatDouble17(tau));
    }
    models[i].Save(dir / (job.name + ".model"));
    report[job.name] = entry;
  }
  WriteFileAtomic(dir / "training.json", CanonicalJson(report));
}

void Pipeline::Link(const fs::path& dir) const {
  Kb kb = LoadKb(StageDir(Stage::kBuildKb));
  std::unique_ptr<OnlineResolver> resolver;
  if (!config_.resolver.base_url.empty()) {
    OnlineResolver::Options o;
    o.base_url = config_.resolver.base_url;
    o.cache_path = *config_.resolver.cache;
    o.min_interval = std::chrono::milliseconds(config_.resolver.min_interval_ms);
    o.offline = config_.resolver.offline;
    resolver = std::make_unique<OnlineResolver>(o);
  }
  std::optional<NerAdapter> ner;
  if (!config_.ner_command.empty()) ner.emplace(config_.ner_command);
  LinkOptions lo;
  lo.tau = config_.tau_link;
  lo.resolver = resolver.get();

  fs::path ingest = StageDir(Stage::kIngest);
  std::size_t n = SampleCount(ingest);
  json samples = json::array();
  LinkStats total;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<Document> docs = LoadDocuments(ingest / SampleFile(s));
    std::vector<std::vector<LinkedMention>> linked(docs.size());
    std::vector<LinkStats> stats(docs.size());
    ParallelFor(docs.size(), options_.jobs, [&](std::size_t i) {
      if (ner) {
        linked[i] = LinkSpans(ner->Detect(docs[i]), kb.gazetteer, kb.people, lo, &stats[i]);
      } else {
        linked[i] = LinkMentions(docs[i], kb.gazetteer, kb.people, lo, &stats[i]);
      }
    });
    std::vector<json> rows;
    LinkStats sample_stats;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      sample_stats += stats[i];
      for (const auto& m : linked[i]) rows.push_back(MentionToJson(m));
    }
    total += sample_stats;
    WriteFileAtomic(dir / SampleFile(s), ToJsonl(rows));
    samples.push_back({{"sample_id", s},
                       {"documents", docs.size()},
                       {"spans", sample_stats.spans},
                       {"linked", sample_stats.linked},
                       {"unlinked", sample_stats.unlinked},
                       {"online", sample_stats.online}});
  }
  json j = {{"samples", samples},
            {"spans", total.spans},
            {"linked", total.linked},
            {"unlinked", total.unlinked},
            {"online", total.online}};
  WriteFileAtomic(dir / "stats.json", CanonicalJson(j));
  if (resolver) {
    auto rs = resolver->stats();
    Log("[link] resolver: " + std::to_string(rs.requests) + " requests, " + std::to_string(rs.cache_hits) +
        " cache hits, " + std::to_string(rs.failures) + " failures");
  }
  Log("[link] " + std::to_string(total.linked) + " of " + std::to_string(total.spans) + " spans linked");
}

void Pipeline::Filter(const fs::path& dir) const {
  std::vector<Document> docs = UnionDocuments(StageDir(Stage::kIngest));
  fs::path train_dir = StageDir(Stage::kTrain);
  json training = ReadJsonFile(train_dir / "training.json");

  std::unique_ptr<ToxicityClient> client;
  if (config_.Enabled("perspective")) {
    ToxicityClient::Options o;
    o.endpoint = config_.perspective.endpoint;
    o.api_key_env = config_.perspective.api_key_env;
    if (config_.perspective.replay) o.replay_path = *config_.perspective.replay;
    if (config_.perspective.cache) o.cache_path = *config_.perspective.cache;
    o.offline = config_.perspective.offline;
    o.max_attempts = config_.perspective.max_attempts;
    o.min_interval = std::chrono::milliseconds(config_.perspective.min_interval_ms);
    client = std::make_unique<ToxicityClient>(o);
  }

  json coverage = json::object();
  for (const auto& name : config_.strategies) {
    std::unique_ptr<Strategy> strategy;
    if (config_.lexicons.count(name)) {
      strategy = std::make_unique<LexiconStrategy>(name, LexiconMatcher::Load(config_.lexicons.at(name)));
    } else if (name == "perspective") {
      strategy = std::make_unique<ExternalToxicityStrategy>(name, *client, config_.perspective.tau);
    } else if (config_.classifiers.count(name)) {
      strategy = std::make_unique<ClassifierStrategy>(name, HashedLinearModel::Load(train_dir / (name + ".model")),
                                                      config_.classifiers.at(name).tau);
    } else {
      double tau = training.at(name).at("calibration").at("tau").get<double>();
      strategy = std::make_unique<QualityStrategy>(name, HashedLinearModel::Load(train_dir / (name + ".model")),
                                                   tau);
    }
    std::vector<std::vector<StrategyVerdict>> verdicts(docs.size());
    ParallelFor(docs.size(), options_.jobs, [&](std::size_t i) { verdicts[i] = strategy->Evaluate(docs[i]); });
    std::vector<json> rows;
    std::uint64_t units = 0, unscored = 0, flagged = 0;
    for (const auto& vs : verdicts) {
      for (const auto& v : vs) {
        ++units;
        if (!v.scored) ++unscored;
        if (v.scored && v.flagged) ++flagged;
        rows.push_back(VerdictToJson(v));
      }
    }
    WriteFileAtomic(dir / (name + ".jsonl"), ToJsonl(rows));
    coverage[name] = {{"units", units}, {"unscored", unscored}, {"flagged", flagged}};
    Log("[filter] " + name + ": " + std::to_string(flagged) + " of " + std::to_string(units) + " units flagged");
  }
  WriteFileAtomic(dir / "coverage.json", CanonicalJson(coverage));
}

void Pipeline::Audit(const fs::path& dir) const {
  fs::path kb_dir = StageDir(Stage::kBuildKb);
  fs::path ingest_dir = StageDir(Stage::kIngest);
  fs::path link_dir = StageDir(Stage::kLink);
  fs::path filter_dir = StageDir(Stage::kFilter);
  Kb kb = LoadKb(kb_dir);
  json kb_stats = ReadJsonFile(kb_dir / "stats.json");
  json corpora = ReadJsonFile(ingest_dir / "corpora.json");
  json training = ReadJsonFile(StageDir(Stage::kTrain) / "training.json");
  json link_stats = ReadJsonFile(link_dir / "stats.json");
  json filter_cov = ReadJsonFile(filter_dir / "coverage.json");

  AuditReport r;
  auto& md = r.metadata;
  md.run_id = config_.run_id;
  md.config_hash = ConfigHash(config_);
  md.region_map_hash = kb_stats.at("region_map_hash").get<std::string>();
  md.people_hash = kb_stats.at("people_sha256").get<std::string>();
  md.seeds = {{"sampling", config_.sampling_seed}, {"training", config_.training_seed}};
  md.thresholds["tau_link"] = config_.tau_link;
  md.strategies = config_.strategies;
  for (const auto& c : corpora.at("corpora")) {
    md.corpora.push_back({c.at("name").get<std::string>(), c.at("content_sha256").get<std::string>(),
                          c.at("records").get<std::uint64_t>(), c.at("documents").get<std::uint64_t>(),
                          c.at("errors").get<std::uint64_t>()});
    r.coverage.parse_errors += c.at("errors").get<std::uint64_t>();
  }

  std::size_t n_samples = corpora.at("samples").size();
  std::vector<LinkedMention> pooled;
  GroupArray baseline{};
  for (std::size_t s = 0; s < n_samples; ++s) {
    std::vector<LinkedMention> mentions;
    for (const auto& row : ReadJsonl(link_dir / SampleFile(s))) mentions.push_back(MentionFromJson(row));
    SampleCounts sc;
    sc.sample_id = s;
    sc.documents = corpora.at("samples")[s].at("documents").get<std::uint64_t>();
    sc.counts = BaselineCounts(mentions);
    for (std::size_t g = 0; g < 5; ++g) baseline[g] += sc.counts[g];
    r.samples.push_back(sc);
    pooled.insert(pooled.end(), mentions.begin(), mentions.end());
  }

  std::map<std::string, std::vector<StrategyVerdict>> verdicts;
  std::map<std::string, FlaggedSet> flagged;
  for (const auto& name : config_.strategies) {
    auto& vs = verdicts[name];
    for (const auto& row : ReadJsonl(filter_dir / (name + ".jsonl"))) vs.push_back(VerdictFromJson(row));
    flagged[name] = FlaggedUnits(vs);
  }

  for (const auto& name : config_.strategies) {
    StrategyId id = MakeStrategyId(name);
    r.removal.push_back(RemovalPercentages(id, baseline, RemovedMentions(pooled, flagged[name])));
    if (id.category == StrategyCategory::kClassifierBased) {
      md.thresholds[name] = name == "perspective" ? config_.perspective.tau : config_.classifiers.at(name).tau;
    }
  }

  if (n_samples >= 2) {
    auto vec = [&](std::size_t s) {
      std::vector<double> v;
      for (auto g : kReportedGroups) v.push_back(static_cast<double>(At(r.samples[s].counts, g)));
      return v;
    };
    std::vector<std::vector<double>> all;
    for (std::size_t s = 0; s < n_samples; ++s) all.push_back(vec(s));
    r.anova_all = AnovaF(all);
    for (std::size_t a = 0; a < n_samples; ++a) {
      for (std::size_t b = a + 1; b < n_samples; ++b) r.anova_pairwise.push_back({a, b, AnovaF({vec(a), vec(b)})});
    }
  }

  std::vector<std::pair<std::string, FlaggedSet>> classifier_sets;
  FlaggedSet toxic;
  for (const auto& name : config_.strategies) {
    StrategyId id = MakeStrategyId(name);
    if (id.category == StrategyCategory::kClassifierBased) classifier_sets.emplace_back(name, flagged[name]);
    if (id.category == StrategyCategory::kQualityBased) continue;
    if (config_.toxic_scope == "union" || config_.toxic_scope == name) {
      toxic.insert(flagged[name].begin(), flagged[name].end());
    }
    if (id.category == StrategyCategory::kRuleBased) r.top_terms[name] = TopMatchedTerms(verdicts[name], config_.top_k);
  }
  r.overlap = ComputeOverlap(classifier_sets);

  std::map<std::string, std::size_t> sentence_counts;
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (const auto& row : ReadJsonl(ingest_dir / SampleFile(s))) {
      sentence_counts[row.at("doc_id").get<std::string>()] = row.at("sentences").size();
    }
  }
  for (const auto& name : config_.strategies) {
    if (MakeStrategyId(name).category != StrategyCategory::kQualityBased) continue;
    r.retention.push_back(RetentionOfHarm(name, sentence_counts, flagged[name], toxic));
    const json& c = training.at(name).at("calibration");
    r.calibration[name] = {c.at("target_removal").get<double>(), c.at("tau").get<double>(),
                           c.at("heldout_removal").get<double>(), c.at("heldout_documents").get<std::uint64_t>()};
    md.thresholds[name] = r.calibration[name].tau;
  }
  r.occupations = ComputeOccupationShift(pooled, toxic, kb.people, config_.top_k);

  r.coverage.unknown_mentions = At(baseline, DemographicGroup::kUnknown);
  r.coverage.spans = link_stats.at("spans").get<std::uint64_t>();
  r.coverage.linked = link_stats.at("linked").get<std::uint64_t>();
  r.coverage.unlinked = link_stats.at("unlinked").get<std::uint64_t>();
  r.coverage.gate = corpora.at("gate").get<std::map<std::string, std::uint64_t>>();
  for (const auto& name : config_.strategies) {
    r.coverage.unscored[name] = filter_cov.at(name).at("unscored").get<std::uint64_t>();
    r.coverage.evaluated[name] = filter_cov.at(name).at("units").get<std::uint64_t>();
  }
  WriteReport(r, dir);
  Log("[audit] report written for " + std::to_string(pooled.size()) + " linked mentions");
}

}  // namespace filter_audit
