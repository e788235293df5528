#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "doctest.h"
#include "filter_audit/config.h"
#include "filter_audit/pipeline.h"
#include "filter_audit/synth.h"
#include "filter_audit/text.h"
#include "filter_audit/util.h"
#include "filter_audit/warc.h"

using namespace filter_audit;
namespace fs = std::filesystem;

namespace {

SynthOptions SmallFixture() {
  SynthOptions o;
  o.seed = 11;
  o.people = 60;
  o.documents = 200;
  o.noise_documents = 12;
  o.corpus_files = 2;
  o.classifier_examples = 300;
  o.quality_examples = 150;
  o.calibration_documents = 200;
  o.samples = 3;
  o.sample_size = 50;
  o.lexicon_dir = fs::path(DATA_DIR) / "lexicons";
  return o;
}

fs::path FreshFixture(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("fa_pipeline_" + name);
  fs::remove_all(dir);
  GenerateSynthetic(dir, SmallFixture());
  return dir;
}

RunConfig Config(const fs::path& dir, ConfigOverrides o = {}) {
  return LoadConfig(dir / "harness.conf", o);
}

std::map<Stage, std::string> Fingerprints(const Pipeline& p) {
  std::map<Stage, std::string> out;
  for (Stage s : kStages) {
    auto m = p.ReadManifest(s);
    if (m) out[s] = m->fingerprint;
  }
  return out;
}

}  // namespace

TEST_CASE("missing kb path is a validation error before any work") {
  fs::path dir = FreshFixture("missing_kb");
  std::string text = ReadFile(dir / "harness.conf");
  auto pos = text.find("people = people.tsv");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 19, "people = nowhere.tsv");
  CHECK_THROWS_AS(ParseConfig(text, dir), ValidationError);
  CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("config validation rejects bad values") {
  fs::path dir = FreshFixture("bad_config");
  std::string text = ReadFile(dir / "harness.conf");
  auto with = [&](const std::string& from, const std::string& to) {
    std::string t = text;
    auto pos = t.find(from);
    REQUIRE(pos != std::string::npos);
    t.replace(pos, from.size(), to);
    return t;
  };
  CHECK_NOTHROW(ParseConfig(text, dir));
  CHECK_THROWS_AS(ParseConfig(with("tau = 0.5", "tau = 1.5"), dir), ValidationError);
  CHECK_THROWS_AS(ParseConfig(with("[audit]", "[audit]\ncolour = blue"), dir), ValidationError);
  CHECK_THROWS_AS(ParseConfig(with("[seeds]", "[seedz]"), dir), ValidationError);

  // Seeds are mandatory unless overridden on the command line.
  std::string no_seeds = text;
  auto a = no_seeds.find("[seeds]");
  auto b = no_seeds.find("[kb]");
  no_seeds.erase(a, b - a);
  CHECK_THROWS_AS(ParseConfig(no_seeds, dir), ValidationError);
  ConfigOverrides o;
  o.seed = 5;
  RunConfig c = ParseConfig(no_seeds, dir, o);
  CHECK(c.sampling_seed == 5);
  CHECK(c.training_seed == 5);
}

TEST_CASE("all is idempotent and resumable") {
  fs::path dir = FreshFixture("idempotent");
  Pipeline p(Config(dir), PipelineOptions{2, nullptr});
  auto first = p.RunAll();
  REQUIRE(first.size() == kStages.size());
  for (const auto& o : first) CHECK_FALSE(o.skipped);
  std::string report = ReadFile(p.run_dir() / "report.json");

  auto second = p.RunAll();
  for (const auto& o : second) CHECK(o.skipped);
  CHECK(ReadFile(p.run_dir() / "report.json") == report);
  CHECK(fs::exists(p.run_dir() / "report.md"));
  CHECK(fs::exists(p.run_dir() / "tables" / "removal.csv"));

  SUBCASE("corrupted shard reruns only the stages whose manifests no longer verify") {
    auto before = Fingerprints(p);
    fs::path shard = p.StageDir(Stage::kIngest) / "sample-0.jsonl";
    REQUIRE(fs::exists(shard));
    std::ofstream(shard, std::ios::app) << "{}\n";

    // Oracle: a stage reruns when its manifest fails verification or when an
    // upstream output digest differs from the one it recorded.
    std::map<Stage, bool> expect_rerun;
    for (Stage s : kStages) expect_rerun[s] = !p.Verify(s);
    CHECK(expect_rerun[Stage::kIngest]);

    auto third = p.RunAll();
    for (const auto& o : third) {
      CAPTURE(StageName(o.stage));
      CHECK(o.skipped == !expect_rerun[o.stage]);
      CHECK(o.fingerprint == before[o.stage]);
    }
    CHECK(ReadFile(p.run_dir() / "report.json") == report);
  }

  SUBCASE("changed corpus reruns ingest and everything after it") {
    auto before = Fingerprints(p);
    fs::path corpus = dir / "corpus" / "part-0000.warc.gz";
    std::string bytes = ReadFile(corpus);
    WarcRecord extra;
    extra.headers = {{"WARC-Type", "conversion"}, {"WARC-Record-ID", "<urn:uuid:extra>"}, {"Content-Type", "text/plain"}};
    extra.payload = "A short extra page.";
    bytes += GzipMember(FormatWarcRecord(extra));
    WriteFileAtomic(corpus, bytes);
    auto third = p.RunAll();
    std::map<Stage, bool> skipped;
    for (const auto& o : third) skipped[o.stage] = o.skipped;
    CHECK(skipped[Stage::kBuildKb]);
    CHECK(skipped[Stage::kTrain]);
    CHECK_FALSE(skipped[Stage::kIngest]);
    CHECK(Fingerprints(p)[Stage::kIngest] != before[Stage::kIngest]);
  }
}

TEST_CASE("failed stage is quarantined with a machine-readable error") {
  fs::path dir = FreshFixture("quarantine");
  RunConfig config = Config(dir);
  WriteFileAtomic(dir / "calibration.jsonl", "{not json\n");
  Pipeline p(config, PipelineOptions{1, nullptr});
  CHECK_THROWS_AS(p.RunAll(), ValidationError);
  CHECK(p.Verify(Stage::kBuildKb));
  CHECK(p.Verify(Stage::kIngest));
  CHECK_FALSE(fs::exists(p.StageDir(Stage::kTrain)));
  CHECK_FALSE(fs::exists(p.run_dir() / "train.partial"));
  fs::path err = p.run_dir() / "quarantine" / "train-1" / "error.json";
  REQUIRE(fs::exists(err));
  auto j = nlohmann::json::parse(ReadFile(err));
  CHECK(j["stage"] == "train");
  CHECK(j["kind"] == "validation");
  CHECK_FALSE(fs::exists(p.run_dir() / "report.json"));
}

TEST_CASE("worker count does not change the report") {
  fs::path dir = FreshFixture("jobs");
  RunConfig a = Config(dir);
  a.output_dir = dir / "out1";
  RunConfig b = Config(dir);
  b.output_dir = dir / "out8";
  Pipeline p1(a, PipelineOptions{1, nullptr});
  Pipeline p8(b, PipelineOptions{8, nullptr});
  p1.RunAll();
  p8.RunAll();
  CHECK(ReadFile(p1.run_dir() / "report.json") == ReadFile(p8.run_dir() / "report.json"));
  for (Stage s : kStages) CHECK(p1.ReadManifest(s)->outputs == p8.ReadManifest(s)->outputs);
}

TEST_CASE("artifact codecs round-trip") {
  Document d;
  d.doc_id = "<urn:uuid:1>";
  d.url = "http://example.org/";
  d.sentences = SplitSentences("Ada Lovelace wrote notes. She was first.");
  Document back = DocumentFromJson(DocumentToJson(d));
  CHECK(back.doc_id == d.doc_id);
  CHECK(back.url == d.url);
  REQUIRE(back.sentences.size() == d.sentences.size());
  for (std::size_t i = 0; i < d.sentences.size(); ++i) {
    CHECK(back.sentences[i].text == d.sentences[i].text);
    CHECK(back.sentences[i].tokens.size() == d.sentences[i].tokens.size());
  }
  auto rows = std::vector<nlohmann::json>{DocumentToJson(d), DocumentToJson(back)};
  fs::path tmp = fs::temp_directory_path() / "fa_codec.jsonl";
  WriteFileAtomic(tmp, ToJsonl(rows));
  CHECK(ReadJsonl(tmp) == rows);
}
