#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "filter_audit/report.h"
#include "filter_audit/util.h"

using namespace filter_audit;
using nlohmann::json;

namespace {

AuditReport SampleReport() {
  AuditReport r;
  r.metadata.run_id = "run-1";
  r.metadata.config_hash = std::string(64, 'a');
  r.metadata.region_map_hash = std::string(64, 'b');
  r.metadata.people_hash = std::string(64, 'c');
  r.metadata.seeds = {{"sampling", 7}, {"training", 11}};
  r.metadata.thresholds = {{"fasttext", 0.5}, {"perspective", 0.8}, {"quality_wiki", 0.123456789012345}};
  r.metadata.strategies = {"shutterstock", "fasttext"};
  r.metadata.corpora = {{"corpus/a.warc.gz", std::string(64, 'd'), 10, 9, 1}};

  r.samples = {{0, 100, {50, 20, 25, 5, 3}}, {1, 100, {48, 22, 27, 3, 1}}};

  GroupArray base{98, 42, 52, 8, 4};
  r.removal.push_back(RemovalPercentages(MakeStrategyId("shutterstock"), base, {4, 1, 8, 0, 0}));
  r.removal.push_back(RemovalPercentages(MakeStrategyId("fasttext"), base, {1, 0, 3, 0, 0}));

  r.anova_all = AnovaResult{0.25, 0.8, 1, 6};
  r.anova_pairwise = {{0, 1, {0.25, 0.8, 1, 6}}};

  FlaggedSet a{{"d1", 0}, {"d2", 1}};
  FlaggedSet b{{"d1", 0}};
  FlaggedSet c;
  r.overlap = ComputeOverlap({{"fasttext", a}, {"perspective", b}, {"profanity", c}});

  r.retention.push_back({"quality_wiki", 100, 85, 10, 9, 0.85, 0.9});
  r.retention.push_back({"quality_webtext", 100, 55, 0, 0, 0.55, std::nullopt});

  r.top_terms["hatebase"] = {{"slave", 4}, {"married to", 2}};
  r.occupations.baseline[2] = {{"actor", 5}, {"singer, songwriter", 3}};
  r.occupations.flagged[2] = {{"actor", 2}};
  r.calibration["quality_wiki"] = {0.15, 0.123456789012345, 0.1475, 400};

  r.coverage.spans = 300;
  r.coverage.linked = 250;
  r.coverage.unlinked = 50;
  r.coverage.unknown_mentions = 7;
  r.coverage.gate = {{"kept", 90}, {"non_english", 10}};
  r.coverage.unscored = {{"perspective", 2}};
  r.coverage.evaluated = {{"perspective", 1000}};
  return r;
}

std::vector<std::string> Lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("canonical json sorts keys and prints full-precision floats") {
  json j = {{"b", 0.1}, {"a", {{"z", 1}, {"y", nullptr}}}, {"c", std::numeric_limits<double>::infinity()},
            {"d", 2.0}};
  std::string s = CanonicalJson(j);
  CHECK(s ==
        "{\n"
        "  \"a\": {\n"
        "    \"y\": null,\n"
        "    \"z\": 1\n"
        "  },\n"
        "  \"b\": 0.10000000000000001,\n"
        "  \"c\": null,\n"
        "  \"d\": 2.0\n"
        "}\n");
  CHECK(json::parse(s)["b"].get<double>() == 0.1);
  CHECK(json::parse(s)["d"].is_number_float());
}

TEST_CASE("empty report renders headers only") {
  AuditReport r;
  std::string j = RenderJson(r);
  CHECK(ReportFromJson(json::parse(j)) == r);
  auto csv = RenderCsvBundle(r);
  for (const char* name : {"removal.csv", "samples.csv", "anova.csv", "overlap.csv", "retention.csv",
                           "top_terms.csv", "occupations.csv"}) {
    INFO(name);
    REQUIRE(csv.count(name) == 1);
    CHECK(Lines(csv[name]).size() == 1);
  }
  CHECK(csv["removal.csv"] == "category,strategy,w.m.,p-c.m,w.w.,p-c. w.\n");
  CHECK_FALSE(RenderMarkdown(r).empty());
}

TEST_CASE("report json round-trips to an equal report") {
  AuditReport r = SampleReport();
  std::string first = RenderJson(r);
  AuditReport back = ReportFromJson(json::parse(first));
  CHECK(back == r);
  CHECK(RenderJson(back) == first);
}

TEST_CASE("infinite F survives the round trip") {
  AuditReport r;
  r.anova_all = AnovaResult{std::numeric_limits<double>::infinity(), 0.0, 1, 2};
  json j = json::parse(RenderJson(r));
  CHECK(j["anova"]["all_samples"]["f"].is_null());
  CHECK(ReportFromJson(j) == r);
}

TEST_CASE("rendering is byte-identical across calls") {
  AuditReport r = SampleReport();
  CHECK(RenderJson(r) == RenderJson(r));
  CHECK(RenderCsvBundle(r) == RenderCsvBundle(r));
  CHECK(RenderMarkdown(r) == RenderMarkdown(r));
}

TEST_CASE("removal table formats by category") {
  auto csv = RenderCsvBundle(SampleReport());
  auto lines = Lines(csv["removal.csv"]);
  REQUIRE(lines.size() == 4);
  CHECK(lines[1] == ",unfiltered,49.0,21.0,26.0,4.0");
  // 4/98 = 4.0816..%, 1/42 = 2.38..%, 8/52 = 15.38..%
  CHECK(lines[2] == "rule-based,shutterstock,-4.1%,-2.4%,-15.4%,-0.0%");
  CHECK(lines[3] == "classifier-based,fasttext,-1.02%,-0.00%,-5.77%,-0.00%");
}

TEST_CASE("csv quotes fields with commas and quotes") {
  auto csv = RenderCsvBundle(SampleReport());
  CHECK(csv["occupations.csv"].find("\"singer, songwriter\"") != std::string::npos);
  CHECK(csv["top_terms.csv"].find("hatebase,2,married to,2") != std::string::npos);
}

TEST_CASE("retention and overlap tables") {
  auto csv = RenderCsvBundle(SampleReport());
  auto ret = Lines(csv["retention.csv"]);
  REQUIRE(ret.size() == 3);
  CHECK(ret[1] == "quality_wiki,85.0%,90.0%");
  CHECK(ret[2] == "quality_webtext,55.0%,N/A");
  auto ov = Lines(csv["overlap.csv"]);
  CHECK(ov.size() == 1 + 6 + 1);
  CHECK(std::find(ov.begin(), ov.end(), "perspective,fasttext,1,1,100.0%") != ov.end());
  CHECK(std::find(ov.begin(), ov.end(), "fasttext,perspective,2,1,50.0%") != ov.end());
  CHECK(std::find(ov.begin(), ov.end(), "profanity,fasttext,0,0,N/A") != ov.end());
}

TEST_CASE("markdown contains every section") {
  std::string md = RenderMarkdown(SampleReport());
  for (const char* h : {"## Removed mentions by group", "## Sample variation", "## Top matched lexicon terms",
                        "## Classifier overlap", "## Harm kept by quality filters", "## Occupations",
                        "## Coverage"}) {
    CHECK(md.find(h) != std::string::npos);
  }
  CHECK(md.find("**-15.4%**") != std::string::npos);
}

TEST_CASE("write report creates the bundle") {
  auto dir = std::filesystem::temp_directory_path() / ("fa_report_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  AuditReport r = SampleReport();
  WriteReport(r, dir);
  CHECK(ReadFile(dir / "report.json") == RenderJson(r));
  CHECK(std::filesystem::exists(dir / "tables" / "removal.csv"));
  CHECK(std::filesystem::exists(dir / "report.md"));
  std::filesystem::remove_all(dir);

  std::filesystem::path blocker = std::filesystem::temp_directory_path() /
                                  ("fa_report_file_" + std::to_string(::getpid()));
  std::ofstream(blocker) << "x";
  CHECK_THROWS_AS(WriteReport(r, blocker / "sub"), IoError);
  std::filesystem::remove(blocker);
}

TEST_CASE("malformed report json raises a format error") {
  CHECK_THROWS_AS(ReportFromJson(json::object()), FormatError);
}
