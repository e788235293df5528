#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "filter_audit/util.h"

namespace fs = std::filesystem;
using filter_audit::ReadFile;
using filter_audit::WriteFileAtomic;

namespace {

int Harness(const std::string& args) {
  std::string cmd = std::string(HARNESS_BIN) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string Replace(std::string text, const std::string& from, const std::string& to) {
  auto pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("exit codes follow the error taxonomy") {
  fs::path dir = fs::temp_directory_path() / "fa_cli_test";
  fs::remove_all(dir);
  std::string d = dir.string();
  REQUIRE(Harness("synth --out " + d + " --seed 3 --documents 150 --people 40") == 0);
  std::string conf = ReadFile(dir / "harness.conf");

  CHECK(Harness("") == 1);
  CHECK(Harness("all") == 1);
  CHECK(Harness("all --config " + d + "/absent.conf") == 1);

  WriteFileAtomic(dir / "unknown.conf", Replace(conf, "[audit]", "[audit]\nflavour = mild"));
  CHECK(Harness("all --config " + d + "/unknown.conf") == 1);

  WriteFileAtomic(dir / "nokb.conf", Replace(conf, "people = people.tsv", "people = gone.tsv"));
  CHECK(Harness("build-kb --config " + d + "/nokb.conf") == 1);

  // The output directory would have to live under a regular file.
  WriteFileAtomic(dir / "blocked.conf", Replace(conf, "output = out", "output = people.tsv/out"));
  CHECK(Harness("build-kb --config " + d + "/blocked.conf") == 3);

  CHECK(Harness("build-kb --config " + d + "/harness.conf --jobs 2") == 0);
  // A later stage without its upstream artifacts fails its precondition.
  CHECK(Harness("link --config " + d + "/harness.conf") == 1);
  CHECK(Harness("all --config " + d + "/harness.conf --offline --jobs 2") == 0);
  CHECK(fs::exists(dir / "out" / "synth" / "report.json"));
  CHECK(fs::exists(dir / "out" / "synth" / "report.md"));
  CHECK(fs::exists(dir / "out" / "synth" / "tables" / "removal.csv"));

  // --seed replaces the configured seeds and therefore the run identity inputs.
  CHECK(Harness("ingest --config " + d + "/harness.conf --seed 99") == 0);
}
