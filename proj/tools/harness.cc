#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "filter_audit/config.h"
#include "filter_audit/pipeline.h"
#include "filter_audit/synth.h"
#include "filter_audit/util.h"

namespace fa = filter_audit;

namespace {

int ExitCode(fa::ErrorKind kind) {
  switch (kind) {
    case fa::ErrorKind::kValidation:
      return 1;
    case fa::ErrorKind::kRuntime:
      return 2;
    case fa::ErrorKind::kIo:
    case fa::ErrorKind::kFormat:
      return 3;
  }
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Demographic impact audit of corpus filtering strategies"};
  app.require_subcommand(1);

  std::string config_path;
  unsigned jobs = fa::DefaultJobs();
  bool offline = false;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Run configuration file")->required();
    sub->add_option("--jobs", jobs, "Worker threads within a stage")->check(CLI::Range(1u, 1024u));
    sub->add_flag("--offline", offline, "Disable network adapters; use replay recordings only");
    sub->add_option("--seed", seed, "Override every seed in the configuration");
  };

  std::optional<fa::Stage> stage;
  for (fa::Stage s : fa::kStages) {
    auto* sub = app.add_subcommand(fa::StageName(s), std::string("Run the ") + fa::StageName(s) + " stage");
    add_common(sub);
    sub->callback([&stage, s] { stage = s; });
  }
  auto* all = app.add_subcommand("all", "Run every stage, skipping those whose inputs are unchanged");
  add_common(all);

  fa::SynthOptions synth;
  std::string synth_out;
  synth.lexicon_dir = FA_LEXICON_DIR;
  auto* gen = app.add_subcommand("synth", "Write the seeded synthetic fixture corpus");
  gen->add_option("--out", synth_out, "Target directory")->required();
  gen->add_option("--seed", synth.seed, "Generator seed");
  gen->add_option("--documents", synth.documents, "English documents to generate");
  gen->add_option("--people", synth.people, "People Dataset size");
  gen->add_option("--lexicons", synth.lexicon_dir, "Directory holding shutterstock.txt and hatebase.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      auto s = fa::GenerateSynthetic(synth_out, synth);
      std::cout << "wrote " << s.documents << " documents, " << s.warc_records << " WARC records, "
                << s.people << " people to " << synth_out << "\n";
      return 0;
    }
    fa::ConfigOverrides overrides;
    overrides.seed = seed;
    overrides.offline = offline;
    fa::RunConfig config = fa::LoadConfig(config_path, overrides);
    fa::Pipeline pipeline(config, fa::PipelineOptions{jobs, &std::cerr});
    if (stage) {
      pipeline.Run(*stage);
    } else {
      for (const auto& o : pipeline.RunAll()) {
        std::cerr << fa::StageName(o.stage) << (o.skipped ? " skipped " : " done ")
                  << o.fingerprint.substr(0, 12) << "\n";
      }
    }
    std::cout << pipeline.run_dir().string() << "\n";
    return 0;
  } catch (const fa::Error& e) {
    std::cerr << "error (" << fa::ErrorKindName(e.kind()) << "): " << e.what() << "\n";
    return ExitCode(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error (io): " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error (runtime): " << e.what() << "\n";
    return 2;
  }
}
