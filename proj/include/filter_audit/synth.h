#ifndef FILTER_AUDIT_SYNTH_H_
#define FILTER_AUDIT_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "filter_audit/kb.h"

namespace filter_audit {

// Seeded generator for a self-contained audit fixture: a People Dataset, a
// gzip WARC corpus with planted person mentions and lexicon terms, training
// corpora for the classifier and quality models, a held-out calibration
// slice, a toxicity replay recording and a ready-to-run harness.conf.
struct SynthOptions {
  std::uint64_t seed = 1;
  std::size_t people = 200;
  std::size_t documents = 1000;  // English documents built to pass the gates
  std::size_t noise_documents = 60;  // non-English and too-short documents
  std::size_t corpus_files = 4;
  std::size_t corrupt_records = 2;   // records written with a wrong Content-Length

  // Probability that a sentence mentioning a person receives a lexicon term.
  DemographicGroup biased_group = DemographicGroup::kWesternWoman;
  double biased_rate = 0.30;
  double base_rate = 0.03;
  // Same, for sentences without a mention.
  double background_rate = 0.02;

  std::size_t classifier_examples = 1500;  // per class
  std::size_t quality_examples = 800;      // per class
  std::size_t calibration_documents = 1000;
  double replay_coverage = 0.99;           // share of sentences with a recorded score

  std::size_t samples = 5;
  std::size_t sample_size = 180;

  // Directory holding shutterstock.txt and hatebase.txt.
  std::filesystem::path lexicon_dir;
};

struct SynthSummary {
  std::size_t people = 0;
  std::size_t documents = 0;        // English documents written
  std::size_t warc_records = 0;     // every record, noise and corrupt included
  std::size_t planted_mentions = 0;
  std::map<std::string, std::size_t> planted_by_group;        // group key -> mentions
  std::map<std::string, std::size_t> toxic_mentions_by_group;  // mentions in term-bearing sentences
  std::size_t toxic_sentences = 0;
};

// Writes the fixture into `dir` (created if needed) and returns ground truth.
SynthSummary GenerateSynthetic(const std::filesystem::path& dir, const SynthOptions& options);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_SYNTH_H_
