#include "filter_audit/synth.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "filter_audit/ingest.h"
#include "filter_audit/lexicon.h"
#include "filter_audit/text.h"
#include "filter_audit/toxicity.h"
#include "filter_audit/util.h"
#include "filter_audit/warc.h"
#include "json.hpp"

namespace filter_audit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array kGlue = {"the",  "a",     "of",   "and",   "to",     "in",    "for",   "with",
                              "on",   "was",   "is",   "at",    "by",     "from",  "this",  "that",
                              "their", "new",  "many", "several", "during", "after", "before", "also",
                              "which", "were", "has",  "had",   "its",    "into",  "about", "over"};

constexpr std::array kFormal = {
    "history",    "university", "research",    "government",  "population",  "century",
    "published",  "international", "development", "architecture", "museum",   "science",
    "literature", "economic",   "region",      "community",   "education",   "theory",
    "analysis",   "committee",  "cathedral",   "territory",   "council",     "library",
    "province",   "agriculture", "archive",    "journal",     "treaty",      "orchestra",
    "parliament", "institute",  "mathematics", "observatory", "monument",    "heritage",
    "composer",   "manuscript", "dynasty",     "chronicle",   "expedition",  "academy",
    "philosophy", "collection", "settlement",  "historian",   "engineering", "symphony"};

constexpr std::array kSpam = {
    "click",    "free",    "deal",     "cheap",   "buy",      "offer",     "discount", "win",
    "bonus",    "subscribe", "download", "limited", "sale",   "amazing",   "best",     "online",
    "casino",   "shipping", "coupon",  "promo",   "viral",    "crypto",    "trending", "lol",
    "omg",      "wow",     "awesome",  "share",   "followers", "giveaway", "prize",    "guaranteed",
    "instant",  "unlock",  "hack",     "secret",  "tips",     "tricks",    "today",    "now"};

constexpr std::array kVerbs = {"visited", "praised",  "joined",     "criticized", "met",      "thanked",
                               "interviewed", "described", "supported", "remembered", "introduced",
                               "welcomed"};

constexpr std::array kSyllables = {"ka", "lo", "mi",  "ren", "dor", "vel", "tis", "ba", "ne", "ro",
                                   "sa", "li", "mo",  "tan", "zu",  "fe",  "gor", "ha", "ji", "ku",
                                   "pa", "qui", "ves", "wen", "yo", "xan", "bri", "dal", "mer", "sol"};

constexpr std::array kWesternCountries = {"FR", "DE", "GB", "US", "IT", "ES", "NL", "SE", "CA", "AU"};
constexpr std::array kOtherCountries = {"NG", "IN", "BR", "KE", "MX", "EG", "PK", "PH", "VN", "GH"};
constexpr std::array kMinorities = {"African Americans", "British Indians", "Afro-Germans",
                                    "Maghrebis in France", "Black Canadians"};
constexpr std::array kMinorityCountries = {"US", "GB", "DE", "FR", "CA"};

constexpr std::array kMenJobs = {"politician", "footballer", "businessman", "writer",
                                 "actor",      "scientist",  "journalist",  "film director"};
constexpr std::array kWomenJobs = {"actor",      "singer",        "model",   "writer",
                                   "politician", "tennis player", "journalist", "television presenter"};

// Non-English filler for documents the language gate should drop.
const std::map<std::string, std::vector<std::string>>& ForeignWords() {
  static const std::map<std::string, std::vector<std::string>> words = {
      {"de", {"der", "die", "und", "nicht", "eine", "werden", "auch", "nach", "über", "wurde", "zwischen",
              "immer", "heute", "können", "schon", "jahren", "diese", "durch", "gegen", "unter"}},
      {"fr", {"les", "des", "une", "pour", "dans", "avec", "mais", "cette", "leur", "aussi", "depuis",
              "encore", "toujours", "beaucoup", "après", "entre", "pendant", "selon", "nous", "très"}},
      {"es", {"los", "las", "una", "para", "como", "pero", "también", "cuando", "desde", "porque",
              "siempre", "durante", "después", "gobierno", "tiempo", "entre", "muy", "sobre", "todo", "año"}},
  };
  return words;
}

template <typename T, std::size_t N>
const char* Pick(std::mt19937_64& rng, const std::array<T, N>& a) {
  return a[UniformBelow(rng, N)];
}

std::string Capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string MakeWord(std::mt19937_64& rng, std::size_t syllables) {
  std::string w;
  for (std::size_t i = 0; i < syllables; ++i) w += Pick(rng, kSyllables);
  return w;
}

std::string Hex(std::mt19937_64& rng, int digits) {
  static const char* kDigits = "0123456789abcdef";
  std::string s;
  for (int i = 0; i < digits; ++i) s.push_back(kDigits[UniformBelow(rng, 16)]);
  return s;
}

std::string RecordId(std::mt19937_64& rng) {
  return "<urn:uuid:" + Hex(rng, 8) + "-" + Hex(rng, 4) + "-" + Hex(rng, 4) + "-" + Hex(rng, 4) + "-" +
         Hex(rng, 12) + ">";
}

struct Person {
  PersonRecord record;
  DemographicGroup group;
  std::string alias;  // empty if none
};

struct Lexicons {
  std::vector<std::string> shutterstock;
  std::vector<std::string> hatebase;
};

class Generator {
 public:
  Generator(const SynthOptions& o, const Lexicons& lex) : o_(o), lex_(lex), rng_(o.seed) {
    for (const auto& t : lex.shutterstock) reserved_.insert(t);
    for (const auto& t : lex.hatebase) {
      for (const auto& tok : TokenNorms(t)) reserved_.insert(tok);
    }
    for (const auto* w : kGlue) reserved_.insert(w);
    for (const auto* w : kFormal) reserved_.insert(w);
    for (const auto* w : kSpam) reserved_.insert(w);
    for (const auto* w : kVerbs) reserved_.insert(w);
  }

  std::mt19937_64& rng() { return rng_; }

  std::vector<Person> MakePeople() {
    std::vector<Person> people;
    std::set<std::string> used;
    auto fresh = [&](std::size_t syl) {
      for (;;) {
        std::string w = MakeWord(rng_, syl);
        if (!reserved_.count(w) && used.insert(w).second) return w;
      }
    };
    // Share of records per group: w.m., p-c.m, w.w., p-c. w., unknown.
    const std::array<double, 5> shares = {0.40, 0.20, 0.25, 0.10, 0.05};
    std::array<std::size_t, 5> quota{};
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < 4; ++g) {
      quota[g] = static_cast<std::size_t>(shares[g] * static_cast<double>(o_.people));
      assigned += quota[g];
    }
    quota[4] = o_.people - std::min(assigned, o_.people);
    std::vector<DemographicGroup> order;
    for (std::size_t g = 0; g < 5; ++g) order.insert(order.end(), quota[g], static_cast<DemographicGroup>(g));
    DeterministicShuffle(order, rng_);

    for (std::size_t i = 0; i < order.size(); ++i) {
      Person p;
      p.group = order[i];
      PersonRecord& r = p.record;
      char id[16];
      std::snprintf(id, sizeof id, "Q%d", static_cast<int>(1000 + i));
      r.entity_id = id;
      std::string first = fresh(2);
      std::string last = fresh(2 + UniformBelow(rng_, 2));
      r.primary_name = Capitalize(first) + " " + Capitalize(last);
      if (UniformUnit(rng_) < 0.4) {
        p.alias = Capitalize(last);
        r.aliases = {p.alias};
      }
      bool man = p.group == DemographicGroup::kWesternMan || p.group == DemographicGroup::kPostColonialMan;
      switch (p.group) {
        case DemographicGroup::kWesternMan:
        case DemographicGroup::kWesternWoman:
          r.gender = man ? Gender::kMan : Gender::kWoman;
          if (UniformUnit(rng_) < 0.15) {
            r.citizenship = {Pick(rng_, kWesternCountries)};
          } else {
            r.birth_country = Pick(rng_, kWesternCountries);
          }
          break;
        case DemographicGroup::kPostColonialMan:
        case DemographicGroup::kPostColonialWoman:
          r.gender = man ? Gender::kMan : Gender::kWoman;
          if (UniformUnit(rng_) < 0.3) {
            std::size_t k = UniformBelow(rng_, kMinorities.size());
            r.ethnic_groups = {kMinorities[k]};
            r.birth_country = kMinorityCountries[k];
          } else {
            r.birth_country = Pick(rng_, kOtherCountries);
          }
          break;
        default:
          if (UniformUnit(rng_) < 0.5) {
            r.gender = Gender::kOther;
            r.birth_country = Pick(rng_, kWesternCountries);
          } else {
            r.gender = Gender::kWoman;
          }
      }
      bool woman = r.gender == Gender::kWoman;
      std::set<std::string> jobs;
      std::size_t n_jobs = 1 + UniformBelow(rng_, 2);
      while (jobs.size() < n_jobs) jobs.insert(woman ? Pick(rng_, kWomenJobs) : Pick(rng_, kMenJobs));
      r.occupations.assign(jobs.begin(), jobs.end());
      people.push_back(std::move(p));
    }
    return people;
  }

  // Words of a filler sentence for a document of quality q.
  std::vector<std::string> FillerWords(double q, std::size_t n) {
    std::vector<std::string> w;
    for (std::size_t i = 0; i < n; ++i) {
      double u = UniformUnit(rng_);
      if (u < 0.35) {
        w.emplace_back(Pick(rng_, kGlue));
      } else if (UniformUnit(rng_) < q) {
        w.emplace_back(Pick(rng_, kFormal));
      } else {
        w.emplace_back(Pick(rng_, kSpam));
      }
    }
    return w;
  }

  std::string Term(int lexicon) {
    const auto& list = lexicon == 0 ? lex_.shutterstock : lex_.hatebase;
    return list[UniformBelow(rng_, list.size())];
  }

  // lexicon: -1 none, 0 shutterstock, 1 hatebase.
  std::string Sentence(double q, const std::string* name, int lexicon) {
    std::vector<std::string> words = FillerWords(q, 6 + UniformBelow(rng_, 7));
    std::size_t name_pos = 0;
    if (name) {
      if (UniformUnit(rng_) < 0.5) {
        words.insert(words.begin(), {*name, Pick(rng_, kVerbs)});
        name_pos = 0;
      } else {
        name_pos = 2 + UniformBelow(rng_, words.size() - 2);
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(name_pos), {Pick(rng_, kVerbs), *name});
        ++name_pos;
      }
    }
    if (lexicon >= 0) {
      std::size_t pos = 1 + UniformBelow(rng_, words.size());
      if (name && pos == name_pos) ++pos;
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(std::min(pos, words.size())), Term(lexicon));
    }
    words[0] = Capitalize(words[0]);
    return JoinStrings(words, " ") + ".";
  }

  int MaybeTerm(double rate) {
    if (UniformUnit(rng_) >= rate) return -1;
    return static_cast<int>(UniformBelow(rng_, 2));
  }

  struct Doc {
    std::vector<std::string> sentences;
    std::vector<bool> toxic;
  };

  Doc EnglishDoc(const std::vector<Person>& people, SynthSummary* summary) {
    Doc d;
    double q = UniformUnit(rng_);
    std::size_t n = 6 + UniformBelow(rng_, 7);
    for (std::size_t i = 0; i < n; ++i) {
      if (UniformUnit(rng_) < 0.3) {
        const Person& p = people[UniformBelow(rng_, people.size())];
        std::string surface =
            !p.alias.empty() && UniformUnit(rng_) < 0.3 ? p.alias : p.record.primary_name;
        double rate = p.group == o_.biased_group ? o_.biased_rate : o_.base_rate;
        int lex = MaybeTerm(rate);
        d.sentences.push_back(Sentence(q, &surface, lex));
        d.toxic.push_back(lex >= 0);
        if (summary) {
          ++summary->planted_mentions;
          ++summary->planted_by_group[GroupKey(p.group)];
          if (lex >= 0) ++summary->toxic_mentions_by_group[GroupKey(p.group)];
        }
      } else {
        int lex = MaybeTerm(o_.background_rate);
        d.sentences.push_back(Sentence(q, nullptr, lex));
        d.toxic.push_back(lex >= 0);
      }
      if (summary && d.toxic.back()) ++summary->toxic_sentences;
    }
    return d;
  }

  std::string ForeignDoc() {
    const auto& all = ForeignWords();
    auto it = std::next(all.begin(), static_cast<std::ptrdiff_t>(UniformBelow(rng_, all.size())));
    const auto& words = it->second;
    std::vector<std::string> sentences;
    std::size_t n = 6 + UniformBelow(rng_, 5);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> w;
      std::size_t k = 7 + UniformBelow(rng_, 6);
      for (std::size_t j = 0; j < k; ++j) w.push_back(words[UniformBelow(rng_, words.size())]);
      w[0] = Capitalize(w[0]);
      sentences.push_back(JoinStrings(w, " ") + ".");
    }
    return JoinStrings(sentences, " ");
  }

  std::string ShortDoc() {
    std::vector<std::string> sentences;
    if (UniformUnit(rng_) < 0.5) {
      for (int i = 0; i < 3; ++i) sentences.push_back(Sentence(0.5, nullptr, -1));
    } else {
      for (int i = 0; i < 8; ++i) {
        auto w = FillerWords(0.5, 3);
        w[0] = Capitalize(w[0]);
        sentences.push_back(JoinStrings(w, " ") + ".");
      }
    }
    return JoinStrings(sentences, " ");
  }

  // A high-quality or low-quality training document on one line.
  std::string QualityDoc(double q_lo, double q_hi) {
    double q = q_lo + (q_hi - q_lo) * UniformUnit(rng_);
    std::vector<std::string> s;
    std::size_t n = 6 + UniformBelow(rng_, 5);
    for (std::size_t i = 0; i < n; ++i) s.push_back(Sentence(q, nullptr, MaybeTerm(o_.background_rate * 3)));
    return JoinStrings(s, " ");
  }

 private:
  const SynthOptions& o_;
  const Lexicons& lex_;
  std::mt19937_64 rng_;
  std::set<std::string> reserved_;
};

std::string Html(const std::vector<std::string>& sentences, std::mt19937_64& rng) {
  std::string out = "<!DOCTYPE html><html><head><script>var t = " +
                    std::to_string(UniformBelow(rng, 1000)) + ";</script></head><body>\n";
  for (const auto& s : sentences) {
    std::string esc;
    for (char c : s) esc += c == '&' ? std::string("&amp;") : std::string(1, c);
    out += "<p>" + esc + "</p>\n";
  }
  return out + "</body></html>\n";
}

void WriteMember(std::ostream& out, const std::string& bytes) {
  std::string gz = GzipMember(bytes);
  out.write(gz.data(), static_cast<std::streamsize>(gz.size()));
}

}  // namespace

SynthSummary GenerateSynthetic(const fs::path& dir, const SynthOptions& o) {
  if (o.people < 10 || o.documents == 0 || o.corpus_files == 0) {
    throw ValidationError("synth: need at least 10 people, 1 document and 1 corpus file");
  }
  Lexicons lex;
  for (const char* name : {"shutterstock", "hatebase"}) {
    fs::path p = o.lexicon_dir / (std::string(name) + ".txt");
    if (!fs::exists(p)) throw ValidationError("synth: lexicon not found: " + p.string());
    auto terms = LexiconMatcher::Load(p).terms();
    (std::string(name) == "shutterstock" ? lex.shutterstock : lex.hatebase) = terms;
  }

  fs::create_directories(dir / "corpus");
  fs::create_directories(dir / "lexicons");
  fs::create_directories(dir / "train");
  for (const char* name : {"shutterstock", "hatebase"}) {
    fs::path src = o.lexicon_dir / (std::string(name) + ".txt");
    WriteFileAtomic(dir / "lexicons" / (std::string(name) + ".txt"), ReadFile(src));
  }
  WriteFileAtomic(dir / "region_map.conf", RegionMap::Default().Serialize());

  Generator gen(o, lex);
  SynthSummary summary;
  std::vector<Person> people = gen.MakePeople();
  std::string people_tsv;
  for (const auto& p : people) people_tsv += FormatPersonLine(p.record) + "\n";
  WriteFileAtomic(dir / "people.tsv", people_tsv);
  summary.people = people.size();

  // Corpus: English documents plus noise, dealt round-robin over the files.
  std::vector<std::ofstream> files;
  for (std::size_t f = 0; f < o.corpus_files; ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "part-%04zu.warc.gz", f);
    files.emplace_back(dir / "corpus" / name, std::ios::binary);
    if (!files.back()) throw IoError("synth: cannot write corpus file");
    WarcRecord info;
    info.headers = {{"WARC-Type", "warcinfo"},
                    {"WARC-Record-ID", RecordId(gen.rng())},
                    {"Content-Type", "application/warc-fields"}};
    info.payload = "software: filter-audit synth\r\nformat: WARC File Format 1.0\r\n";
    WriteMember(files.back(), FormatWarcRecord(info));
    ++summary.warc_records;
  }

  std::set<std::string> replayed;
  std::string replay;
  auto record_scores = [&](const std::vector<std::string>& sentences, const std::vector<bool>& toxic) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      double u = UniformUnit(gen.rng());
      double v = UniformUnit(gen.rng());
      double keep = UniformUnit(gen.rng());
      if (keep >= o.replay_coverage || !replayed.insert(sentences[i]).second) continue;
      double score;
      if (toxic[i]) {
        score = u < 0.92 ? 0.82 + 0.17 * v : 0.5 + 0.29 * v;
      } else {
        score = u < 0.01 ? 0.8 + 0.15 * v : 0.02 + 0.5 * v;
      }
      replay += ReplayLine(sentences[i], score) + "\n";
    }
  };

  std::size_t total = o.documents + o.noise_documents;
  std::size_t corrupt_every = o.corrupt_records ? total / (o.corrupt_records + 1) : 0;
  std::size_t corrupt_left = o.corrupt_records;
  std::size_t english = 0;
  for (std::size_t k = 0; k < total; ++k) {
    // Noise documents are spread evenly through the stream.
    bool noise = o.noise_documents > 0 && (k * o.noise_documents) / total !=
                                              ((k + 1) * o.noise_documents) / total;
    if (english >= o.documents) noise = true;
    if (noise && english + (total - k) <= o.documents) noise = false;
    std::ofstream& out = files[k % files.size()];
    std::string id = RecordId(gen.rng());
    std::string url = "http://site-" + std::to_string(k % 97) + ".example/page/" + std::to_string(k);

    std::vector<std::string> sentences;
    std::vector<bool> toxic;
    std::string body;
    bool html = UniformUnit(gen.rng()) < 0.15;
    if (noise) {
      body = UniformUnit(gen.rng()) < 0.5 ? gen.ForeignDoc() : gen.ShortDoc();
      html = false;
    } else {
      auto d = gen.EnglishDoc(people, &summary);
      sentences = d.sentences;
      toxic = d.toxic;
      body = JoinStrings(sentences, " ");
      ++english;
    }

    WarcRecord rec;
    if (html) {
      WarcRecord req;
      req.headers = {{"WARC-Type", "request"},
                     {"WARC-Record-ID", RecordId(gen.rng())},
                     {"WARC-Target-URI", url},
                     {"Content-Type", "application/http; msgtype=request"}};
      req.payload = "GET /page HTTP/1.1\r\nHost: example\r\n\r\n";
      WriteMember(out, FormatWarcRecord(req));
      ++summary.warc_records;
      rec.headers = {{"WARC-Type", "response"},
                     {"WARC-Record-ID", id},
                     {"WARC-Target-URI", url},
                     {"Content-Type", "application/http; msgtype=response"}};
      rec.payload = "HTTP/1.1 200 OK\r\nContent-Type: text/html; charset=utf-8\r\n\r\n" + Html(sentences, gen.rng());
    } else {
      rec.headers = {{"WARC-Type", "conversion"},
                     {"WARC-Record-ID", id},
                     {"WARC-Target-URI", url},
                     {"Content-Type", "text/plain"}};
      rec.payload = body;
    }
    std::string bytes = FormatWarcRecord(rec);
    if (!noise) {
      // The replay keys must be the sentences the pipeline will see.
      auto raw = DocumentFromRecord(rec);
      std::vector<std::string> seen;
      if (raw) {
        for (const auto& s : SplitSentences(raw->body)) seen.push_back(s.text);
      }
      if (seen != sentences) throw RuntimeError("synth: sentence splitter disagrees with generated text");
    }
    if (corrupt_left > 0 && corrupt_every > 0 && k > 0 && k % corrupt_every == 0) {
      // Claim more payload than the record holds.
      auto pos = bytes.find("Content-Length: ");
      auto eol = bytes.find("\r\n", pos);
      std::size_t len = std::stoul(bytes.substr(pos + 16, eol - pos - 16));
      bytes.replace(pos + 16, eol - pos - 16, std::to_string(len + 11));
      --corrupt_left;
      if (!noise) {
        // The document never reaches the pipeline.
        sentences.clear();
      }
    }
    WriteMember(out, bytes);
    ++summary.warc_records;
    if (!sentences.empty()) record_scores(sentences, toxic);
  }
  for (auto& f : files) {
    f.close();
    if (!f) throw IoError("synth: failed writing corpus file");
  }
  summary.documents = english;
  WriteFileAtomic(dir / "perspective_replay.jsonl", replay);

  // Classifier training sets: the positive class carries a term from the
  // strategy's own lexicon; some negatives carry a term from the other one.
  auto classifier_set = [&](int own) {
    std::string out;
    for (std::size_t i = 0; i < o.classifier_examples; ++i) {
      double q = UniformUnit(gen.rng());
      out += "1\t" + gen.Sentence(q, nullptr, own) + "\n";
      int other = UniformUnit(gen.rng()) < 0.1 ? 1 - own : -1;
      out += "0\t" + gen.Sentence(UniformUnit(gen.rng()), nullptr, other) + "\n";
    }
    return out;
  };
  WriteFileAtomic(dir / "train" / "fasttext.tsv", classifier_set(1));
  WriteFileAtomic(dir / "train" / "profanity.tsv", classifier_set(0));

  auto quality_set = [&](double pos_lo, double neg_hi) {
    std::string out;
    for (std::size_t i = 0; i < o.quality_examples; ++i) {
      out += "1\t" + gen.QualityDoc(pos_lo, 1.0) + "\n";
      out += "0\t" + gen.QualityDoc(0.0, neg_hi) + "\n";
    }
    return out;
  };
  WriteFileAtomic(dir / "train" / "quality_wiki.tsv", quality_set(0.8, 0.5));
  WriteFileAtomic(dir / "train" / "quality_webtext.tsv", quality_set(0.6, 0.4));

  std::string calibration;
  for (std::size_t i = 0; i < o.calibration_documents; ++i) {
    auto d = gen.EnglishDoc(people, nullptr);
    json row = {{"doc_id", "cal-" + std::to_string(i)},
                {"url", nullptr},
                {"text", JoinStrings(d.sentences, " ")}};
    calibration += row.dump() + "\n";
  }
  WriteFileAtomic(dir / "calibration.jsonl", calibration);

  std::ostringstream conf;
  conf << "# Generated by `harness synth --seed " << o.seed << "`.\n"
       << "[run]\nid = synth\noutput = out\n\n"
       << "[seeds]\nsampling = " << DeriveSeed(o.seed, 1) << "\ntraining = " << DeriveSeed(o.seed, 2) << "\n\n"
       << "[kb]\npeople = people.tsv\nregion_map = region_map.conf\n\n"
       << "[corpus]\ninputs = corpus/*.warc.gz\nformat = warc\n\n"
       << "[sampling]\nsamples = " << o.samples << "\nsize = " << o.sample_size << "\ndisjoint = true\n\n"
       << "[linker]\ntau = 0.85\n\n"
       << "[strategies]\nenabled = shutterstock, hatebase, perspective, fasttext, profanity, "
          "quality_wiki, quality_webtext\n\n"
       << "[shutterstock]\nlexicon = lexicons/shutterstock.txt\n\n"
       << "[hatebase]\nlexicon = lexicons/hatebase.txt\n\n"
       << "[fasttext]\ntrain = train/fasttext.tsv\ntau = 0.5\n\n"
       << "[profanity]\ntrain = train/profanity.tsv\ntau = 0.8\n\n"
       << "[perspective]\ntau = 0.8\nreplay = perspective_replay.jsonl\napi_key_env = PERSPECTIVE_API_KEY\n"
       << "offline = true\n\n"
       << "[quality_wiki]\ntrain = train/quality_wiki.tsv\ntarget_removal = 0.15\n\n"
       << "[quality_webtext]\ntrain = train/quality_webtext.tsv\ntarget_removal = 0.45\n\n"
       << "[training]\ndim = 1000\nepochs = 10\nlearning_rate = 0.5\ncalibration = calibration.jsonl\n\n"
       << "[audit]\ntoxic = union\ntop_k = 5\n";
  WriteFileAtomic(dir / "harness.conf", conf.str());
  return summary;
}

}  // namespace filter_audit
