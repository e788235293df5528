#include "filter_audit/report.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "filter_audit/util.h"

namespace filter_audit {

using nlohmann::json;

namespace {

void WriteCanonical(const json& j, int indent, std::string& out) {
  auto pad = [&](int n) { out.append(static_cast<std::size_t>(n) * 2, ' '); };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted
        if (!first) out += ",\n";
        first = false;
        pad(indent + 1);
        out += json(it.key()).dump();
        out += ": ";
        WriteCanonical(it.value(), indent + 1, out);
      }
      out += "\n";
      pad(indent);
      out += "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ",\n";
        pad(indent + 1);
        WriteCanonical(j[i], indent + 1, out);
      }
      out += "\n";
      pad(indent);
      out += "]";
      return;
    }
    case json::value_t::number_float: {
      double d = j.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      std::string s = FormatDouble17(d);
      // Keep floats recognizable as floats on parse-back.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

json OptionalDouble(const std::optional<double>& v) { return v ? json(*v) : json(); }

std::optional<double> ReadOptionalDouble(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json GroupCountsJson(const GroupArray& a) {
  json o = json::object();
  for (std::size_t g = 0; g < 5; ++g) o[GroupKey(static_cast<DemographicGroup>(g))] = a[g];
  return o;
}

GroupArray GroupCountsFromJson(const json& o) {
  GroupArray a{};
  for (std::size_t g = 0; g < 5; ++g) {
    a[g] = o.at(GroupKey(static_cast<DemographicGroup>(g))).get<std::uint64_t>();
  }
  return a;
}

json AnovaJson(const AnovaResult& r) {
  return {{"f", r.f}, {"p", r.p}, {"df_between", r.df_between}, {"df_within", r.df_within}};
}

AnovaResult AnovaFromJson(const json& j) {
  AnovaResult r;
  r.f = j.at("f").is_null() ? std::numeric_limits<double>::infinity() : j.at("f").get<double>();
  r.p = j.at("p").get<double>();
  r.df_between = j.at("df_between").get<std::size_t>();
  r.df_within = j.at("df_within").get<std::size_t>();
  return r;
}

json RankedJson(const RankedCounts& r, const char* key) {
  json a = json::array();
  for (const auto& [k, c] : r) a.push_back({{key, k}, {"count", c}});
  return a;
}

RankedCounts RankedFromJson(const json& a, const char* key) {
  RankedCounts r;
  for (const auto& e : a) r.emplace_back(e.at(key).get<std::string>(), e.at("count").get<std::uint64_t>());
  return r;
}

StrategyCategory CategoryFromName(const std::string& s) {
  for (auto c : {StrategyCategory::kRuleBased, StrategyCategory::kClassifierBased,
                 StrategyCategory::kQualityBased}) {
    if (s == CategoryName(c)) return c;
  }
  throw FormatError("unknown strategy category '" + s + "'");
}

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string CsvRow(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += CsvField(fields[i]);
  }
  return out + "\n";
}

std::string MdRow(const std::vector<std::string>& fields) {
  std::string out = "|";
  for (const auto& f : fields) {
    std::string cell = f;
    for (std::size_t p = 0; (p = cell.find('|', p)) != std::string::npos; p += 2) cell.replace(p, 1, "\\|");
    out += " " + cell + " |";
  }
  return out + "\n";
}

std::string MdHeader(const std::vector<std::string>& fields) {
  std::string out = MdRow(fields) + "|";
  for (std::size_t i = 0; i < fields.size(); ++i) out += "---|";
  return out + "\n";
}

std::vector<std::string> GroupHeaders() {
  std::vector<std::string> h;
  for (auto g : kReportedGroups) h.emplace_back(GroupAbbrev(g));
  return h;
}

std::string Percent(std::uint64_t num, std::uint64_t den, int decimals) {
  if (den == 0) return "N/A";
  return FormatRatioHalfEven(num * 100, den, decimals) + "%";
}

std::string Fixed(double v, int decimals) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  return os.str();
}

std::string Sci(double v) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string MeanBaseline(const AuditReport& r, DemographicGroup g) {
  if (r.samples.empty()) return "N/A";
  std::uint64_t sum = 0;
  for (const auto& s : r.samples) sum += At(s.counts, g);
  return FormatRatioHalfEven(sum, r.samples.size(), 1);
}

}  // namespace

int RemovalDecimals(StrategyCategory c) { return c == StrategyCategory::kClassifierBased ? 2 : 1; }

std::string CanonicalJson(const json& j) {
  std::string out;
  WriteCanonical(j, 0, out);
  out += "\n";
  return out;
}

json ReportToJson(const AuditReport& r) {
  json j;
  const auto& m = r.metadata;
  json corpora = json::array();
  for (const auto& c : m.corpora) {
    corpora.push_back({{"name", c.name},
                       {"content_sha256", c.content_sha256},
                       {"records", c.records},
                       {"documents", c.documents},
                       {"errors", c.errors}});
  }
  json thresholds = json::object();
  for (const auto& [k, v] : m.thresholds) thresholds[k] = v;
  json seeds = json::object();
  for (const auto& [k, v] : m.seeds) seeds[k] = v;
  j["metadata"] = {{"run_id", m.run_id},
                   {"config_hash", m.config_hash},
                   {"region_map_hash", m.region_map_hash},
                   {"people_hash", m.people_hash},
                   {"seeds", seeds},
                   {"thresholds", thresholds},
                   {"strategies", m.strategies},
                   {"corpora", corpora}};

  json samples = json::array();
  for (const auto& s : r.samples) {
    samples.push_back(
        {{"sample_id", s.sample_id}, {"documents", s.documents}, {"counts", GroupCountsJson(s.counts)}});
  }
  j["samples"] = samples;
  json mean = json::object();
  for (std::size_t g = 0; g < 5; ++g) {
    double sum = 0;
    for (const auto& s : r.samples) sum += static_cast<double>(s.counts[g]);
    mean[GroupKey(static_cast<DemographicGroup>(g))] =
        r.samples.empty() ? json() : json(sum / static_cast<double>(r.samples.size()));
  }
  j["baseline_mean"] = mean;

  json removal = json::array();
  for (const auto& s : r.removal) {
    json groups = json::object();
    for (std::size_t g = 0; g < 5; ++g) {
      groups[GroupKey(static_cast<DemographicGroup>(g))] = {
          {"baseline", s.groups[g].baseline},
          {"removed", s.groups[g].removed},
          {"percentage", OptionalDouble(s.groups[g].percentage)}};
    }
    removal.push_back({{"strategy", s.strategy}, {"category", CategoryName(s.category)}, {"groups", groups}});
  }
  j["removal"] = removal;

  json pairwise = json::array();
  for (const auto& p : r.anova_pairwise) {
    json e = AnovaJson(p.result);
    e["sample_a"] = p.a;
    e["sample_b"] = p.b;
    pairwise.push_back(e);
  }
  j["anova"] = {{"all_samples", r.anova_all ? AnovaJson(*r.anova_all) : json()},
                {"pairwise", pairwise}};

  json containment = json::array();
  for (const auto& row : r.overlap.containment) {
    json jr = json::array();
    for (const auto& c : row) jr.push_back(OptionalDouble(c));
    containment.push_back(jr);
  }
  j["overlap"] = {{"names", r.overlap.names},
                  {"sizes", r.overlap.sizes},
                  {"intersection", r.overlap.intersection},
                  {"containment", containment},
                  {"all_intersection", r.overlap.all_intersection}};

  json retention = json::array();
  for (const auto& t : r.retention) {
    retention.push_back({{"strategy", t.strategy},
                         {"sentences", t.sentences},
                         {"kept_sentences", t.kept_sentences},
                         {"toxic_sentences", t.toxic_sentences},
                         {"kept_toxic_sentences", t.kept_toxic_sentences},
                         {"kept_fraction", t.kept_fraction},
                         {"kept_toxic_fraction", OptionalDouble(t.kept_toxic_fraction)}});
  }
  j["retention"] = retention;

  json terms = json::object();
  for (const auto& [k, v] : r.top_terms) terms[k] = RankedJson(v, "term");
  j["top_terms"] = terms;

  json occ = json::object();
  for (std::size_t g = 0; g < 4; ++g) {
    occ[GroupKey(kReportedGroups[g])] = {{"baseline", RankedJson(r.occupations.baseline[g], "occupation")},
                                         {"flagged", RankedJson(r.occupations.flagged[g], "occupation")}};
  }
  j["occupations"] = occ;

  json cal = json::object();
  for (const auto& [k, c] : r.calibration) {
    cal[k] = {{"target_removal", c.target_removal},
              {"tau", c.tau},
              {"heldout_removal", c.heldout_removal},
              {"heldout_documents", c.heldout_documents}};
  }
  j["calibration"] = cal;

  const auto& cv = r.coverage;
  auto map_json = [](const std::map<std::string, std::uint64_t>& mm) {
    json o = json::object();
    for (const auto& [k, v] : mm) o[k] = v;
    return o;
  };
  j["coverage"] = {{"unknown_mentions", cv.unknown_mentions},
                   {"parse_errors", cv.parse_errors},
                   {"spans", cv.spans},
                   {"linked", cv.linked},
                   {"unlinked", cv.unlinked},
                   {"gate", map_json(cv.gate)},
                   {"unscored", map_json(cv.unscored)},
                   {"evaluated", map_json(cv.evaluated)}};
  return j;
}

AuditReport ReportFromJson(const json& j) {
  AuditReport r;
  try {
    const json& m = j.at("metadata");
    r.metadata.run_id = m.at("run_id").get<std::string>();
    r.metadata.config_hash = m.at("config_hash").get<std::string>();
    r.metadata.region_map_hash = m.at("region_map_hash").get<std::string>();
    r.metadata.people_hash = m.at("people_hash").get<std::string>();
    for (auto it = m.at("seeds").begin(); it != m.at("seeds").end(); ++it) {
      r.metadata.seeds[it.key()] = it.value().get<std::uint64_t>();
    }
    for (auto it = m.at("thresholds").begin(); it != m.at("thresholds").end(); ++it) {
      r.metadata.thresholds[it.key()] = it.value().get<double>();
    }
    r.metadata.strategies = m.at("strategies").get<std::vector<std::string>>();
    for (const auto& c : m.at("corpora")) {
      r.metadata.corpora.push_back({c.at("name").get<std::string>(),
                                    c.at("content_sha256").get<std::string>(),
                                    c.at("records").get<std::uint64_t>(),
                                    c.at("documents").get<std::uint64_t>(),
                                    c.at("errors").get<std::uint64_t>()});
    }

    for (const auto& s : j.at("samples")) {
      r.samples.push_back({s.at("sample_id").get<std::size_t>(), s.at("documents").get<std::uint64_t>(),
                           GroupCountsFromJson(s.at("counts"))});
    }

    for (const auto& s : j.at("removal")) {
      RemovalStats st;
      st.strategy = s.at("strategy").get<std::string>();
      st.category = CategoryFromName(s.at("category").get<std::string>());
      for (std::size_t g = 0; g < 5; ++g) {
        const json& e = s.at("groups").at(GroupKey(static_cast<DemographicGroup>(g)));
        st.groups[g].baseline = e.at("baseline").get<std::uint64_t>();
        st.groups[g].removed = e.at("removed").get<std::uint64_t>();
        st.groups[g].percentage = ReadOptionalDouble(e.at("percentage"));
      }
      r.removal.push_back(st);
    }

    const json& an = j.at("anova");
    if (!an.at("all_samples").is_null()) r.anova_all = AnovaFromJson(an.at("all_samples"));
    for (const auto& p : an.at("pairwise")) {
      r.anova_pairwise.push_back(
          {p.at("sample_a").get<std::size_t>(), p.at("sample_b").get<std::size_t>(), AnovaFromJson(p)});
    }

    const json& ov = j.at("overlap");
    r.overlap.names = ov.at("names").get<std::vector<std::string>>();
    r.overlap.sizes = ov.at("sizes").get<std::vector<std::size_t>>();
    r.overlap.intersection = ov.at("intersection").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& row : ov.at("containment")) {
      std::vector<std::optional<double>> out;
      for (const auto& c : row) out.push_back(ReadOptionalDouble(c));
      r.overlap.containment.push_back(out);
    }
    r.overlap.all_intersection = ov.at("all_intersection").get<std::size_t>();

    for (const auto& t : j.at("retention")) {
      RetentionStats s;
      s.strategy = t.at("strategy").get<std::string>();
      s.sentences = t.at("sentences").get<std::uint64_t>();
      s.kept_sentences = t.at("kept_sentences").get<std::uint64_t>();
      s.toxic_sentences = t.at("toxic_sentences").get<std::uint64_t>();
      s.kept_toxic_sentences = t.at("kept_toxic_sentences").get<std::uint64_t>();
      s.kept_fraction = t.at("kept_fraction").get<double>();
      s.kept_toxic_fraction = ReadOptionalDouble(t.at("kept_toxic_fraction"));
      r.retention.push_back(s);
    }

    for (auto it = j.at("top_terms").begin(); it != j.at("top_terms").end(); ++it) {
      r.top_terms[it.key()] = RankedFromJson(it.value(), "term");
    }
    for (std::size_t g = 0; g < 4; ++g) {
      const json& o = j.at("occupations").at(GroupKey(kReportedGroups[g]));
      r.occupations.baseline[g] = RankedFromJson(o.at("baseline"), "occupation");
      r.occupations.flagged[g] = RankedFromJson(o.at("flagged"), "occupation");
    }
    for (auto it = j.at("calibration").begin(); it != j.at("calibration").end(); ++it) {
      const json& c = it.value();
      r.calibration[it.key()] = {c.at("target_removal").get<double>(), c.at("tau").get<double>(),
                                 c.at("heldout_removal").get<double>(),
                                 c.at("heldout_documents").get<std::uint64_t>()};
    }
    const json& cv = j.at("coverage");
    r.coverage.unknown_mentions = cv.at("unknown_mentions").get<std::uint64_t>();
    r.coverage.parse_errors = cv.at("parse_errors").get<std::uint64_t>();
    r.coverage.spans = cv.at("spans").get<std::uint64_t>();
    r.coverage.linked = cv.at("linked").get<std::uint64_t>();
    r.coverage.unlinked = cv.at("unlinked").get<std::uint64_t>();
    r.coverage.gate = cv.at("gate").get<std::map<std::string, std::uint64_t>>();
    r.coverage.unscored = cv.at("unscored").get<std::map<std::string, std::uint64_t>>();
    r.coverage.evaluated = cv.at("evaluated").get<std::map<std::string, std::uint64_t>>();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
  return r;
}

std::string RenderJson(const AuditReport& report) { return CanonicalJson(ReportToJson(report)); }

std::map<std::string, std::string> RenderCsvBundle(const AuditReport& r) {
  std::map<std::string, std::string> files;
  auto groups = GroupHeaders();

  {
    std::vector<std::string> h = {"category", "strategy"};
    h.insert(h.end(), groups.begin(), groups.end());
    std::string out = CsvRow(h);
    if (!r.samples.empty()) {
      std::vector<std::string> row = {"", "unfiltered"};
      for (auto g : kReportedGroups) row.push_back(MeanBaseline(r, g));
      out += CsvRow(row);
    }
    for (const auto& s : r.removal) {
      std::vector<std::string> row = {CategoryName(s.category), s.strategy};
      for (auto g : kReportedGroups) {
        const auto& e = s.groups[static_cast<std::size_t>(g)];
        row.push_back(FormatRemovalPercent(e.removed, e.baseline, RemovalDecimals(s.category)));
      }
      out += CsvRow(row);
    }
    files["removal.csv"] = out;
  }
  {
    std::vector<std::string> h = {"sample", "documents"};
    h.insert(h.end(), groups.begin(), groups.end());
    h.push_back("unknown");
    std::string out = CsvRow(h);
    for (const auto& s : r.samples) {
      std::vector<std::string> row = {std::to_string(s.sample_id), std::to_string(s.documents)};
      for (std::size_t g = 0; g < 5; ++g) row.push_back(std::to_string(s.counts[g]));
      out += CsvRow(row);
    }
    files["samples.csv"] = out;
  }
  {
    std::string out = CsvRow({"scope", "sample_a", "sample_b", "F", "p", "df_between", "df_within"});
    auto row = [&](const std::string& scope, const std::string& a, const std::string& b,
                   const AnovaResult& x) {
      out += CsvRow({scope, a, b, Sci(x.f), Sci(x.p), std::to_string(x.df_between),
                     std::to_string(x.df_within)});
    };
    if (r.anova_all) row("all", "", "", *r.anova_all);
    for (const auto& p : r.anova_pairwise) {
      row("pair", std::to_string(p.a), std::to_string(p.b), p.result);
    }
    files["anova.csv"] = out;
  }
  {
    std::string out = CsvRow({"strategy_a", "strategy_b", "flagged_a", "intersection", "containment_a_in_b"});
    const auto& o = r.overlap;
    for (std::size_t i = 0; i < o.names.size(); ++i) {
      for (std::size_t j = 0; j < o.names.size(); ++j) {
        if (i == j) continue;
        out += CsvRow({o.names[i], o.names[j], std::to_string(o.sizes[i]),
                       std::to_string(o.intersection[i][j]),
                       o.sizes[i] ? Percent(o.intersection[i][j], o.sizes[i], 1) : "N/A"});
      }
    }
    if (o.names.size() >= 3) {
      out += CsvRow({"all", "", "", std::to_string(o.all_intersection), ""});
    }
    files["overlap.csv"] = out;
  }
  {
    std::string out = CsvRow({"strategy", "kept_sentences", "kept_toxic_sentences"});
    for (const auto& t : r.retention) {
      out += CsvRow({t.strategy, Percent(t.kept_sentences, t.sentences, 1),
                     Percent(t.kept_toxic_sentences, t.toxic_sentences, 1)});
    }
    files["retention.csv"] = out;
  }
  {
    std::string out = CsvRow({"lexicon", "rank", "term", "count"});
    for (const auto& [name, terms] : r.top_terms) {
      for (std::size_t i = 0; i < terms.size(); ++i) {
        out += CsvRow({name, std::to_string(i + 1), terms[i].first, std::to_string(terms[i].second)});
      }
    }
    files["top_terms.csv"] = out;
  }
  {
    std::string out = CsvRow({"group", "scope", "rank", "occupation", "count"});
    for (std::size_t g = 0; g < 4; ++g) {
      for (const auto& [scope, list] :
           {std::pair{"baseline", &r.occupations.baseline[g]}, std::pair{"flagged", &r.occupations.flagged[g]}}) {
        for (std::size_t i = 0; i < list->size(); ++i) {
          out += CsvRow({GroupAbbrev(kReportedGroups[g]), scope, std::to_string(i + 1), (*list)[i].first,
                         std::to_string((*list)[i].second)});
        }
      }
    }
    files["occupations.csv"] = out;
  }
  return files;
}

std::string RenderMarkdown(const AuditReport& r) {
  std::string md = "# Filtering audit report\n\n";
  md += "Run `" + r.metadata.run_id + "`, config `" + r.metadata.config_hash.substr(0, 12) +
        "`, region map `" + r.metadata.region_map_hash.substr(0, 12) + "`.\n\n";

  md += "## Removed mentions by group\n\n";
  auto groups = GroupHeaders();
  std::vector<std::string> h = {"", "strategy"};
  h.insert(h.end(), groups.begin(), groups.end());
  md += MdHeader(h);
  if (!r.samples.empty()) {
    std::vector<std::string> row = {"", "unfiltered"};
    for (auto g : kReportedGroups) row.push_back(MeanBaseline(r, g));
    md += MdRow(row);
  }
  for (const auto& s : r.removal) {
    std::size_t worst_g = 5;
    for (auto g : kReportedGroups) {
      const auto& e = s.groups[static_cast<std::size_t>(g)];
      if (e.baseline == 0) continue;
      // Compare removed/baseline exactly by cross-multiplying.
      if (worst_g == 5 || static_cast<unsigned __int128>(e.removed) * s.groups[worst_g].baseline >
                              static_cast<unsigned __int128>(s.groups[worst_g].removed) * e.baseline) {
        worst_g = static_cast<std::size_t>(g);
      }
    }
    std::vector<std::string> row = {CategoryName(s.category), s.strategy};
    for (auto g : kReportedGroups) {
      const auto& e = s.groups[static_cast<std::size_t>(g)];
      std::string cell = FormatRemovalPercent(e.removed, e.baseline, RemovalDecimals(s.category));
      if (static_cast<std::size_t>(g) == worst_g && e.removed > 0) cell = "**" + cell + "**";
      row.push_back(cell);
    }
    md += MdRow(row);
  }

  md += "\n## Sample variation (one-way ANOVA)\n\n";
  md += MdHeader({"scope", "F", "p", "df"});
  if (r.anova_all) {
    md += MdRow({"all samples", Sci(r.anova_all->f), Sci(r.anova_all->p),
                 std::to_string(r.anova_all->df_between) + ", " + std::to_string(r.anova_all->df_within)});
  }
  for (const auto& p : r.anova_pairwise) {
    md += MdRow({"samples " + std::to_string(p.a) + " vs " + std::to_string(p.b), Sci(p.result.f),
                 Sci(p.result.p),
                 std::to_string(p.result.df_between) + ", " + std::to_string(p.result.df_within)});
  }

  md += "\n## Top matched lexicon terms\n\n";
  md += MdHeader({"lexicon", "top terms"});
  for (const auto& [name, terms] : r.top_terms) {
    std::vector<std::string> parts;
    for (const auto& [t, c] : terms) parts.push_back(t + " (" + std::to_string(c) + ")");
    md += MdRow({name, JoinStrings(parts, ", ")});
  }

  md += "\n## Classifier overlap\n\n";
  {
    std::vector<std::string> oh = {"flagged by \\ also flagged by", "n"};
    oh.insert(oh.end(), r.overlap.names.begin(), r.overlap.names.end());
    md += MdHeader(oh);
    for (std::size_t i = 0; i < r.overlap.names.size(); ++i) {
      std::vector<std::string> row = {r.overlap.names[i], std::to_string(r.overlap.sizes[i])};
      for (std::size_t j = 0; j < r.overlap.names.size(); ++j) {
        row.push_back(r.overlap.sizes[i] ? Percent(r.overlap.intersection[i][j], r.overlap.sizes[i], 1)
                                         : "N/A");
      }
      md += MdRow(row);
    }
    if (r.overlap.names.size() >= 3) {
      md += "\nFlagged by all: " + std::to_string(r.overlap.all_intersection) + "\n";
    }
  }

  md += "\n## Harm kept by quality filters\n\n";
  md += MdHeader({"strategy", "n. sents (%)", "toxic sents (%)"});
  for (const auto& t : r.retention) {
    md += MdRow({t.strategy, Percent(t.kept_sentences, t.sentences, 1),
                 Percent(t.kept_toxic_sentences, t.toxic_sentences, 1)});
  }
  if (!r.calibration.empty()) {
    md += "\n";
    md += MdHeader({"quality filter", "target removal", "tau", "held-out removal"});
    for (const auto& [k, c] : r.calibration) {
      md += MdRow({k, Fixed(100 * c.target_removal, 1) + "%", Fixed(c.tau, 6),
                   Fixed(100 * c.heldout_removal, 1) + "%"});
    }
  }

  md += "\n## Occupations\n\n";
  md += MdHeader({"group", "most frequent", "most flagged"});
  for (std::size_t g = 0; g < 4; ++g) {
    auto names = [](const RankedCounts& rc) {
      std::vector<std::string> p;
      for (const auto& [o, c] : rc) p.push_back(o);
      return JoinStrings(p, ", ");
    };
    md += MdRow({GroupAbbrev(kReportedGroups[g]), names(r.occupations.baseline[g]),
                 names(r.occupations.flagged[g])});
  }

  const auto& cv = r.coverage;
  md += "\n## Coverage\n\n";
  md += "- mention spans: " + std::to_string(cv.spans) + ", linked: " + std::to_string(cv.linked) +
        ", unlinked: " + std::to_string(cv.unlinked) + "\n";
  md += "- linked mentions with unknown group: " + std::to_string(cv.unknown_mentions) + "\n";
  md += "- corpus record errors: " + std::to_string(cv.parse_errors) + "\n";
  for (const auto& [k, v] : cv.gate) md += "- gate " + k + ": " + std::to_string(v) + "\n";
  for (const auto& [k, v] : cv.unscored) {
    md += "- " + k + " unscored units: " + std::to_string(v) + "\n";
  }
  return md;
}

void WriteReport(const AuditReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "tables", ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  WriteFileAtomic(dir / "report.json", RenderJson(report));
  for (const auto& [name, body] : RenderCsvBundle(report)) {
    WriteFileAtomic(dir / "tables" / name, body);
  }
  WriteFileAtomic(dir / "report.md", RenderMarkdown(report));
}

}  // namespace filter_audit
