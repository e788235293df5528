#include "filter_audit/kb.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "filter_audit/text.h"
#include "filter_audit/util.h"

namespace filter_audit {

const char* GenderName(Gender g) {
  switch (g) {
    case Gender::kMan: return "Man";
    case Gender::kWoman: return "Woman";
    case Gender::kOther: return "Other";
    case Gender::kUnknown: return "Unknown";
  }
  return "Unknown";
}

std::optional<Gender> ParseGender(std::string_view s) {
  std::string v = NormalizeText(s);
  if (v == "man" || v == "male") return Gender::kMan;
  if (v == "woman" || v == "female") return Gender::kWoman;
  if (v == "other") return Gender::kOther;
  if (v.empty() || v == "unknown") return Gender::kUnknown;
  return std::nullopt;
}

DemographicGroup MakeGroup(Gender gender, OriginAxis origin) {
  if (gender == Gender::kMan) {
    return origin == OriginAxis::kWestern ? DemographicGroup::kWesternMan
                                          : DemographicGroup::kPostColonialMan;
  }
  if (gender == Gender::kWoman) {
    return origin == OriginAxis::kWestern ? DemographicGroup::kWesternWoman
                                          : DemographicGroup::kPostColonialWoman;
  }
  return DemographicGroup::kUnknown;
}

const char* GroupKey(DemographicGroup g) {
  switch (g) {
    case DemographicGroup::kWesternMan: return "western_men";
    case DemographicGroup::kPostColonialMan: return "postcolonial_men";
    case DemographicGroup::kWesternWoman: return "western_women";
    case DemographicGroup::kPostColonialWoman: return "postcolonial_women";
    case DemographicGroup::kUnknown: return "unknown";
  }
  return "unknown";
}

const char* GroupAbbrev(DemographicGroup g) {
  switch (g) {
    case DemographicGroup::kWesternMan: return "w.m.";
    case DemographicGroup::kPostColonialMan: return "p-c.m";
    case DemographicGroup::kWesternWoman: return "w.w.";
    case DemographicGroup::kPostColonialWoman: return "p-c. w.";
    case DemographicGroup::kUnknown: return "unknown";
  }
  return "unknown";
}

std::optional<DemographicGroup> GroupFromKey(std::string_view key) {
  for (int i = 0; i <= 4; ++i) {
    auto g = static_cast<DemographicGroup>(i);
    if (key == GroupKey(g)) return g;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// RegionMap

RegionMap::RegionMap(std::set<std::string> western_countries,
                     std::set<std::string> minority_labels) {
  for (const auto& c : western_countries) {
    std::string code(Trim(c));
    std::transform(code.begin(), code.end(), code.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
    if (!code.empty()) western_.insert(code);
  }
  for (const auto& l : minority_labels) {
    std::string label = NormalizeLabel(l);
    if (!label.empty()) minorities_.insert(label);
  }
}

std::string RegionMap::NormalizeLabel(std::string_view label) {
  std::string s(label);
  for (char& c : s) {
    if (c == '-' || c == '_') c = ' ';
  }
  return NormalizeText(s);
}

RegionMap RegionMap::Default() {
  // EU-27, EFTA, United Kingdom, and the Anglosphere settler states.
  std::set<std::string> western = {
      "AT", "BE", "BG", "HR", "CY", "CZ", "DK", "EE", "FI", "FR", "DE", "GR",
      "HU", "IE", "IT", "LV", "LT", "LU", "MT", "NL", "PL", "PT", "RO", "SK",
      "SI", "ES", "SE", "IS", "LI", "NO", "CH", "GB", "US", "CA", "AU", "NZ"};
  // Starter list only; not an authoritative curation.
  std::set<std::string> minorities = {
      "african americans",
      "afro caribbean people",
      "black british people",
      "british asians",
      "british indians",
      "british pakistanis",
      "asian americans",
      "hispanic and latino americans",
      "mexican americans",
      "arab americans",
      "native americans in the united states",
      "first nations in canada",
      "aboriginal australians",
      "torres strait islanders",
      "māori people",
      "afro germans",
      "maghrebis in france",
      "black canadians",
  };
  return RegionMap(std::move(western), std::move(minorities));
}

RegionMap RegionMap::Parse(std::string_view text) {
  std::set<std::string> western;
  std::set<std::string> minorities;
  enum class Section { kNone, kWestern, kMinorities } section = Section::kNone;
  int line_no = 0;
  for (const auto& raw : SplitString(text, '\n')) {
    ++line_no;
    std::string_view line = Trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line == "[western]") {
      section = Section::kWestern;
      continue;
    }
    if (line == "[minorities]") {
      section = Section::kMinorities;
      continue;
    }
    if (line.front() == '[') {
      throw FormatError("region map line " + std::to_string(line_no) +
                        ": unknown section " + std::string(line));
    }
    if (section == Section::kWestern) {
      if (line.size() != 2 || !std::isalpha(static_cast<unsigned char>(line[0])) ||
          !std::isalpha(static_cast<unsigned char>(line[1]))) {
        throw FormatError("region map line " + std::to_string(line_no) +
                          ": expected ISO-3166 alpha-2 code, got '" +
                          std::string(line) + "'");
      }
      western.insert(std::string(line));
    } else if (section == Section::kMinorities) {
      minorities.insert(std::string(line));
    } else {
      throw FormatError("region map line " + std::to_string(line_no) +
                        ": entry outside of a section");
    }
  }
  RegionMap map(std::move(western), std::move(minorities));
  if (map.western_.empty()) throw FormatError("region map has no [western] entries");
  return map;
}

RegionMap RegionMap::Load(const std::string& path) { return Parse(ReadFile(path)); }

std::string RegionMap::Serialize() const {
  std::string out = "[western]\n";
  for (const auto& c : western_) out += c + "\n";
  out += "[minorities]\n";
  for (const auto& l : minorities_) out += l + "\n";
  return out;
}

std::string RegionMap::Hash() const { return Sha256Hex(Serialize()); }

bool RegionMap::IsWestern(std::string_view country_code) const {
  return western_.count(std::string(country_code)) > 0;
}

bool RegionMap::IsMinority(std::string_view label) const {
  return minorities_.count(NormalizeLabel(label)) > 0;
}

DemographicGroup ClassifyGroup(const PersonRecord& record, const RegionMap& map) {
  if (record.gender != Gender::kMan && record.gender != Gender::kWoman) {
    return DemographicGroup::kUnknown;
  }
  for (const auto& label : record.ethnic_groups) {
    if (map.IsMinority(label)) return MakeGroup(record.gender, OriginAxis::kPostColonial);
  }
  const std::string* country = nullptr;
  if (record.birth_country) {
    country = &*record.birth_country;
  } else if (!record.citizenship.empty()) {
    // "First" citizenship in canonical (sorted) order, so list order is
    // irrelevant.
    country = &*std::min_element(record.citizenship.begin(), record.citizenship.end());
  }
  if (country == nullptr) return DemographicGroup::kUnknown;
  return MakeGroup(record.gender, map.IsWestern(*country) ? OriginAxis::kWestern
                                                          : OriginAxis::kPostColonial);
}

// ---------------------------------------------------------------------------
// People Dataset I/O

namespace {

constexpr std::size_t kPersonFields = 8;

std::vector<std::string> SplitList(std::string_view field) {
  std::vector<std::string> out;
  if (Trim(field).empty()) return out;
  for (const auto& part : SplitString(field, '|')) {
    std::string_view p = Trim(part);
    if (!p.empty()) out.emplace_back(p);
  }
  return out;
}

std::optional<std::string> NormalizeCountry(std::string_view code) {
  code = Trim(code);
  if (code.size() != 2) return std::nullopt;
  std::string out;
  for (char c : code) {
    if (!std::isalpha(static_cast<unsigned char>(c))) return std::nullopt;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

bool HasControl(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n'; });
}

}  // namespace

std::optional<PersonRecord> ParsePersonLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = SplitString(line, '\t');
  if (fields.size() != kPersonFields) return std::nullopt;

  PersonRecord r;
  r.entity_id = std::string(Trim(fields[0]));
  r.primary_name = std::string(Trim(fields[1]));
  if (r.entity_id.empty() || r.primary_name.empty()) return std::nullopt;

  std::set<std::string> seen = {NormalizeText(r.primary_name)};
  for (auto& alias : SplitList(fields[2])) {
    if (seen.insert(NormalizeText(alias)).second) r.aliases.push_back(std::move(alias));
  }

  auto gender = ParseGender(fields[3]);
  if (!gender) return std::nullopt;
  r.gender = *gender;

  if (!Trim(fields[4]).empty()) {
    auto c = NormalizeCountry(fields[4]);
    if (!c) return std::nullopt;
    r.birth_country = *c;
  }
  for (const auto& code : SplitList(fields[5])) {
    auto c = NormalizeCountry(code);
    if (!c) return std::nullopt;
    r.citizenship.push_back(*c);
  }
  r.ethnic_groups = SplitList(fields[6]);
  r.occupations = SplitList(fields[7]);
  return r;
}

std::string FormatPersonLine(const PersonRecord& r) {
  std::string out = r.entity_id;
  out += '\t';
  out += r.primary_name;
  out += '\t';
  out += JoinStrings(r.aliases, "|");
  out += '\t';
  out += GenderName(r.gender);
  out += '\t';
  out += r.birth_country.value_or("");
  out += '\t';
  out += JoinStrings(r.citizenship, "|");
  out += '\t';
  out += JoinStrings(r.ethnic_groups, "|");
  out += '\t';
  out += JoinStrings(r.occupations, "|");
  return out;
}

PersonParseResult ParsePersonRecords(std::istream& in) {
  if (!in) throw IoError("people dataset stream is not readable");
  PersonParseResult result;
  std::set<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    ++result.lines;
    auto record = ParsePersonLine(line);
    if (!record || HasControl(record->primary_name) ||
        !ids.insert(record->entity_id).second) {
      ++result.skipped;
      continue;
    }
    result.records.push_back(std::move(*record));
  }
  if (in.bad()) throw IoError("read error in people dataset");
  if (result.lines > 0 && result.skipped * 2 > result.lines) {
    throw FormatError("people dataset: " + std::to_string(result.skipped) + " of " +
                      std::to_string(result.lines) + " lines malformed");
  }
  return result;
}

PersonParseResult LoadPersonRecords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open people dataset " + path);
  return ParsePersonRecords(in);
}

// ---------------------------------------------------------------------------
// Gazetteer

void Gazetteer::Insert(const std::string& surface, const std::vector<std::string>& tokens,
                       const std::string& id) {
  auto& ids = by_surface_[surface];
  if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
    ids.insert(std::upper_bound(ids.begin(), ids.end(), id), id);
  }
  surface_tokens_[surface] = tokens;
  if (tokens.empty()) return;
  int node = 0;
  for (const auto& tok : tokens) {
    auto it = trie_[node].children.find(tok);
    if (it == trie_[node].children.end()) {
      trie_.push_back(Node{});
      int child = static_cast<int>(trie_.size()) - 1;
      trie_[node].children.emplace(tok, child);
      node = child;
    } else {
      node = it->second;
    }
  }
  auto& node_ids = trie_[node].ids;
  if (std::find(node_ids.begin(), node_ids.end(), id) == node_ids.end()) {
    node_ids.insert(std::upper_bound(node_ids.begin(), node_ids.end(), id), id);
  }
  max_key_tokens_ = std::max(max_key_tokens_, tokens.size());
}

Gazetteer Gazetteer::Build(const std::vector<PersonRecord>& records) {
  Gazetteer g;
  for (const auto& r : records) {
    auto add = [&](const std::string& name) {
      std::string key = NormalizeText(name);
      if (key.empty()) return;
      g.Insert(key, TokenNorms(name), r.entity_id);
    };
    add(r.primary_name);
    for (const auto& a : r.aliases) add(a);
  }
  return g;
}

const std::vector<std::string>* Gazetteer::Lookup(std::string_view surface) const {
  auto it = by_surface_.find(NormalizeText(surface));
  return it == by_surface_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* Gazetteer::LookupTokens(
    const std::vector<std::string>& tokens) const {
  int node = 0;
  for (const auto& t : tokens) {
    node = Child(node, t);
    if (node < 0) return nullptr;
  }
  return NodeIds(node);
}

int Gazetteer::Child(int node, const std::string& token) const {
  const auto& children = trie_[static_cast<std::size_t>(node)].children;
  auto it = children.find(token);
  return it == children.end() ? -1 : it->second;
}

const std::vector<std::string>* Gazetteer::NodeIds(int node) const {
  const auto& ids = trie_[static_cast<std::size_t>(node)].ids;
  return ids.empty() ? nullptr : &ids;
}

std::string Gazetteer::Serialize() const {
  std::string out;
  for (const auto& [surface, ids] : by_surface_) {
    out += surface;
    out += '\t';
    out += JoinStrings(surface_tokens_.at(surface), " ");
    out += '\t';
    out += JoinStrings(ids, "|");
    out += '\n';
  }
  return out;
}

Gazetteer Gazetteer::Deserialize(std::string_view text) {
  Gazetteer g;
  int line_no = 0;
  for (const auto& line : SplitString(text, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = SplitString(line, '\t');
    if (fields.size() != 3) {
      throw FormatError("gazetteer line " + std::to_string(line_no) + ": expected 3 fields");
    }
    std::vector<std::string> tokens;
    if (!fields[1].empty()) tokens = SplitString(fields[1], ' ');
    for (const auto& id : SplitString(fields[2], '|')) {
      if (!id.empty()) g.Insert(fields[0], tokens, id);
    }
  }
  return g;
}

KbStats ComputeKbStats(const std::vector<PersonRecord>& records, const RegionMap& map) {
  KbStats stats;
  for (const auto& r : records) {
    ++stats.per_group[static_cast<std::size_t>(ClassifyGroup(r, map))];
  }
  stats.total = records.size();
  return stats;
}

}  // namespace filter_audit
