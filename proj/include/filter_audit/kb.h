#ifndef FILTER_AUDIT_KB_H_
#define FILTER_AUDIT_KB_H_

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace filter_audit {

enum class Gender { kMan, kWoman, kOther, kUnknown };

const char* GenderName(Gender g);
std::optional<Gender> ParseGender(std::string_view s);

// One knowledge-base person. Country codes are uppercase ISO-3166 alpha-2.
struct PersonRecord {
  std::string entity_id;
  std::string primary_name;
  std::vector<std::string> aliases;
  Gender gender = Gender::kUnknown;
  std::optional<std::string> birth_country;
  std::vector<std::string> citizenship;
  std::vector<std::string> ethnic_groups;
  std::vector<std::string> occupations;

  bool operator==(const PersonRecord&) const = default;
};

// The four gender x origin cells plus the Unknown sentinel. Unknown is kept
// out of group statistics and reported as coverage.
enum class DemographicGroup {
  kWesternMan = 0,
  kPostColonialMan = 1,
  kWesternWoman = 2,
  kPostColonialWoman = 3,
  kUnknown = 4,
};

inline constexpr std::array<DemographicGroup, 4> kReportedGroups = {
    DemographicGroup::kWesternMan, DemographicGroup::kPostColonialMan,
    DemographicGroup::kWesternWoman, DemographicGroup::kPostColonialWoman};

enum class OriginAxis { kWestern, kPostColonial };

DemographicGroup MakeGroup(Gender gender, OriginAxis origin);
// Stable machine key, e.g. "western_women".
const char* GroupKey(DemographicGroup g);
// Column header abbreviation, e.g. "w.w.".
const char* GroupAbbrev(DemographicGroup g);
std::optional<DemographicGroup> GroupFromKey(std::string_view key);

// Which countries count as Western and which ethnic-group labels mark a
// Post-colonial minority living in a Western country.
class RegionMap {
 public:
  RegionMap() = default;
  RegionMap(std::set<std::string> western_countries,
            std::set<std::string> minority_labels);

  // EU/EFTA/UK, US, CA, AU, NZ plus a small starter minority list.
  static RegionMap Default();
  // Plain-text config: one entry per line under [western] / [minorities].
  static RegionMap Parse(std::string_view text);
  static RegionMap Load(const std::string& path);

  std::string Serialize() const;
  // SHA-256 of the canonical serialization.
  std::string Hash() const;

  bool empty() const { return western_.empty() && minorities_.empty(); }
  bool IsWestern(std::string_view country_code) const;
  bool IsMinority(std::string_view label) const;

  const std::set<std::string>& western_countries() const { return western_; }
  const std::set<std::string>& minority_labels() const { return minorities_; }

  // Casefold, trim, collapse whitespace, and treat '-' / '_' as spaces.
  static std::string NormalizeLabel(std::string_view label);

 private:
  std::set<std::string> western_;
  std::set<std::string> minorities_;
};

// Precedence: minority ethnic group > birth country > first citizenship.
DemographicGroup ClassifyGroup(const PersonRecord& record, const RegionMap& map);

struct PersonParseResult {
  std::vector<PersonRecord> records;
  std::size_t skipped = 0;
  std::size_t lines = 0;  // non-blank lines seen
};

// Tab-separated People Dataset reader. Malformed lines are skipped and
// counted; more than half malformed is a FormatError.
PersonParseResult ParsePersonRecords(std::istream& in);
PersonParseResult LoadPersonRecords(const std::string& path);

// Parses one line; nullopt if malformed.
std::optional<PersonRecord> ParsePersonLine(std::string_view line);
std::string FormatPersonLine(const PersonRecord& record);

// Name table: normalized surface form -> candidate entity ids. Also indexes
// each surface as a token sequence for mention detection.
class Gazetteer {
 public:
  static Gazetteer Build(const std::vector<PersonRecord>& records);

  // Exact lookup on NormalizeText(surface). Ids are sorted.
  const std::vector<std::string>* Lookup(std::string_view surface) const;
  // Lookup keyed by a token-norm sequence.
  const std::vector<std::string>* LookupTokens(
      const std::vector<std::string>& tokens) const;

  std::size_t size() const { return by_surface_.size(); }
  std::size_t max_key_tokens() const { return max_key_tokens_; }

  // Walks the token trie. Returns the node id for `token` as a child of
  // `node` (root = 0) or -1.
  int Child(int node, const std::string& token) const;
  const std::vector<std::string>* NodeIds(int node) const;

  // "surface TAB token-seq TAB ids" lines sorted by surface.
  std::string Serialize() const;
  static Gazetteer Deserialize(std::string_view text);

  const std::map<std::string, std::vector<std::string>>& entries() const {
    return by_surface_;
  }

 private:
  void Insert(const std::string& surface, const std::vector<std::string>& tokens,
              const std::string& id);

  struct Node {
    std::unordered_map<std::string, int> children;
    std::vector<std::string> ids;
  };

  std::map<std::string, std::vector<std::string>> by_surface_;
  std::map<std::string, std::vector<std::string>> surface_tokens_;
  std::vector<Node> trie_{Node{}};
  std::size_t max_key_tokens_ = 0;
};

struct KbStats {
  std::array<std::size_t, 5> per_group{};  // indexed by DemographicGroup
  std::size_t total = 0;
  bool operator==(const KbStats&) const = default;
};

KbStats ComputeKbStats(const std::vector<PersonRecord>& records, const RegionMap& map);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_KB_H_
