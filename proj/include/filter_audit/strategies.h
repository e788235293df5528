#ifndef FILTER_AUDIT_STRATEGIES_H_
#define FILTER_AUDIT_STRATEGIES_H_

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "filter_audit/ingest.h"
#include "filter_audit/lexicon.h"
#include "filter_audit/model.h"
#include "filter_audit/toxicity.h"

namespace filter_audit {

enum class StrategyCategory { kRuleBased, kClassifierBased, kQualityBased };

const char* CategoryName(StrategyCategory c);

struct StrategyId {
  StrategyCategory category;
  std::string name;

  bool operator==(const StrategyId&) const = default;
};

// The seven strategies in report order.
inline constexpr std::array<std::string_view, 7> kStrategyNames = {
    "shutterstock", "hatebase", "perspective", "fasttext", "profanity",
    "quality_wiki", "quality_webtext"};

// Category for a known strategy name; ValidationError otherwise.
StrategyId MakeStrategyId(std::string_view name);

// A sentence, or a whole document when sentence_index is empty.
struct UnitRef {
  std::string doc_id;
  std::optional<std::size_t> sentence_index;

  auto operator<=>(const UnitRef&) const = default;
};

struct StrategyVerdict {
  UnitRef unit;
  bool flagged = false;
  bool scored = true;  // false: the scorer failed and the unit is excluded
  std::optional<double> score;
  std::vector<std::string> matched_terms;

  bool operator==(const StrategyVerdict&) const = default;
};

class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual const StrategyId& id() const = 0;
  // Sentence strategies emit one verdict per sentence, document strategies
  // one verdict for the document.
  virtual std::vector<StrategyVerdict> Evaluate(const Document& doc) const = 0;
};

class LexiconStrategy : public Strategy {
 public:
  LexiconStrategy(std::string name, LexiconMatcher matcher);
  const StrategyId& id() const override { return id_; }
  std::vector<StrategyVerdict> Evaluate(const Document& doc) const override;
  const LexiconMatcher& matcher() const { return matcher_; }

 private:
  StrategyId id_;
  LexiconMatcher matcher_;
};

class ClassifierStrategy : public Strategy {
 public:
  ClassifierStrategy(std::string name, HashedLinearModel model, double tau);
  const StrategyId& id() const override { return id_; }
  std::vector<StrategyVerdict> Evaluate(const Document& doc) const override;

 private:
  StrategyId id_;
  HashedLinearModel model_;
  double tau_;
};

// Classifier backed by the external toxicity client.
class ExternalToxicityStrategy : public Strategy {
 public:
  ExternalToxicityStrategy(std::string name, ToxicityClient& client, double tau);
  const StrategyId& id() const override { return id_; }
  std::vector<StrategyVerdict> Evaluate(const Document& doc) const override;

 private:
  StrategyId id_;
  ToxicityClient& client_;
  double tau_;
};

// Flags a document for removal when its quality score is below tau_q.
class QualityStrategy : public Strategy {
 public:
  QualityStrategy(std::string name, HashedLinearModel model, double tau_q);
  const StrategyId& id() const override { return id_; }
  std::vector<StrategyVerdict> Evaluate(const Document& doc) const override;

 private:
  StrategyId id_;
  HashedLinearModel model_;
  double tau_q_;
};

StrategyVerdict QualityGate(const Document& doc, const HashedLinearModel& model, double tau_q);

// Smallest threshold from the score set such that removing p < tau drops
// round(target * n) documents. Ties can push the realized rate off target.
double CalibrateQualityThreshold(std::vector<double> scores, double target_removal);

// Fraction of scores strictly below tau.
double RemovalFraction(const std::vector<double>& scores, double tau);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_STRATEGIES_H_
