#include "filter_audit/strategies.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "filter_audit/util.h"

namespace filter_audit {

const char* CategoryName(StrategyCategory c) {
  switch (c) {
    case StrategyCategory::kRuleBased: return "rule-based";
    case StrategyCategory::kClassifierBased: return "classifier-based";
    case StrategyCategory::kQualityBased: return "quality-based";
  }
  return "rule-based";
}

StrategyId MakeStrategyId(std::string_view name) {
  if (name == "shutterstock" || name == "hatebase") {
    return {StrategyCategory::kRuleBased, std::string(name)};
  }
  if (name == "perspective" || name == "fasttext" || name == "profanity") {
    return {StrategyCategory::kClassifierBased, std::string(name)};
  }
  if (name == "quality_wiki" || name == "quality_webtext") {
    return {StrategyCategory::kQualityBased, std::string(name)};
  }
  throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

namespace {

void CheckUnitInterval(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(what) + " must lie in [0,1], got " + FormatDouble17(v));
  }
}

std::vector<std::string> Norms(const Sentence& s) {
  std::vector<std::string> out;
  out.reserve(s.tokens.size());
  for (const auto& t : s.tokens) out.push_back(t.norm);
  return out;
}

}  // namespace

LexiconStrategy::LexiconStrategy(std::string name, LexiconMatcher matcher)
    : id_(MakeStrategyId(name)), matcher_(std::move(matcher)) {}

std::vector<StrategyVerdict> LexiconStrategy::Evaluate(const Document& doc) const {
  std::vector<StrategyVerdict> out;
  for (const auto& s : doc.sentences) {
    StrategyVerdict v;
    v.unit = {doc.doc_id, s.index};
    v.matched_terms = matcher_.MatchedTerms(Norms(s));
    v.flagged = !v.matched_terms.empty();
    out.push_back(std::move(v));
  }
  return out;
}

ClassifierStrategy::ClassifierStrategy(std::string name, HashedLinearModel model, double tau)
    : id_(MakeStrategyId(name)), model_(std::move(model)), tau_(tau) {
  CheckUnitInterval(tau, "classifier threshold");
}

std::vector<StrategyVerdict> ClassifierStrategy::Evaluate(const Document& doc) const {
  std::vector<StrategyVerdict> out;
  for (const auto& s : doc.sentences) {
    StrategyVerdict v;
    v.unit = {doc.doc_id, s.index};
    double p = model_.PredictProba(HashFeatures(Norms(s), model_.dim()));
    v.score = p;
    v.flagged = ThresholdFlag(p, tau_);
    out.push_back(std::move(v));
  }
  return out;
}

ExternalToxicityStrategy::ExternalToxicityStrategy(std::string name, ToxicityClient& client,
                                                   double tau)
    : id_(MakeStrategyId(name)), client_(client), tau_(tau) {
  CheckUnitInterval(tau, "toxicity threshold");
}

std::vector<StrategyVerdict> ExternalToxicityStrategy::Evaluate(const Document& doc) const {
  std::vector<StrategyVerdict> out;
  for (const auto& s : doc.sentences) {
    StrategyVerdict v;
    v.unit = {doc.doc_id, s.index};
    if (auto p = client_.Score(s.text)) {
      v.score = *p;
      v.flagged = ThresholdFlag(*p, tau_);
    } else {
      v.scored = false;
    }
    out.push_back(std::move(v));
  }
  return out;
}

QualityStrategy::QualityStrategy(std::string name, HashedLinearModel model, double tau_q)
    : id_(MakeStrategyId(name)), model_(std::move(model)), tau_q_(tau_q) {
  CheckUnitInterval(tau_q, "quality threshold");
}

std::vector<StrategyVerdict> QualityStrategy::Evaluate(const Document& doc) const {
  return {QualityGate(doc, model_, tau_q_)};
}

StrategyVerdict QualityGate(const Document& doc, const HashedLinearModel& model, double tau_q) {
  StrategyVerdict v;
  v.unit = {doc.doc_id, std::nullopt};
  double p = model.PredictProba(doc.Text());
  v.score = p;
  v.flagged = p < tau_q;
  return v;
}

double CalibrateQualityThreshold(std::vector<double> scores, double target_removal) {
  CheckUnitInterval(target_removal, "target removal rate");
  if (scores.empty()) throw ValidationError("calibration needs at least one score");
  std::sort(scores.begin(), scores.end());
  auto k = static_cast<std::size_t>(std::llround(target_removal * static_cast<double>(scores.size())));
  if (k == 0) return scores.front() > 0.0 ? std::min(scores.front(), 1.0) : 0.0;
  if (k >= scores.size()) {
    return std::min(1.0, std::nextafter(scores.back(), std::numeric_limits<double>::infinity()));
  }
  return scores[k];
}

double RemovalFraction(const std::vector<double>& scores, double tau) {
  if (scores.empty()) return 0.0;
  std::size_t n = static_cast<std::size_t>(
      std::count_if(scores.begin(), scores.end(), [&](double s) { return s < tau; }));
  return static_cast<double>(n) / static_cast<double>(scores.size());
}

}  // namespace filter_audit
