#include "filter_audit/model.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <random>

#include "filter_audit/text.h"
#include "filter_audit/util.h"
#include "json.hpp"

namespace filter_audit {

using nlohmann::json;

namespace {

constexpr std::string_view kMagic = "FAHLM001";

void PutU64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutF64(std::string& out, double d) { PutU64(out, std::bit_cast<std::uint64_t>(d)); }

class ByteReader {
 public:
  explicit ByteReader(std::string_view b) : b_(b) {}
  std::uint64_t U64() {
    if (b_.size() - pos_ < 8) throw FormatError("model file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + static_cast<std::size_t>(i)]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string_view Bytes(std::size_t n) {
    if (b_.size() - pos_ < n) throw FormatError("model file truncated");
    auto s = b_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == b_.size(); }

 private:
  std::string_view b_;
  std::size_t pos_ = 0;
};

}  // namespace

SparseVector HashFeatures(const std::vector<std::string>& tokens, std::size_t dim) {
  SparseVector v;
  if (dim == 0) throw ValidationError("feature dimension must be at least 1");
  std::map<std::uint32_t, double> counts;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    counts[static_cast<std::uint32_t>(Fnv1a64(tokens[i]) % dim)] += 1.0;
    if (i + 1 < tokens.size()) {
      std::string bigram = tokens[i] + " " + tokens[i + 1];
      counts[static_cast<std::uint32_t>(Fnv1a64(bigram) % dim)] += 1.0;
    }
  }
  double norm = 0.0;
  for (const auto& [b, c] : counts) norm += c * c;
  norm = std::sqrt(norm);
  for (const auto& [b, c] : counts) v.entries.emplace_back(b, c / norm);
  return v;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double HashedLinearModel::Logit(const SparseVector& x) const {
  double z = bias_;
  for (const auto& [b, v] : x.entries) z += weights_[b] * v;
  return z;
}

double HashedLinearModel::PredictProba(const SparseVector& x) const { return Sigmoid(Logit(x)); }

double HashedLinearModel::PredictProba(std::string_view text) const {
  return PredictProba(HashFeatures(TokenNorms(text), dim()));
}

std::string HashedLinearModel::Serialize() const {
  std::string out(kMagic);
  PutU64(out, weights_.size());
  for (double w : weights_) PutF64(out, w);
  PutF64(out, bias_);
  json meta = {{"hash", kHashName},
               {"features", "unigram+bigram"},
               {"epochs", meta_.epochs},
               {"learning_rate", FormatDouble17(meta_.learning_rate)},
               {"l2", FormatDouble17(meta_.l2)},
               {"seed", meta_.seed},
               {"positive_class", meta_.positive_class}};
  json curve = json::array();
  for (double l : meta_.loss_curve) curve.push_back(FormatDouble17(l));
  meta["loss_curve"] = curve;
  std::string m = meta.dump();
  PutU64(out, m.size());
  out += m;
  return out;
}

HashedLinearModel HashedLinearModel::Deserialize(std::string_view bytes) {
  if (bytes.substr(0, kMagic.size()) != kMagic) throw FormatError("not a model file (bad magic)");
  ByteReader r(bytes.substr(kMagic.size()));
  std::uint64_t dim = r.U64();
  if (dim == 0 || dim > (std::uint64_t{1} << 28)) throw FormatError("model dim out of range");
  HashedLinearModel m(static_cast<std::size_t>(dim));
  for (auto& w : m.weights_) {
    w = r.F64();
    if (!std::isfinite(w)) throw FormatError("model weight not finite");
  }
  m.bias_ = r.F64();
  std::uint64_t n = r.U64();
  json meta = json::parse(r.Bytes(static_cast<std::size_t>(n)), nullptr, false);
  if (!r.done()) throw FormatError("trailing bytes after model metadata");
  if (meta.is_discarded() || !meta.is_object()) throw FormatError("model metadata is not JSON");
  if (meta.value("hash", "") != kHashName) throw FormatError("unsupported feature hash");
  try {
    m.meta_.epochs = meta.at("epochs").get<std::size_t>();
    m.meta_.learning_rate = std::stod(meta.at("learning_rate").get<std::string>());
    m.meta_.l2 = std::stod(meta.at("l2").get<std::string>());
    m.meta_.seed = meta.at("seed").get<std::uint64_t>();
    m.meta_.positive_class = meta.at("positive_class").get<std::string>();
    for (const auto& l : meta.at("loss_curve")) m.meta_.loss_curve.push_back(std::stod(l.get<std::string>()));
  } catch (const std::exception& e) {
    throw FormatError(std::string("bad model metadata: ") + e.what());
  }
  return m;
}

void HashedLinearModel::Save(const std::filesystem::path& path) const {
  WriteFileAtomic(path, Serialize());
}

HashedLinearModel HashedLinearModel::Load(const std::filesystem::path& path) {
  return Deserialize(ReadFile(path));
}

double ExampleLoss(const HashedLinearModel& model, const LabeledExample& ex, double l2) {
  double z = model.Logit(ex.x);
  // log(1 + exp(-z)) for y=1, log(1 + exp(z)) for y=0, computed stably.
  double s = ex.y == 1 ? -z : z;
  double loss = s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  if (l2 > 0) {
    double sq = 0.0;
    for (double w : model.weights()) sq += w * w;
    loss += 0.5 * l2 * sq;
  }
  return loss;
}

Gradient ExampleGradient(const HashedLinearModel& model, const LabeledExample& ex, double l2) {
  Gradient g;
  g.weights.assign(model.dim(), 0.0);
  double err = model.PredictProba(ex.x) - static_cast<double>(ex.y);
  for (const auto& [b, v] : ex.x.entries) g.weights[b] += err * v;
  if (l2 > 0) {
    for (std::size_t i = 0; i < model.dim(); ++i) g.weights[i] += l2 * model.weights()[i];
  }
  g.bias = err;
  return g;
}

double MeanLoss(const HashedLinearModel& model, const std::vector<LabeledExample>& data,
                double l2) {
  double total = 0.0;
  for (const auto& ex : data) total += ExampleLoss(model, ex, 0.0);
  double loss = total / static_cast<double>(data.size());
  if (l2 > 0) {
    double sq = 0.0;
    for (double w : model.weights()) sq += w * w;
    loss += 0.5 * l2 * sq;
  }
  return loss;
}

HashedLinearModel TrainLinearExamples(std::vector<LabeledExample> data,
                                      const TrainOptions& options) {
  bool has_pos = false;
  bool has_neg = false;
  for (const auto& ex : data) (ex.y == 1 ? has_pos : has_neg) = true;
  if (!has_pos || !has_neg) throw ValidationError("training needs both classes non-empty");
  if (!(options.learning_rate > 0) || !std::isfinite(options.learning_rate)) {
    throw ValidationError("learning rate must be positive");
  }

  HashedLinearModel model(options.dim);
  model.meta().epochs = options.epochs;
  model.meta().learning_rate = options.learning_rate;
  model.meta().l2 = options.l2;
  model.meta().seed = options.seed;
  model.meta().positive_class = options.positive_class;

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  auto& w = model.weights();
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    DeterministicShuffle(order, rng);
    for (std::size_t i : order) {
      const auto& ex = data[i];
      double err = model.PredictProba(ex.x) - static_cast<double>(ex.y);
      double lr = options.learning_rate;
      if (options.l2 > 0) {
        // Weight decay.
        double decay = 1.0 - lr * options.l2;
        for (double& wi : w) wi *= decay;
      }
      for (const auto& [b, v] : ex.x.entries) w[b] -= lr * err * v;
      model.bias() -= lr * err;
    }
    double loss = MeanLoss(model, data, options.l2);
    if (!std::isfinite(loss)) {
      throw RuntimeError("training loss became non-finite at epoch " + std::to_string(epoch + 1) +
                         " (lr " + FormatDouble17(options.learning_rate) + ", bias " +
                         FormatDouble17(model.bias()) + ")");
    }
    model.meta().loss_curve.push_back(loss);
  }
  return model;
}

HashedLinearModel TrainLinear(const std::vector<std::string>& positive,
                              const std::vector<std::string>& negative,
                              const TrainOptions& options) {
  if (positive.empty() || negative.empty()) {
    throw ValidationError("training needs both classes non-empty");
  }
  std::vector<LabeledExample> data;
  data.reserve(positive.size() + negative.size());
  for (const auto& t : positive) data.push_back({HashFeatures(TokenNorms(t), options.dim), 1});
  for (const auto& t : negative) data.push_back({HashFeatures(TokenNorms(t), options.dim), 0});
  return TrainLinearExamples(std::move(data), options);
}

LabeledTexts LoadLabeledTexts(const std::filesystem::path& path) {
  LabeledTexts out;
  std::size_t lineno = 0;
  for (const auto& line : SplitString(ReadFile(path), '\n')) {
    ++lineno;
    if (Trim(line).empty()) continue;
    std::size_t tab = line.find('\t');
    std::string_view label = tab == std::string::npos ? std::string_view() : Trim(std::string_view(line).substr(0, tab));
    if (label != "0" && label != "1") {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected 'label<TAB>text'");
    }
    (label == "1" ? out.positive : out.negative).push_back(line.substr(tab + 1));
  }
  return out;
}

bool ThresholdFlag(double p, double tau) { return p >= tau; }

}  // namespace filter_audit
