#ifndef FILTER_AUDIT_MODEL_H_
#define FILTER_AUDIT_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace filter_audit {

// Sparse vector as (bucket, value) pairs with ascending, unique buckets.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool operator==(const SparseVector&) const = default;
};

// Unigram and adjacent-bigram ("a b") counts, hashed with FNV-1a 64 into
// `dim` buckets and L2-normalized.
SparseVector HashFeatures(const std::vector<std::string>& tokens, std::size_t dim);

struct TrainingMeta {
  std::size_t epochs = 0;
  double learning_rate = 0.0;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  std::string positive_class;
  std::vector<double> loss_curve;  // mean log loss after each epoch

  bool operator==(const TrainingMeta&) const = default;
};

struct LabeledExample {
  SparseVector x;
  int y = 0;  // 1 positive, 0 negative
};

class HashedLinearModel {
 public:
  static constexpr const char* kHashName = "fnv1a64-unigram-bigram-l2";

  HashedLinearModel() = default;
  explicit HashedLinearModel(std::size_t dim) : weights_(dim, 0.0) {}

  std::size_t dim() const { return weights_.size(); }
  std::vector<double>& weights() { return weights_; }
  const std::vector<double>& weights() const { return weights_; }
  double& bias() { return bias_; }
  double bias() const { return bias_; }
  TrainingMeta& meta() { return meta_; }
  const TrainingMeta& meta() const { return meta_; }

  double Logit(const SparseVector& x) const;
  double PredictProba(const SparseVector& x) const;
  // Tokenizes and hashes `text` first.
  double PredictProba(std::string_view text) const;

  // Layout: "FAHLM001", u64 dim, dim x f64 weights, f64 bias, u64 n, n bytes
  // of JSON metadata. Integers and floats little-endian.
  std::string Serialize() const;
  static HashedLinearModel Deserialize(std::string_view bytes);
  void Save(const std::filesystem::path& path) const;
  static HashedLinearModel Load(const std::filesystem::path& path);

  bool operator==(const HashedLinearModel&) const = default;

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
  TrainingMeta meta_;
};

double Sigmoid(double z);

// Log loss of one example (plus the L2 term when l2 > 0).
double ExampleLoss(const HashedLinearModel& model, const LabeledExample& ex, double l2 = 0.0);

struct Gradient {
  std::vector<double> weights;  // dense, length dim
  double bias = 0.0;
};
Gradient ExampleGradient(const HashedLinearModel& model, const LabeledExample& ex,
                         double l2 = 0.0);

double MeanLoss(const HashedLinearModel& model, const std::vector<LabeledExample>& data,
                double l2 = 0.0);

struct TrainOptions {
  std::size_t dim = 1000;
  std::size_t epochs = 10;
  double learning_rate = 0.5;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  std::string positive_class = "positive";
};

// Logistic regression by shuffled SGD. Throws ValidationError on an empty
// class and RuntimeError if the loss stops being finite.
HashedLinearModel TrainLinear(const std::vector<std::string>& positive,
                              const std::vector<std::string>& negative,
                              const TrainOptions& options);

HashedLinearModel TrainLinearExamples(std::vector<LabeledExample> data,
                                      const TrainOptions& options);

// Training corpus file: "label TAB text" per line, label 0 or 1.
struct LabeledTexts {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
};
LabeledTexts LoadLabeledTexts(const std::filesystem::path& path);

bool ThresholdFlag(double p, double tau);

}  // namespace filter_audit

#endif  // FILTER_AUDIT_MODEL_H_
