#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "privpref/classifier.hpp"
#include "privpref/encoding.hpp"

namespace privpref {

struct MlpConfig {
  size_t hidden1 = 32;
  size_t hidden2 = 16;
  double learning_rate = 0.05;
  size_t epochs = 30;
  size_t batch_size = 32;
  uint64_t seed = 0;

  void validate() const;
};

// Two hidden ReLU layers and a softmax output; weights are row-major.
struct MlpParams {
  size_t input_width = 0;
  size_t hidden1 = 0;
  size_t hidden2 = 0;
  std::vector<double> w1, b1;  // hidden1 x input_width, hidden1
  std::vector<double> w2, b2;  // hidden2 x hidden1, hidden2
  std::vector<double> w3, b3;  // 3 x hidden2, 3

  static MlpParams zeros(size_t input_width, size_t h1, size_t h2);

  size_t param_count() const;
  // Flat view in the fixed order w1, b1, w2, b2, w3, b3.
  std::vector<double> flatten() const;
  void unflatten(std::span<const double> flat);

  bool all_finite() const;

  nlohmann::json to_json() const;
  static MlpParams from_json(const nlohmann::json& j);
};

struct MlpActivations {
  std::vector<double> h1, h2;
  ProbVector probs;
};

// h1 = relu(W1 x + b1); h2 = relu(W2 h1 + b2); probs = softmax(W3 h2 + b3),
// computed with max subtraction so large logits cannot overflow.
MlpActivations mlp_forward(const MlpParams& p, std::span<const double> x);

// -sum_i y_i log(max(yhat_i, 1e-12)).
double cross_entropy(const ProbVector& yhat, const ProbVector& onehot);
double cross_entropy(const ProbVector& yhat, size_t true_class);

// Mean cross-entropy over the batch plus its gradient w.r.t. every parameter.
double mlp_loss_and_gradients(const MlpParams& p,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<size_t>& ys,
                              MlpParams* gradients);
double mlp_batch_loss(const MlpParams& p,
                      const std::vector<std::vector<double>>& xs,
                      const std::vector<size_t>& ys);

struct MlpTrainTrace {
  std::vector<double> epoch_loss;  // full-train loss after each epoch
  double initial_loss = 0.0;
};

// Uniform(-s, s) initialization with s = sqrt(6 / (fan_in + fan_out)) per
// layer, per-epoch seed-derived shuffling, plain mini-batch gradient descent.
// Throws NonFiniteLossError with the offending batch if the loss diverges.
MlpParams mlp_train(const MlpConfig& cfg, const LabeledDataset& train,
                    MlpTrainTrace* trace = nullptr);

class MlpClassifier : public Classifier {
 public:
  explicit MlpClassifier(MlpConfig cfg = {}) : cfg_(cfg) {}

  void fit(const LabeledDataset& train, uint64_t seed) override;
  ProbVector predict_proba(const PrivacyRecord& r) const override;
  std::string kind() const override { return "mlp"; }

  const MlpParams& params() const { return params_; }
  void set_model(const FeatureSchema& schema, MlpParams params);

 private:
  MlpConfig cfg_;
  MlpParams params_;
  std::optional<OneHotEncoder> encoder_;
};

}  // namespace privpref
