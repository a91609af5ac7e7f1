#pragma once

#include <memory>
#include <optional>

#include "privpref/classifier.hpp"
#include "privpref/metrics.hpp"
#include "privpref/mlp.hpp"
#include "privpref/rl.hpp"

namespace privpref {

struct SplitSpec {
  double train_frac = 0.8;
  double val_frac = 0.1;
  double test_frac = 0.1;
  bool stratified = true;
  uint64_t seed = 0;

  void validate() const;
};

struct SplitResult {
  LabeledDataset train, val, test;
};

// Disjoint covering partition; val/test sizes are the rounded fractions with
// the remainder going to train. Membership is a seed-determined shuffle;
// each part keeps the original record order. Stratification holds every
// class's share of val/test within one record of its proportional quota.
SplitResult make_split(const LabeledDataset& ds, const SplitSpec& spec);

// Stratified fold assignment, one entry per record; fold sizes differ by at
// most one globally and per class.
std::vector<size_t> kfold(const LabeledDataset& ds, size_t k, uint64_t seed);

struct MetricsReport {
  std::string model;
  size_t dataset_size = 0;
  std::vector<MetricsFragment> folds;
  MetricsFragment aggregate;  // pooled confusion over the CV folds
  std::optional<MetricsFragment> test;  // fit on the full 90%, scored on test
  std::optional<std::vector<double>> cumulative_reward;
  uint64_t seed = 0;
  std::string config_digest;
  double wall_clock_ms = 0.0;

  nlohmann::json to_json() const;
  // Canonical bytes with the wall-clock field removed; what the digest and
  // byte-identity guarantees cover.
  std::string digest_payload() const;
};

// Everything a model kind needs besides the training data.
struct ModelContext {
  const GeneratorConfig* gen_config = nullptr;  // personas; required for "q"
  RlConfig rl_config;
  MlpConfig mlp_config;
  double nb_smoothing = 1.0;
  // When set, the q policy's training budget scales with the data size:
  // episodes = clamp(size / 5, 20, 4000) with 200-step episodes.
  std::optional<size_t> nominal_size;
};

// kinds: "nb", "mlp", "rule", "q".
std::unique_ptr<Classifier> make_classifier(const std::string& kind,
                                            const ModelContext& ctx);

// 80/10/10 split, K-fold CV over the train+val 90%, held-out test block.
MetricsReport evaluate_model_cv(const std::string& kind,
                                const LabeledDataset& ds, size_t folds,
                                uint64_t master_seed, const ModelContext& ctx,
                                const std::string& config_digest = "");

LabeledDataset prefix_dataset(const LabeledDataset& ds, size_t n);

}  // namespace privpref
