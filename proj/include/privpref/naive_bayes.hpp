#pragma once

#include "json.hpp"
#include "privpref/classifier.hpp"

namespace privpref {

// Categorical Naive Bayes with Laplace smoothing over the fixed 3-class
// space. Numeric features are discretized into at most 4 quartile bins whose
// edges come from the training data.
struct NbModel {
  FeatureSchema schema;
  std::array<double, kNumChoices> class_priors{};
  // conditionals[f][value][class]; value indexes the categorical domain or
  // the quartile bin.
  std::vector<std::vector<std::array<double, kNumChoices>>> conditionals;
  std::vector<std::vector<double>> bin_edges;  // per feature; empty for cats
  double smoothing = 1.0;

  size_t bin_of(size_t feature, double value) const;
  size_t value_index(size_t feature, const CellValue& v) const;

  nlohmann::json to_json() const;
  static NbModel from_json(const nlohmann::json& j);
};

// Throws EmptyTrainingSetError on empty/unlabeled input and
// ConfigInvalidError when smoothing < 1.
NbModel nb_fit(const LabeledDataset& train, double smoothing = 1.0);

// Log-space class scores normalized to probabilities; mathematically the
// Bayes posterior under per-feature independence.
ProbVector nb_posterior(const NbModel& model, const PrivacyRecord& r);

class NaiveBayesClassifier : public Classifier {
 public:
  void fit(const LabeledDataset& train, uint64_t seed) override;
  ProbVector predict_proba(const PrivacyRecord& r) const override;
  std::string kind() const override { return "nb"; }

  const NbModel& model() const { return model_; }
  void set_model(NbModel m) { model_ = std::move(m); }

 private:
  NbModel model_;
};

}  // namespace privpref
