#pragma once

#include <array>
#include <memory>
#include <string>

#include "privpref/dataset.hpp"

namespace privpref {

// Probability vector over (Allow, Deny, Ask) in fixed class order.
using ProbVector = std::array<double, kNumChoices>;

// First maximum wins, so ties resolve Allow < Deny < Ask.
inline PrivacyChoice argmax_choice(const ProbVector& p) {
  size_t best = 0;
  for (size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return choice_from_index(best);
}

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void fit(const LabeledDataset& train, uint64_t seed) = 0;
  virtual ProbVector predict_proba(const PrivacyRecord& r) const = 0;
  virtual std::string kind() const = 0;

  PrivacyChoice predict(const PrivacyRecord& r) const {
    return argmax_choice(predict_proba(r));
  }
};

}  // namespace privpref
