#pragma once

#include <array>
#include <vector>

#include "json.hpp"
#include "privpref/choice.hpp"

namespace privpref {

// 3x3 counts, rows = true class, columns = predicted, order Allow/Deny/Ask.
struct ConfusionMatrix {
  std::array<std::array<uint64_t, kNumChoices>, kNumChoices> counts{};

  void add(PrivacyChoice truth, PrivacyChoice predicted) {
    ++counts[choice_index(truth)][choice_index(predicted)];
  }
  void merge(const ConfusionMatrix& o);
  uint64_t total() const;
  uint64_t trace() const;

  nlohmann::json to_json() const;
  static ConfusionMatrix from_json(const nlohmann::json& j);

  bool operator==(const ConfusionMatrix&) const = default;
};

// Per-class and macro-averaged rates; zero denominators yield 0.
struct MetricsFragment {
  double accuracy = 0.0;
  double macro_recall = 0.0;
  double macro_precision = 0.0;
  double macro_f1 = 0.0;
  std::array<double, kNumChoices> recall{};
  std::array<double, kNumChoices> precision{};
  std::array<double, kNumChoices> f1{};
  ConfusionMatrix confusion;

  nlohmann::json to_json() const;
};

MetricsFragment metrics_from_confusion(const ConfusionMatrix& cm);

// Throws LengthMismatchError unless both sequences have equal length >= 1.
MetricsFragment compute_metrics(const std::vector<PrivacyChoice>& truth,
                                const std::vector<PrivacyChoice>& predicted);

}  // namespace privpref
