#include "privpref/metrics.hpp"

#include "privpref/errors.hpp"

namespace privpref {

void ConfusionMatrix::merge(const ConfusionMatrix& o) {
  for (size_t i = 0; i < kNumChoices; ++i)
    for (size_t j = 0; j < kNumChoices; ++j) counts[i][j] += o.counts[i][j];
}

uint64_t ConfusionMatrix::total() const {
  uint64_t t = 0;
  for (const auto& row : counts)
    for (uint64_t c : row) t += c;
  return t;
}

uint64_t ConfusionMatrix::trace() const {
  uint64_t t = 0;
  for (size_t i = 0; i < kNumChoices; ++i) t += counts[i][i];
  return t;
}

nlohmann::json ConfusionMatrix::to_json() const { return counts; }

ConfusionMatrix ConfusionMatrix::from_json(const nlohmann::json& j) {
  ConfusionMatrix cm;
  cm.counts =
      j.get<std::array<std::array<uint64_t, kNumChoices>, kNumChoices>>();
  return cm;
}

MetricsFragment metrics_from_confusion(const ConfusionMatrix& cm) {
  MetricsFragment m;
  m.confusion = cm;
  const uint64_t total = cm.total();
  m.accuracy = total == 0
                   ? 0.0
                   : static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (size_t c = 0; c < kNumChoices; ++c) {
    uint64_t tp = cm.counts[c][c];
    uint64_t fn = 0;
    uint64_t fp = 0;
    for (size_t o = 0; o < kNumChoices; ++o) {
      if (o == c) continue;
      fn += cm.counts[c][o];
      fp += cm.counts[o][c];
    }
    m.recall[c] = tp + fn == 0 ? 0.0
                               : static_cast<double>(tp) /
                                     static_cast<double>(tp + fn);
    m.precision[c] = tp + fp == 0 ? 0.0
                                  : static_cast<double>(tp) /
                                        static_cast<double>(tp + fp);
    double pr = m.precision[c] + m.recall[c];
    m.f1[c] = pr == 0.0 ? 0.0 : 2.0 * m.precision[c] * m.recall[c] / pr;
    m.macro_recall += m.recall[c];
    m.macro_precision += m.precision[c];
    m.macro_f1 += m.f1[c];
  }
  m.macro_recall /= static_cast<double>(kNumChoices);
  m.macro_precision /= static_cast<double>(kNumChoices);
  m.macro_f1 /= static_cast<double>(kNumChoices);
  return m;
}

MetricsFragment compute_metrics(const std::vector<PrivacyChoice>& truth,
                                const std::vector<PrivacyChoice>& predicted) {
  if (truth.size() != predicted.size() || truth.empty())
    throw LengthMismatchError(
        "truth and prediction sequences must have equal length >= 1 (got " +
        std::to_string(truth.size()) + " and " +
        std::to_string(predicted.size()) + ")");
  ConfusionMatrix cm;
  for (size_t i = 0; i < truth.size(); ++i) cm.add(truth[i], predicted[i]);
  return metrics_from_confusion(cm);
}

nlohmann::json MetricsFragment::to_json() const {
  nlohmann::json j;
  j["accuracy"] = accuracy;
  j["macro_recall"] = macro_recall;
  j["macro_precision"] = macro_precision;
  j["macro_f1"] = macro_f1;
  j["per_class"] = {{"recall", recall}, {"precision", precision}, {"f1", f1}};
  j["confusion"] = confusion.to_json();
  return j;
}

}  // namespace privpref
