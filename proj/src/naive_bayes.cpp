#include "privpref/naive_bayes.hpp"

#include <algorithm>
#include <cmath>

#include "privpref/errors.hpp"

namespace privpref {

size_t NbModel::bin_of(size_t feature, double value) const {
  const auto& edges = bin_edges[feature];
  size_t b = 0;
  for (double e : edges)
    if (value > e) ++b;
  return b;
}

size_t NbModel::value_index(size_t feature, const CellValue& v) const {
  const Feature& f = schema.features[feature];
  if (v.is_missing())
    throw ConfigInvalidError("feature \"" + f.name +
                             "\" is missing; impute before prediction");
  if (f.is_categorical()) {
    const auto& domain = f.categorical().domain;
    auto it = std::find(domain.begin(), domain.end(), v.cat);
    if (it == domain.end())
      throw SchemaMismatchError("token \"" + v.cat + "\" not in domain of \"" +
                                f.name + "\"");
    return static_cast<size_t>(it - domain.begin());
  }
  return bin_of(feature, v.num);
}

namespace {

// Deterministic quantile: the value at the floor((n-1)*q) order statistic.
std::vector<double> quartile_edges(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<double> edges;
  const size_t n = values.size();
  for (double q : {0.25, 0.5, 0.75}) {
    double e = values[static_cast<size_t>(
        static_cast<double>(n - 1) * q)];
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  // Drop a top edge equal to the maximum: it would create an empty last bin.
  while (!edges.empty() && edges.back() >= values.back()) edges.pop_back();
  return edges;
}

}  // namespace

NbModel nb_fit(const LabeledDataset& train, double smoothing) {
  if (smoothing < 1.0)
    throw ConfigInvalidError("nb smoothing must be >= 1");
  if (train.records.empty())
    throw EmptyTrainingSetError("naive bayes needs a non-empty training set");
  for (const PrivacyRecord& r : train.records)
    if (!r.label)
      throw EmptyTrainingSetError("record " + std::to_string(r.record_id) +
                                  " has no label");

  NbModel m;
  m.schema = train.schema;
  m.smoothing = smoothing;
  const size_t nf = train.schema.features.size();
  const double n = static_cast<double>(train.records.size());
  const double c = static_cast<double>(kNumChoices);

  std::array<double, kNumChoices> class_count{};
  for (const PrivacyRecord& r : train.records)
    class_count[choice_index(*r.label)] += 1.0;
  for (size_t y = 0; y < kNumChoices; ++y)
    m.class_priors[y] = (class_count[y] + smoothing) / (n + smoothing * c);

  m.bin_edges.assign(nf, {});
  for (size_t f = 0; f < nf; ++f) {
    if (!train.schema.features[f].is_numeric()) continue;
    std::vector<double> vals;
    for (const PrivacyRecord& r : train.records)
      if (!r.values[f].is_missing()) vals.push_back(r.values[f].num);
    if (vals.empty())
      throw EmptyTrainingSetError("feature \"" +
                                  train.schema.features[f].name +
                                  "\" has no observed training values");
    m.bin_edges[f] = quartile_edges(std::move(vals));
  }

  m.conditionals.resize(nf);
  for (size_t f = 0; f < nf; ++f) {
    const Feature& feat = train.schema.features[f];
    const size_t nvals = feat.is_categorical()
                             ? feat.categorical().domain.size()
                             : m.bin_edges[f].size() + 1;
    std::vector<std::array<double, kNumChoices>> counts(
        nvals, std::array<double, kNumChoices>{});
    for (const PrivacyRecord& r : train.records) {
      if (r.values[f].is_missing())
        throw ConfigInvalidError("record " + std::to_string(r.record_id) +
                                 " feature \"" + feat.name +
                                 "\" is missing; impute before fitting");
      counts[m.value_index(f, r.values[f])][choice_index(*r.label)] += 1.0;
    }
    const double mi = static_cast<double>(nvals);
    m.conditionals[f].resize(nvals);
    for (size_t y = 0; y < kNumChoices; ++y) {
      // A zero count leaves the smoothing floor alpha / (count(y) + alpha*m),
      // so domain values unseen with a class are never zero-probability.
      const double denom = class_count[y] + smoothing * mi;
      for (size_t v = 0; v < nvals; ++v)
        m.conditionals[f][v][y] = (counts[v][y] + smoothing) / denom;
    }
  }
  return m;
}

ProbVector nb_posterior(const NbModel& model, const PrivacyRecord& r) {
  if (r.values.size() != model.schema.features.size())
    throw DimensionMismatchError("record width does not match model schema");
  std::array<double, kNumChoices> score;
  for (size_t y = 0; y < kNumChoices; ++y)
    score[y] = std::log(model.class_priors[y]);
  for (size_t f = 0; f < r.values.size(); ++f) {
    const size_t v = model.value_index(f, r.values[f]);
    for (size_t y = 0; y < kNumChoices; ++y)
      score[y] += std::log(model.conditionals[f][v][y]);
  }
  double max_score = *std::max_element(score.begin(), score.end());
  ProbVector p;
  double total = 0.0;
  for (size_t y = 0; y < kNumChoices; ++y) {
    p[y] = std::exp(score[y] - max_score);
    total += p[y];
  }
  for (double& v : p) v /= total;
  return p;
}

void NaiveBayesClassifier::fit(const LabeledDataset& train, uint64_t) {
  model_ = nb_fit(train, model_.smoothing);
}

ProbVector NaiveBayesClassifier::predict_proba(const PrivacyRecord& r) const {
  return nb_posterior(model_, r);
}

nlohmann::json NbModel::to_json() const {
  nlohmann::json j;
  j["schema"] = schema.to_json();
  j["class_priors"] = class_priors;
  j["conditionals"] = conditionals;
  j["bin_edges"] = bin_edges;
  j["smoothing"] = smoothing;
  return j;
}

NbModel NbModel::from_json(const nlohmann::json& j) {
  NbModel m;
  m.schema = FeatureSchema::from_json(j.at("schema"));
  m.class_priors = j.at("class_priors").get<std::array<double, kNumChoices>>();
  m.conditionals =
      j.at("conditionals")
          .get<std::vector<std::vector<std::array<double, kNumChoices>>>>();
  m.bin_edges = j.at("bin_edges").get<std::vector<std::vector<double>>>();
  m.smoothing = j.at("smoothing").get<double>();
  return m;
}

}  // namespace privpref
