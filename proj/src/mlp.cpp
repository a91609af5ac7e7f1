#include "privpref/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "privpref/errors.hpp"
#include "privpref/rng.hpp"

namespace privpref {

void MlpConfig::validate() const {
  if (hidden1 < 1 || hidden2 < 1)
    throw ConfigInvalidError("mlp hidden sizes must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ConfigInvalidError("mlp learning_rate must be finite and >= 0");
  if (batch_size < 1) throw ConfigInvalidError("mlp batch_size must be >= 1");
}

MlpParams MlpParams::zeros(size_t input_width, size_t h1, size_t h2) {
  MlpParams p;
  p.input_width = input_width;
  p.hidden1 = h1;
  p.hidden2 = h2;
  p.w1.assign(h1 * input_width, 0.0);
  p.b1.assign(h1, 0.0);
  p.w2.assign(h2 * h1, 0.0);
  p.b2.assign(h2, 0.0);
  p.w3.assign(kNumChoices * h2, 0.0);
  p.b3.assign(kNumChoices, 0.0);
  return p;
}

size_t MlpParams::param_count() const {
  return w1.size() + b1.size() + w2.size() + b2.size() + w3.size() + b3.size();
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  for (const auto* v : {&w1, &b1, &w2, &b2, &w3, &b3})
    flat.insert(flat.end(), v->begin(), v->end());
  return flat;
}

void MlpParams::unflatten(std::span<const double> flat) {
  if (flat.size() != param_count())
    throw DimensionMismatchError("flat parameter size mismatch");
  size_t pos = 0;
  for (auto* v : {&w1, &b1, &w2, &b2, &w3, &b3}) {
    std::copy(flat.begin() + pos, flat.begin() + pos + v->size(), v->begin());
    pos += v->size();
  }
}

bool MlpParams::all_finite() const {
  for (const auto* v : {&w1, &b1, &w2, &b2, &w3, &b3})
    for (double x : *v)
      if (!std::isfinite(x)) return false;
  return true;
}

MlpActivations mlp_forward(const MlpParams& p, std::span<const double> x) {
  if (x.size() != p.input_width)
    throw DimensionMismatchError("input width " + std::to_string(x.size()) +
                                 " does not match model width " +
                                 std::to_string(p.input_width));
  MlpActivations act;
  act.h1.assign(p.hidden1, 0.0);
  for (size_t i = 0; i < p.hidden1; ++i) {
    double z = p.b1[i];
    const double* row = &p.w1[i * p.input_width];
    for (size_t j = 0; j < p.input_width; ++j) z += row[j] * x[j];
    act.h1[i] = z > 0.0 ? z : 0.0;
  }
  act.h2.assign(p.hidden2, 0.0);
  for (size_t i = 0; i < p.hidden2; ++i) {
    double z = p.b2[i];
    const double* row = &p.w2[i * p.hidden1];
    for (size_t j = 0; j < p.hidden1; ++j) z += row[j] * act.h1[j];
    act.h2[i] = z > 0.0 ? z : 0.0;
  }
  std::array<double, kNumChoices> logits;
  for (size_t i = 0; i < kNumChoices; ++i) {
    double z = p.b3[i];
    const double* row = &p.w3[i * p.hidden2];
    for (size_t j = 0; j < p.hidden2; ++j) z += row[j] * act.h2[j];
    logits[i] = z;
  }
  double max_logit = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (size_t i = 0; i < kNumChoices; ++i) {
    act.probs[i] = std::exp(logits[i] - max_logit);
    total += act.probs[i];
  }
  for (double& v : act.probs) v /= total;
  return act;
}

double cross_entropy(const ProbVector& yhat, const ProbVector& onehot) {
  double loss = 0.0;
  for (size_t i = 0; i < kNumChoices; ++i)
    loss -= onehot[i] * std::log(std::max(yhat[i], 1e-12));
  return loss;
}

double cross_entropy(const ProbVector& yhat, size_t true_class) {
  return -std::log(std::max(yhat[true_class], 1e-12));
}

double mlp_batch_loss(const MlpParams& p,
                      const std::vector<std::vector<double>>& xs,
                      const std::vector<size_t>& ys) {
  if (xs.size() != ys.size() || xs.empty())
    throw DimensionMismatchError("batch inputs and labels must match and be non-empty");
  double loss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i)
    loss += cross_entropy(mlp_forward(p, xs[i]).probs, ys[i]);
  return loss / static_cast<double>(xs.size());
}

double mlp_loss_and_gradients(const MlpParams& p,
                              const std::vector<std::vector<double>>& xs,
                              const std::vector<size_t>& ys,
                              MlpParams* gradients) {
  if (xs.size() != ys.size() || xs.empty())
    throw DimensionMismatchError("batch inputs and labels must match and be non-empty");
  MlpParams& g = *gradients;
  g = MlpParams::zeros(p.input_width, p.hidden1, p.hidden2);

  const double inv_b = 1.0 / static_cast<double>(xs.size());
  double loss = 0.0;
  std::vector<double> dh2(p.hidden2), dh1(p.hidden1);
  for (size_t s = 0; s < xs.size(); ++s) {
    const std::vector<double>& x = xs[s];
    MlpActivations act = mlp_forward(p, x);
    loss += cross_entropy(act.probs, ys[s]) * inv_b;

    std::array<double, kNumChoices> dlogits;
    for (size_t i = 0; i < kNumChoices; ++i)
      dlogits[i] = (act.probs[i] - (i == ys[s] ? 1.0 : 0.0)) * inv_b;

    for (size_t i = 0; i < kNumChoices; ++i) {
      double* grow = &g.w3[i * p.hidden2];
      for (size_t j = 0; j < p.hidden2; ++j) grow[j] += dlogits[i] * act.h2[j];
      g.b3[i] += dlogits[i];
    }
    for (size_t j = 0; j < p.hidden2; ++j) {
      double acc = 0.0;
      for (size_t i = 0; i < kNumChoices; ++i)
        acc += p.w3[i * p.hidden2 + j] * dlogits[i];
      dh2[j] = act.h2[j] > 0.0 ? acc : 0.0;
    }
    for (size_t i = 0; i < p.hidden2; ++i) {
      double* grow = &g.w2[i * p.hidden1];
      for (size_t j = 0; j < p.hidden1; ++j) grow[j] += dh2[i] * act.h1[j];
      g.b2[i] += dh2[i];
    }
    for (size_t j = 0; j < p.hidden1; ++j) {
      double acc = 0.0;
      for (size_t i = 0; i < p.hidden2; ++i)
        acc += p.w2[i * p.hidden1 + j] * dh2[i];
      dh1[j] = act.h1[j] > 0.0 ? acc : 0.0;
    }
    for (size_t i = 0; i < p.hidden1; ++i) {
      double* grow = &g.w1[i * p.input_width];
      for (size_t j = 0; j < p.input_width; ++j) grow[j] += dh1[i] * x[j];
      g.b1[i] += dh1[i];
    }
  }
  return loss;
}

namespace {

void init_layer(std::vector<double>& w, std::vector<double>& b, size_t fan_in,
                size_t fan_out, SplitMix64& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w) v = (rng.uniform() * 2.0 - 1.0) * s;
  for (double& v : b) v = (rng.uniform() * 2.0 - 1.0) * s;
}

void axpy(std::vector<double>& dst, const std::vector<double>& src,
          double scale) {
  for (size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
}

}  // namespace

MlpParams mlp_train(const MlpConfig& cfg, const LabeledDataset& train,
                    MlpTrainTrace* trace) {
  cfg.validate();
  if (train.records.empty())
    throw EmptyTrainingSetError("mlp needs a non-empty training set");

  OneHotEncoder encoder(train.schema);
  std::vector<std::vector<double>> xs;
  std::vector<size_t> ys;
  xs.reserve(train.records.size());
  for (const PrivacyRecord& r : train.records) {
    if (!r.label)
      throw EmptyTrainingSetError("record " + std::to_string(r.record_id) +
                                  " has no label");
    xs.push_back(encoder.encode(r));
    ys.push_back(choice_index(*r.label));
  }

  MlpParams p = MlpParams::zeros(encoder.width(), cfg.hidden1, cfg.hidden2);
  SplitMix64 init_rng(derive_seed(cfg.seed, "mlp/init"));
  init_layer(p.w1, p.b1, p.input_width, p.hidden1, init_rng);
  init_layer(p.w2, p.b2, p.hidden1, p.hidden2, init_rng);
  init_layer(p.w3, p.b3, p.hidden2, kNumChoices, init_rng);

  if (trace) {
    trace->epoch_loss.clear();
    trace->initial_loss = mlp_batch_loss(p, xs, ys);
  }

  std::vector<size_t> order(xs.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<std::vector<double>> bx;
  std::vector<size_t> by;
  MlpParams g;
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    SplitMix64 shuffle_rng(derive_seed(cfg.seed, "mlp/shuffle", {epoch}));
    shuffle_rng.shuffle(order);
    size_t batch_index = 0;
    for (size_t start = 0; start < order.size();
         start += cfg.batch_size, ++batch_index) {
      const size_t end = std::min(start + cfg.batch_size, order.size());
      bx.clear();
      by.clear();
      for (size_t i = start; i < end; ++i) {
        bx.push_back(xs[order[i]]);
        by.push_back(ys[order[i]]);
      }
      double loss = mlp_loss_and_gradients(p, bx, by, &g);
      if (!std::isfinite(loss))
        throw NonFiniteLossError("non-finite loss at epoch " +
                                 std::to_string(epoch) + " batch " +
                                 std::to_string(batch_index));
      axpy(p.w1, g.w1, -cfg.learning_rate);
      axpy(p.b1, g.b1, -cfg.learning_rate);
      axpy(p.w2, g.w2, -cfg.learning_rate);
      axpy(p.b2, g.b2, -cfg.learning_rate);
      axpy(p.w3, g.w3, -cfg.learning_rate);
      axpy(p.b3, g.b3, -cfg.learning_rate);
    }
    if (trace) trace->epoch_loss.push_back(mlp_batch_loss(p, xs, ys));
  }
  if (!p.all_finite())
    throw NonFiniteLossError("non-finite parameters after training");
  return p;
}

void MlpClassifier::fit(const LabeledDataset& train, uint64_t seed) {
  MlpConfig cfg = cfg_;
  cfg.seed = seed;
  params_ = mlp_train(cfg, train);
  encoder_.emplace(train.schema);
}

ProbVector MlpClassifier::predict_proba(const PrivacyRecord& r) const {
  if (!encoder_) throw ConfigInvalidError("mlp classifier is not fitted");
  return mlp_forward(params_, encoder_->encode(r)).probs;
}

void MlpClassifier::set_model(const FeatureSchema& schema, MlpParams params) {
  encoder_.emplace(schema);
  if (encoder_->width() != params.input_width)
    throw DimensionMismatchError("schema width does not match model width");
  params_ = std::move(params);
}

nlohmann::json MlpParams::to_json() const {
  nlohmann::json j;
  j["input_width"] = input_width;
  j["hidden1"] = hidden1;
  j["hidden2"] = hidden2;
  j["w1"] = w1;
  j["b1"] = b1;
  j["w2"] = w2;
  j["b2"] = b2;
  j["w3"] = w3;
  j["b3"] = b3;
  return j;
}

MlpParams MlpParams::from_json(const nlohmann::json& j) {
  MlpParams p;
  p.input_width = j.at("input_width").get<size_t>();
  p.hidden1 = j.at("hidden1").get<size_t>();
  p.hidden2 = j.at("hidden2").get<size_t>();
  p.w1 = j.at("w1").get<std::vector<double>>();
  p.b1 = j.at("b1").get<std::vector<double>>();
  p.w2 = j.at("w2").get<std::vector<double>>();
  p.b2 = j.at("b2").get<std::vector<double>>();
  p.w3 = j.at("w3").get<std::vector<double>>();
  p.b3 = j.at("b3").get<std::vector<double>>();
  if (p.w1.size() != p.hidden1 * p.input_width || p.b1.size() != p.hidden1 ||
      p.w2.size() != p.hidden2 * p.hidden1 || p.b2.size() != p.hidden2 ||
      p.w3.size() != kNumChoices * p.hidden2 || p.b3.size() != kNumChoices)
    throw DimensionMismatchError("mlp parameter arrays do not match dimensions");
  return p;
}

}  // namespace privpref
