#include "privpref/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "privpref/errors.hpp"
#include "privpref/naive_bayes.hpp"
#include "privpref/rule_model.hpp"

namespace privpref {

void SplitSpec::validate() const {
  if (!(train_frac >= 0.0 && val_frac >= 0.0 && test_frac >= 0.0))
    throw ConfigInvalidError("split fractions must be non-negative");
  if (std::fabs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw ConfigInvalidError("split fractions must sum to 1");
}

namespace {

// Stratum index per record: the three classes in fixed order, then unlabeled.
size_t stratum_of(const PrivacyRecord& r) {
  return r.label ? choice_index(*r.label) : kNumChoices;
}

constexpr size_t kNumStrata = kNumChoices + 1;

// Largest-remainder allocation of `target` slots over per-stratum quotas
// frac * count[s], capped by `available`. Per-stratum error stays below one.
std::array<size_t, kNumStrata> allocate(
    const std::array<size_t, kNumStrata>& available, double frac,
    size_t target) {
  std::array<size_t, kNumStrata> out{};
  std::array<double, kNumStrata> quota{};
  size_t assigned = 0;
  for (size_t s = 0; s < kNumStrata; ++s) {
    quota[s] = frac * static_cast<double>(available[s]);
    out[s] = std::min(static_cast<size_t>(quota[s]), available[s]);
    assigned += out[s];
  }
  while (assigned < target) {
    size_t best = kNumStrata;
    double best_rem = -1.0;
    for (size_t s = 0; s < kNumStrata; ++s) {
      if (out[s] >= available[s]) continue;
      double rem = quota[s] - static_cast<double>(out[s]);
      if (rem > best_rem) {
        best_rem = rem;
        best = s;
      }
    }
    if (best == kNumStrata) break;  // every stratum exhausted
    ++out[best];
    ++assigned;
  }
  return out;
}

LabeledDataset subset_in_order(const LabeledDataset& ds,
                               const std::vector<bool>& member) {
  LabeledDataset out;
  out.schema = ds.schema;
  out.provenance = ds.provenance;
  for (size_t i = 0; i < ds.records.size(); ++i)
    if (member[i]) out.records.push_back(ds.records[i]);
  return out;
}

}  // namespace

SplitResult make_split(const LabeledDataset& ds, const SplitSpec& spec) {
  spec.validate();
  const size_t n = ds.records.size();
  if (n < 10)
    throw TooSmallError("make_split needs at least 10 records, got " +
                        std::to_string(n));

  const size_t val_n = static_cast<size_t>(
      std::llround(spec.val_frac * static_cast<double>(n)));
  const size_t test_n = static_cast<size_t>(
      std::llround(spec.test_frac * static_cast<double>(n)));

  SplitMix64 rng(derive_seed(spec.seed, "split"));
  std::vector<std::vector<size_t>> strata(kNumStrata);
  if (spec.stratified) {
    for (size_t i = 0; i < n; ++i)
      strata[stratum_of(ds.records[i])].push_back(i);
  } else {
    strata[0].resize(n);
    for (size_t i = 0; i < n; ++i) strata[0][i] = i;
  }
  for (auto& s : strata) rng.shuffle(s);

  std::array<size_t, kNumStrata> counts{};
  for (size_t s = 0; s < kNumStrata; ++s) counts[s] = strata[s].size();
  std::array<size_t, kNumStrata> test_alloc = allocate(counts, spec.test_frac, test_n);
  std::array<size_t, kNumStrata> remaining{};
  for (size_t s = 0; s < kNumStrata; ++s)
    remaining[s] = counts[s] - test_alloc[s];
  std::array<size_t, kNumStrata> val_alloc{};
  {
    // Quotas stay proportional to the full stratum size; caps use what the
    // test part left behind.
    std::array<double, kNumStrata> quota{};
    size_t assigned = 0;
    for (size_t s = 0; s < kNumStrata; ++s) {
      quota[s] = spec.val_frac * static_cast<double>(counts[s]);
      val_alloc[s] = std::min(static_cast<size_t>(quota[s]), remaining[s]);
      assigned += val_alloc[s];
    }
    while (assigned < val_n) {
      size_t best = kNumStrata;
      double best_rem = -1.0;
      for (size_t s = 0; s < kNumStrata; ++s) {
        if (val_alloc[s] >= remaining[s]) continue;
        double rem = quota[s] - static_cast<double>(val_alloc[s]);
        if (rem > best_rem) {
          best_rem = rem;
          best = s;
        }
      }
      if (best == kNumStrata) break;
      ++val_alloc[best];
      ++assigned;
    }
  }

  std::vector<bool> in_test(n, false), in_val(n, false);
  for (size_t s = 0; s < kNumStrata; ++s) {
    size_t pos = 0;
    for (size_t k = 0; k < test_alloc[s]; ++k) in_test[strata[s][pos++]] = true;
    for (size_t k = 0; k < val_alloc[s]; ++k) in_val[strata[s][pos++]] = true;
  }
  std::vector<bool> in_train(n, false);
  for (size_t i = 0; i < n; ++i) in_train[i] = !in_test[i] && !in_val[i];

  return {subset_in_order(ds, in_train), subset_in_order(ds, in_val),
          subset_in_order(ds, in_test)};
}

std::vector<size_t> kfold(const LabeledDataset& ds, size_t k, uint64_t seed) {
  const size_t n = ds.records.size();
  if (k < 2) throw ConfigInvalidError("kfold needs k >= 2");
  if (n < k)
    throw TooSmallError("kfold needs at least " + std::to_string(k) +
                        " records, got " + std::to_string(n));
  SplitMix64 rng(derive_seed(seed, "kfold"));
  std::vector<std::vector<size_t>> strata(kNumStrata);
  for (size_t i = 0; i < n; ++i)
    strata[stratum_of(ds.records[i])].push_back(i);
  for (auto& s : strata) rng.shuffle(s);

  // One global counter across strata keeps both the per-class and the global
  // fold sizes within one of each other.
  std::vector<size_t> fold(n, 0);
  size_t g = 0;
  for (const auto& s : strata)
    for (size_t idx : s) fold[idx] = g++ % k;
  return fold;
}

// ---------------------------------------------------------------------------

std::unique_ptr<Classifier> make_classifier(const std::string& kind,
                                            const ModelContext& ctx) {
  if (kind == "nb") return std::make_unique<NaiveBayesClassifier>();
  if (kind == "mlp") return std::make_unique<MlpClassifier>(ctx.mlp_config);
  if (kind == "rule") return std::make_unique<RuleClassifier>();
  if (kind == "q") {
    if (!ctx.gen_config)
      throw ConfigInvalidError("q policy needs a generator config for its environment");
    RlConfig rl = ctx.rl_config;
    // The policy's interaction budget tracks the data scale, so it is as
    // data-starved at small sizes as the supervised models. Episodes are
    // long so rare states still see the high-exploration phase, whose
    // length in episodes is fixed by the per-episode epsilon decay.
    if (ctx.nominal_size) {
      rl.episodes = std::clamp<size_t>(*ctx.nominal_size / 5, 20, 4000);
      rl.steps_per_episode = 200;
    }
    return std::make_unique<QPolicyClassifier>(*ctx.gen_config, rl);
  }
  throw ConfigInvalidError("unknown model kind \"" + kind + "\"");
}

namespace {

MetricsFragment score(const Classifier& model, const LabeledDataset& data) {
  std::vector<PrivacyChoice> truth, predicted;
  truth.reserve(data.records.size());
  for (const PrivacyRecord& r : data.records) {
    if (!r.label) continue;
    truth.push_back(*r.label);
    predicted.push_back(model.predict(r));
  }
  return compute_metrics(truth, predicted);
}

}  // namespace

MetricsReport evaluate_model_cv(const std::string& kind,
                                const LabeledDataset& ds, size_t folds,
                                uint64_t master_seed, const ModelContext& ctx,
                                const std::string& config_digest) {
  const auto t0 = std::chrono::steady_clock::now();

  SplitSpec spec;
  spec.seed = derive_seed(master_seed, "eval/split");
  SplitResult split = make_split(ds, spec);

  LabeledDataset cv_set;
  cv_set.schema = ds.schema;
  cv_set.provenance = ds.provenance;
  {
    std::unordered_set<uint64_t> test_ids;
    for (const PrivacyRecord& r : split.test.records)
      test_ids.insert(r.record_id);
    for (const PrivacyRecord& r : ds.records)
      if (!test_ids.count(r.record_id)) cv_set.records.push_back(r);
  }

  std::vector<size_t> assignment =
      kfold(cv_set, folds, derive_seed(master_seed, "eval/folds"));

  MetricsReport report;
  report.model = kind;
  report.dataset_size = ds.records.size();
  report.seed = master_seed;
  report.config_digest = config_digest;

  ConfusionMatrix pooled;
  for (size_t f = 0; f < folds; ++f) {
    LabeledDataset fold_train, fold_val;
    fold_train.schema = fold_val.schema = cv_set.schema;
    for (size_t i = 0; i < cv_set.records.size(); ++i)
      (assignment[i] == f ? fold_val : fold_train)
          .records.push_back(cv_set.records[i]);
    auto model = make_classifier(kind, ctx);
    model->fit(fold_train, derive_seed(master_seed, "eval/fit", {f}));
    report.folds.push_back(score(*model, fold_val));
    pooled.merge(report.folds.back().confusion);
  }
  report.aggregate = metrics_from_confusion(pooled);

  auto final_model = make_classifier(kind, ctx);
  final_model->fit(cv_set, derive_seed(master_seed, "eval/fit-final"));
  report.test = score(*final_model, split.test);
  if (auto* qp = dynamic_cast<QPolicyClassifier*>(final_model.get()))
    report.cumulative_reward = qp->training_log().cumulative_reward;

  report.wall_clock_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

LabeledDataset prefix_dataset(const LabeledDataset& ds, size_t n) {
  if (n > ds.records.size())
    throw TooSmallError("prefix of " + std::to_string(n) +
                        " records requested from " +
                        std::to_string(ds.records.size()));
  LabeledDataset out;
  out.schema = ds.schema;
  out.provenance = ds.provenance;
  out.records.assign(ds.records.begin(), ds.records.begin() + n);
  return out;
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["model"] = model;
  j["dataset_size"] = dataset_size;
  j["seed"] = seed;
  j["config_digest"] = config_digest;
  nlohmann::json folds_json = nlohmann::json::array();
  for (size_t f = 0; f < folds.size(); ++f) {
    nlohmann::json jf = folds[f].to_json();
    jf["fold"] = f;
    folds_json.push_back(jf);
  }
  j["folds"] = folds_json;
  j["aggregate"] = aggregate.to_json();
  j["test"] = test ? test->to_json() : nlohmann::json(nullptr);
  j["cumulative_reward"] =
      cumulative_reward ? nlohmann::json(*cumulative_reward)
                        : nlohmann::json(nullptr);
  j["wall_clock_ms"] = wall_clock_ms;
  return j;
}

std::string MetricsReport::digest_payload() const {
  nlohmann::json j = to_json();
  j.erase("wall_clock_ms");
  return j.dump();
}

}  // namespace privpref
