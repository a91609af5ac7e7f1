// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Criteria 7 and 8 share sweep runs (the parallel run backs
// both the ordering checks and the determinism comparison).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "chain_env.hpp"
#include "oracles.hpp"
#include "privpref/errors.hpp"
#include "privpref/eval.hpp"
#include "privpref/naive_bayes.hpp"
#include "privpref/sweep.hpp"

using namespace privpref;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- 1: posterior vs count-and-smooth oracle on the 4-row fixture -----------

Outcome criterion_nb_oracle() {
  FeatureSchema schema;
  schema.features.push_back(
      {"context", CategoricalKind{{"social", "finance"}}, false, false});
  LabeledDataset train;
  train.schema = schema;
  auto add = [&](uint64_t id, const std::string& ctx, PrivacyChoice y) {
    PrivacyRecord r;
    r.record_id = id;
    r.values = {CellValue::of(ctx)};
    r.label = y;
    train.records.push_back(r);
  };
  add(0, "social", PrivacyChoice::Allow);
  add(1, "social", PrivacyChoice::Allow);
  add(2, "finance", PrivacyChoice::Deny);
  add(3, "social", PrivacyChoice::Deny);

  NbModel model = nb_fit(train, 1.0);
  double worst = 0.0;
  for (const char* ctx : {"social", "finance"}) {
    PrivacyRecord q;
    q.record_id = 99;
    q.values = {CellValue::of(ctx)};
    ProbVector fast = nb_posterior(model, q);
    ProbVector slow = oracles::nb_posterior_bruteforce(train, q, 1.0);
    for (size_t y = 0; y < kNumChoices; ++y)
      worst = std::max(worst, std::fabs(fast[y] - slow[y]));
  }
  // frozen hand values for the social query
  PrivacyRecord q;
  q.record_id = 99;
  q.values = {CellValue::of("social")};
  ProbVector p = nb_posterior(model, q);
  worst = std::max(worst, std::fabs(p[0] - 9.0 / 17.0));
  worst = std::max(worst, std::fabs(p[1] - 6.0 / 17.0));
  worst = std::max(worst, std::fabs(p[2] - 2.0 / 17.0));

  std::ostringstream detail;
  detail << "max_abs_diff=" << worst;
  return {worst < 1e-12, detail.str()};
}

// --- 2: backprop vs central finite differences ------------------------------

Outcome criterion_gradcheck() {
  double worst = 0.0;
  for (uint64_t seed : {101ULL, 202ULL, 303ULL}) {
    SplitMix64 rng(derive_seed(seed, "acceptance/gradcheck"));
    const size_t width = 9;
    MlpParams p = MlpParams::zeros(width, 8, 6);
    for (auto* v : {&p.w1, &p.b1, &p.w2, &p.b2, &p.w3, &p.b3})
      for (double& e : *v) e = (rng.uniform() * 2.0 - 1.0) * 0.8;

    std::vector<std::vector<double>> xs;
    std::vector<size_t> ys;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> x(width);
      for (double& e : x) e = rng.uniform();
      xs.push_back(x);
      ys.push_back(rng.uniform_below(3));
    }

    MlpParams grads;
    mlp_loss_and_gradients(p, xs, ys, &grads);
    std::vector<double> analytic = grads.flatten();
    std::vector<double> numeric =
        oracles::finite_difference_gradients(p, xs, ys, 1e-5);
    for (size_t i = 0; i < analytic.size(); ++i) {
      double scale =
          std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-8});
      worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / scale);
    }
  }
  std::ostringstream detail;
  detail << "max_rel_err=" << worst;
  return {worst < 1e-4, detail.str()};
}

// --- 3: q-learning vs value iteration on the chain MDP ----------------------

Outcome criterion_q_convergence() {
  testenv::ChainEnv env;
  RlConfig cfg;
  cfg.episodes = 500;
  cfg.steps_per_episode = 50;
  cfg.seed = 7;
  auto [q, log] = train_q(env, cfg);
  auto qstar = oracles::value_iteration(env.next_table(), env.reward_table(),
                                        cfg.gamma, 1e-10);
  double worst = 0.0;
  for (size_t s = 0; s < 3; ++s)
    for (size_t a = 0; a < kNumActions; ++a)
      worst = std::max(
          worst, std::fabs(q.at(s, static_cast<Action>(a)) - qstar[s][a]));
  std::ostringstream detail;
  detail << "max_abs_q_err=" << worst;
  return {worst < 0.05, detail.str()};
}

// --- 4: preprocessing vs brute-force oracles --------------------------------

Outcome criterion_preprocess_oracles() {
  GeneratorConfig gen = default_config();
  gen.volume = 500;
  LabeledDataset ds = generate(gen);

  LabeledDataset dedup_fast = deduplicate(ds);
  LabeledDataset dedup_slow = oracles::dedup_bruteforce(ds);
  if (!dedup_fast.same_contents(dedup_slow))
    return {false, "dedup mismatch vs pairwise oracle"};

  PreprocessConfig cfg;
  LabeledDataset knn_fast = knn_impute(ds, cfg);
  LabeledDataset knn_slow = oracles::knn_impute_bruteforce(ds, cfg.knn_k);
  if (!knn_fast.same_contents(knn_slow))
    return {false, "knn imputation mismatch vs exhaustive oracle"};

  GeneralizationHierarchy h = default_hierarchy(ds.schema);
  KAnonymizeResult ka = k_anonymize(ds, h, cfg);
  oracles::KAnonOracle oracle =
      oracles::k_anonymize_bruteforce(ds, h, cfg.anonymity_k);
  if (ka.chosen_levels != oracle.levels)
    return {false, "k-anonymity picked a different level vector"};
  if (ka.suppressed_count != oracle.suppressed)
    return {false, "k-anonymity suppression count mismatch"};
  if (ka.data.records.size() != oracle.kept_ids.size())
    return {false, "k-anonymity kept-set size mismatch"};
  for (size_t i = 0; i < oracle.kept_ids.size(); ++i)
    if (ka.data.records[i].record_id != oracle.kept_ids[i])
      return {false, "k-anonymity kept different records"};
  size_t min_class = oracles::min_class_size(ka.data);
  if (min_class < cfg.anonymity_k)
    return {false, "published class of size " + std::to_string(min_class)};

  std::ostringstream detail;
  detail << "rows=" << ds.records.size() << " dedup_kept="
         << dedup_fast.records.size() << " suppressed=" << ka.suppressed_count
         << " min_class=" << min_class;
  return {true, detail.str()};
}

// --- 5: randomized response keep rate ---------------------------------------

Outcome criterion_randomized_response() {
  const double eps = std::log(3.0);
  const double keep_p = std::exp(eps) / (std::exp(eps) + 1.0);
  if (std::fabs(keep_p - 0.75) >= 1e-12)
    return {false, "analytic keep probability is not 0.75"};

  const size_t n = 50000;
  LabeledDataset ds;
  FeatureSchema s;
  s.features.push_back({"flag", CategoricalKind{{"no", "yes"}}, false, true});
  ds.schema = s;
  for (size_t i = 0; i < n; ++i) {
    PrivacyRecord r;
    r.record_id = i;
    r.values = {CellValue::of(std::string(i % 3 == 0 ? "yes" : "no"))};
    r.label = PrivacyChoice::Deny;
    ds.records.push_back(r);
  }
  PreprocessConfig cfg;
  cfg.dp_enabled = true;
  cfg.dp_epsilon = eps;
  cfg.seed = 20240;
  LabeledDataset out = dp_randomize(ds, cfg);
  size_t kept = 0;
  for (size_t i = 0; i < n; ++i)
    if (out.records[i].values[0] == ds.records[i].values[0]) ++kept;
  double sigma = std::sqrt(static_cast<double>(n) * 0.75 * 0.25);
  double diff = std::fabs(static_cast<double>(kept) - 0.75 * n);
  std::ostringstream detail;
  detail << "keep_freq=" << static_cast<double>(kept) / n
         << " |diff|=" << diff << " 3sigma=" << 3.0 * sigma;
  return {diff <= 3.0 * sigma, detail.str()};
}

// --- 6: harness partition properties and metric identities ------------------

Outcome criterion_harness_invariants() {
  SplitMix64 rng(derive_seed(42, "acceptance/harness"));
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 10 + rng.uniform_below(4991);
    LabeledDataset ds;
    FeatureSchema s;
    s.features.push_back({"f", CategoricalKind{{"x"}}, false, false});
    ds.schema = s;
    // random, possibly imbalanced label mix
    std::vector<double> weights = {rng.uniform() + 0.01, rng.uniform() + 0.01,
                                   rng.uniform() + 0.01};
    std::array<size_t, kNumChoices> class_count{};
    for (size_t i = 0; i < n; ++i) {
      PrivacyRecord r;
      r.record_id = i;
      r.values = {CellValue::of(std::string("x"))};
      size_t cls = rng.categorical(weights);
      r.label = choice_from_index(cls);
      ++class_count[cls];
      ds.records.push_back(r);
    }

    SplitSpec spec;
    spec.seed = rng.next_u64();
    SplitResult parts = make_split(ds, spec);
    const size_t val_n = static_cast<size_t>(std::llround(0.1 * n));
    const size_t test_n = static_cast<size_t>(std::llround(0.1 * n));
    if (parts.val.records.size() != val_n ||
        parts.test.records.size() != test_n ||
        parts.train.records.size() != n - val_n - test_n)
      return {false, "split sizes off at n=" + std::to_string(n)};

    std::set<uint64_t> seen;
    for (const auto* part : {&parts.train, &parts.val, &parts.test})
      for (const PrivacyRecord& r : part->records)
        if (!seen.insert(r.record_id).second)
          return {false, "split parts overlap at n=" + std::to_string(n)};
    if (seen.size() != n)
      return {false, "split parts do not cover at n=" + std::to_string(n)};

    auto test_counts = oracles::count_labels(parts.test);
    auto val_counts = oracles::count_labels(parts.val);
    for (size_t c = 0; c < kNumChoices; ++c) {
      double tq = 0.1 * static_cast<double>(class_count[c]);
      if (std::fabs(static_cast<double>(test_counts[c]) - tq) > 1.0 ||
          std::fabs(static_cast<double>(val_counts[c]) - tq) > 1.0)
        return {false, "stratification off at n=" + std::to_string(n)};
    }

    size_t k = 2 + rng.uniform_below(7);
    if (n >= k) {
      std::vector<size_t> folds = kfold(ds, k, rng.next_u64());
      std::vector<size_t> sizes(k, 0);
      for (size_t f : folds) {
        if (f >= k) return {false, "fold id out of range"};
        ++sizes[f];
      }
      size_t lo = *std::min_element(sizes.begin(), sizes.end());
      size_t hi = *std::max_element(sizes.begin(), sizes.end());
      if (hi - lo > 1) return {false, "fold sizes differ by more than one"};
      std::array<std::vector<size_t>, kNumChoices> per_class;
      for (auto& v : per_class) v.assign(k, 0);
      for (size_t i = 0; i < n; ++i)
        ++per_class[choice_index(*ds.records[i].label)][folds[i]];
      for (size_t c = 0; c < kNumChoices; ++c) {
        size_t clo = *std::min_element(per_class[c].begin(), per_class[c].end());
        size_t chi = *std::max_element(per_class[c].begin(), per_class[c].end());
        if (chi - clo > 1) return {false, "per-class fold sizes off"};
      }
    }
  }

  // metric identities on random confusion fixtures
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 1 + rng.uniform_below(500);
    std::vector<PrivacyChoice> truth, pred;
    for (size_t i = 0; i < n; ++i) {
      truth.push_back(choice_from_index(rng.uniform_below(3)));
      pred.push_back(choice_from_index(rng.uniform_below(3)));
    }
    MetricsFragment m = compute_metrics(truth, pred);
    double trace_ratio = static_cast<double>(m.confusion.trace()) /
                         static_cast<double>(m.confusion.total());
    if (m.accuracy != trace_ratio)
      return {false, "accuracy is not the confusion trace ratio"};
    for (double v : {m.accuracy, m.macro_recall, m.macro_precision, m.macro_f1})
      if (!(v >= 0.0 && v <= 1.0)) return {false, "metric out of [0,1]"};
    for (size_t c = 0; c < kNumChoices; ++c)
      for (double v : {m.recall[c], m.precision[c], m.f1[c]})
        if (!(v >= 0.0 && v <= 1.0)) return {false, "per-class metric out of [0,1]"};
  }
  return {true, "100 split/fold cases, 100 confusion fixtures"};
}

// --- 7 & 8: benchmark orderings and end-to-end determinism ------------------

struct SweepRuns {
  SweepResult serial;    // jobs = 1
  SweepResult parallel;  // jobs = 4
  bool ready = false;
};

SweepRuns& shared_sweeps() {
  static SweepRuns runs;
  if (!runs.ready) {
    SweepConfig cfg;  // shipped defaults: 4 sizes x 4 models, seed 42
    cfg.jobs = 1;
    runs.serial = run_scale_sweep(cfg);
    cfg.jobs = 4;
    runs.parallel = run_scale_sweep(cfg);
    runs.ready = true;
  }
  return runs;
}

double accuracy_of(const SweepResult& sweep, const std::string& model,
                   size_t size) {
  const MetricsReport* r = find_report(sweep.reports, model, size);
  if (!r) throw InternalError("missing report " + model);
  return r->aggregate.accuracy;
}

Outcome criterion_benchmark_orderings() {
  const SweepResult& sweep = shared_sweeps().parallel;

  double rule10k = accuracy_of(sweep, "rule", 10000);
  double nb10k = accuracy_of(sweep, "nb", 10000);
  double mlp10k = accuracy_of(sweep, "mlp", 10000);
  double q10k = accuracy_of(sweep, "q", 10000);
  double nb1k = accuracy_of(sweep, "nb", 1000);
  double mlp1k = accuracy_of(sweep, "mlp", 1000);
  double nb20k = accuracy_of(sweep, "nb", 20000);
  double mlp20k = accuracy_of(sweep, "mlp", 20000);
  double q20k = accuracy_of(sweep, "q", 20000);

  bool fig3 = rule10k < nb10k && nb10k < mlp10k && mlp10k <= q10k;
  bool fig4 = nb1k >= mlp1k && mlp20k > nb20k && q20k >= mlp20k;

  RlConfig rl;
  rl.seed = derive_seed(42, "rl");
  GeneratorConfig gen = default_config();
  PrivacyEnv env(gen);
  auto [q, log] = train_q(env, rl);
  auto window_stats = [&](size_t from, size_t to) {
    double mean = 0.0;
    for (size_t i = from; i < to; ++i) mean += log.episodes[i].total_reward;
    mean /= static_cast<double>(to - from);
    double var = 0.0;
    for (size_t i = from; i < to; ++i) {
      double d = log.episodes[i].total_reward - mean;
      var += d * d;
    }
    return std::pair<double, double>(
        mean, std::sqrt(var / static_cast<double>(to - from)));
  };
  auto [early_mean, early_std] = window_stats(0, 50);
  auto [late_mean, late_std] = window_stats(150, 200);
  bool fig5 = late_mean > early_mean && late_std < early_std;

  std::ostringstream detail;
  detail.precision(4);
  detail << "acc@10k rule=" << rule10k << " nb=" << nb10k << " mlp=" << mlp10k
         << " q=" << q10k << "; acc@1k nb=" << nb1k << " mlp=" << mlp1k
         << "; acc@20k nb=" << nb20k << " mlp=" << mlp20k << " q=" << q20k
         << "; reward early=" << early_mean << "/" << early_std
         << " late=" << late_mean << "/" << late_std;
  return {fig3 && fig4 && fig5, detail.str()};
}

Outcome criterion_determinism() {
  const SweepRuns& runs = shared_sweeps();
  bool csv_equal = runs.serial.comparison_csv == runs.parallel.comparison_csv;
  bool digests_equal =
      runs.serial.config_digest == runs.parallel.config_digest;
  bool reports_equal = runs.serial.reports.size() == runs.parallel.reports.size();
  if (reports_equal)
    for (size_t i = 0; i < runs.serial.reports.size(); ++i)
      reports_equal = reports_equal &&
                      runs.serial.reports[i].digest_payload() ==
                          runs.parallel.reports[i].digest_payload();
  std::ostringstream detail;
  detail << "csv_bytes=" << runs.serial.comparison_csv.size()
         << (csv_equal ? " identical" : " DIFFER")
         << (reports_equal ? ", reports identical" : ", reports DIFFER");
  return {csv_equal && digests_equal && reports_equal, detail.str()};
}

}  // namespace

int main() {
  struct Entry {
    int number;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Entry> criteria = {
      {1, "nb-posterior-oracle", criterion_nb_oracle},
      {2, "mlp-gradient-check", criterion_gradcheck},
      {3, "q-learning-convergence", criterion_q_convergence},
      {4, "preprocessing-oracles", criterion_preprocess_oracles},
      {5, "randomized-response-rate", criterion_randomized_response},
      {6, "harness-invariants", criterion_harness_invariants},
      {7, "benchmark-orderings", criterion_benchmark_orderings},
      {8, "end-to-end-determinism", criterion_determinism},
  };

  int failures = 0;
  for (const Entry& entry : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = entry.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    double seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    std::printf("[%d/8] %s  %-26s (%.2fs)  %s\n", entry.number,
                outcome.pass ? "PASS" : "FAIL", entry.name, seconds,
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  std::printf("RESULT: %zu/8 criteria passed\n", criteria.size() - failures);
  return failures == 0 ? 0 : 1;
}
