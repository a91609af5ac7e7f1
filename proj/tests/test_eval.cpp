#include <cmath>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "privpref/eval.hpp"
#include "privpref/errors.hpp"
#include "privpref/sweep.hpp"

using namespace privpref;

namespace {

LabeledDataset labeled_set(const std::vector<PrivacyChoice>& labels) {
  LabeledDataset ds;
  FeatureSchema s;
  s.features.push_back({"context", CategoricalKind{{"a", "b"}}, false, false});
  ds.schema = s;
  for (size_t i = 0; i < labels.size(); ++i) {
    PrivacyRecord r;
    r.record_id = i;
    r.values = {CellValue::of(std::string(i % 2 == 0 ? "a" : "b"))};
    r.label = labels[i];
    ds.records.push_back(r);
  }
  return ds;
}

std::vector<PrivacyChoice> imbalanced(size_t allow, size_t deny, size_t ask) {
  std::vector<PrivacyChoice> labels;
  labels.insert(labels.end(), allow, PrivacyChoice::Allow);
  labels.insert(labels.end(), deny, PrivacyChoice::Deny);
  labels.insert(labels.end(), ask, PrivacyChoice::Ask);
  return labels;
}

}  // namespace

TEST_CASE("split sizes follow rounded fractions with remainder to train") {
  LabeledDataset ds = labeled_set(imbalanced(3000, 1500, 500));
  SplitSpec spec;
  spec.seed = 1;
  SplitResult r = make_split(ds, spec);
  CHECK(r.train.records.size() == 4000);
  CHECK(r.val.records.size() == 500);
  CHECK(r.test.records.size() == 500);
}

TEST_CASE("split parts partition the id set") {
  LabeledDataset ds = labeled_set(imbalanced(101, 53, 29));
  SplitSpec spec;
  spec.seed = 3;
  SplitResult r = make_split(ds, spec);
  std::set<uint64_t> ids;
  for (const auto* part : {&r.train, &r.val, &r.test})
    for (const PrivacyRecord& rec : part->records)
      CHECK(ids.insert(rec.record_id).second);
  CHECK(ids.size() == ds.records.size());
}

TEST_CASE("stratified split holds every class within one record of its share") {
  LabeledDataset ds = labeled_set(imbalanced(900, 90, 10));
  SplitSpec spec;
  spec.seed = 11;
  SplitResult r = make_split(ds, spec);
  auto counts = oracles::count_labels(r.test);
  CHECK(std::fabs(static_cast<double>(counts[0]) - 90.0) <= 1.0);
  CHECK(std::fabs(static_cast<double>(counts[1]) - 9.0) <= 1.0);
  CHECK(std::fabs(static_cast<double>(counts[2]) - 1.0) <= 1.0);
}

TEST_CASE("split rejects undersized datasets and bad fractions") {
  LabeledDataset ds = labeled_set(imbalanced(5, 3, 1));
  SplitSpec spec;
  CHECK_THROWS_AS(make_split(ds, spec), TooSmallError);
  spec.val_frac = 0.5;
  CHECK_THROWS_AS(make_split(labeled_set(imbalanced(20, 0, 0)), spec),
                  ConfigInvalidError);
}

TEST_CASE("kfold: even division, remainder fold sizes, exact cover") {
  LabeledDataset ten = labeled_set(imbalanced(4, 3, 3));
  std::vector<size_t> folds = kfold(ten, 5, 5);
  std::array<size_t, 5> sizes{};
  for (size_t f : folds) ++sizes[f];
  for (size_t s : sizes) CHECK(s == 2);

  LabeledDataset thirteen = labeled_set(imbalanced(6, 4, 3));
  folds = kfold(thirteen, 5, 5);
  std::vector<size_t> counts(5, 0);
  for (size_t f : folds) ++counts[f];
  std::sort(counts.begin(), counts.end(), std::greater<>());
  CHECK(counts == std::vector<size_t>{3, 3, 3, 2, 2});

  // every record lands in exactly one fold
  CHECK(folds.size() == 13);
  for (size_t f : folds) CHECK(f < 5);
}

TEST_CASE("kfold is stratified and rejects undersized input") {
  LabeledDataset ds = labeled_set(imbalanced(50, 25, 25));
  std::vector<size_t> folds = kfold(ds, 5, 9);
  std::array<std::array<size_t, 5>, kNumChoices> per_class{};
  for (size_t i = 0; i < ds.records.size(); ++i)
    ++per_class[choice_index(*ds.records[i].label)][folds[i]];
  for (size_t c = 0; c < kNumChoices; ++c) {
    size_t lo = *std::min_element(per_class[c].begin(), per_class[c].end());
    size_t hi = *std::max_element(per_class[c].begin(), per_class[c].end());
    CHECK(hi - lo <= 1);
  }
  CHECK_THROWS_AS(kfold(labeled_set(imbalanced(2, 1, 0)), 5, 1), TooSmallError);
}

TEST_CASE("metrics: perfect predictions and the hand-tallied fixture") {
  std::vector<PrivacyChoice> truth = {PrivacyChoice::Allow, PrivacyChoice::Deny,
                                      PrivacyChoice::Ask};
  MetricsFragment perfect = compute_metrics(truth, truth);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);

  // Allow: TP=2, FN=1, FP=1 -> recall = precision = f1 = 2/3
  using PC = PrivacyChoice;
  std::vector<PC> t = {PC::Allow, PC::Allow, PC::Allow, PC::Deny, PC::Deny};
  std::vector<PC> p = {PC::Allow, PC::Allow, PC::Deny, PC::Allow, PC::Deny};
  MetricsFragment m = compute_metrics(t, p);
  size_t allow = choice_index(PC::Allow);
  CHECK(m.recall[allow] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.precision[allow] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.f1[allow] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m.accuracy == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("metrics are invariant under a shared permutation") {
  SplitMix64 rng(21);
  std::vector<PrivacyChoice> truth, pred;
  for (int i = 0; i < 200; ++i) {
    truth.push_back(choice_from_index(rng.uniform_below(3)));
    pred.push_back(choice_from_index(rng.uniform_below(3)));
  }
  MetricsFragment before = compute_metrics(truth, pred);
  std::vector<size_t> order(truth.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<PrivacyChoice> truth2, pred2;
  for (size_t i : order) {
    truth2.push_back(truth[i]);
    pred2.push_back(pred[i]);
  }
  MetricsFragment after = compute_metrics(truth2, pred2);
  CHECK(before.accuracy == after.accuracy);
  CHECK(before.macro_recall == after.macro_recall);
  CHECK(before.macro_f1 == after.macro_f1);
  CHECK(before.confusion == after.confusion);
}

TEST_CASE("metric identities: trace ratio, range, equal-support micro identity") {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PrivacyChoice> truth, pred;
    size_t n = 1 + rng.uniform_below(300);
    for (size_t i = 0; i < n; ++i) {
      truth.push_back(choice_from_index(rng.uniform_below(3)));
      pred.push_back(choice_from_index(rng.uniform_below(3)));
    }
    MetricsFragment m = compute_metrics(truth, pred);
    CHECK(m.accuracy ==
          static_cast<double>(m.confusion.trace()) /
              static_cast<double>(m.confusion.total()));
    for (double v : {m.accuracy, m.macro_recall, m.macro_precision, m.macro_f1}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  // equal class support: accuracy equals the mean of per-class recalls
  std::vector<PrivacyChoice> truth, pred;
  SplitMix64 rng2(55);
  for (size_t c = 0; c < kNumChoices; ++c)
    for (int i = 0; i < 40; ++i) {
      truth.push_back(choice_from_index(c));
      pred.push_back(choice_from_index(rng2.uniform_below(3)));
    }
  MetricsFragment m = compute_metrics(truth, pred);
  CHECK(m.accuracy == doctest::Approx(m.macro_recall).epsilon(1e-12));
}

TEST_CASE("length mismatch and empty inputs are rejected") {
  std::vector<PrivacyChoice> a = {PrivacyChoice::Allow};
  std::vector<PrivacyChoice> b;
  CHECK_THROWS_AS(compute_metrics(a, b), LengthMismatchError);
  CHECK_THROWS_AS(compute_metrics(b, b), LengthMismatchError);
}

TEST_CASE("cross-validated evaluation produces a full report") {
  GeneratorConfig gen = default_config();
  gen.volume = 400;
  gen.missing_rate = 0.0;
  LabeledDataset ds = generate(gen);
  ModelContext ctx;
  ctx.gen_config = &gen;
  MetricsReport report = evaluate_model_cv("nb", ds, 5, 42, ctx, "digest0");
  CHECK(report.folds.size() == 5);
  CHECK(report.model == "nb");
  CHECK(report.dataset_size == 400);
  CHECK(report.test.has_value());
  CHECK(report.aggregate.confusion.total() == 360);  // the cv 90%
  CHECK(report.config_digest == "digest0");

  // byte-deterministic modulo wall clock
  MetricsReport again = evaluate_model_cv("nb", ds, 5, 42, ctx, "digest0");
  CHECK(report.digest_payload() == again.digest_payload());
}

TEST_CASE("unknown model kinds are rejected") {
  ModelContext ctx;
  CHECK_THROWS_AS(make_classifier("svm", ctx), ConfigInvalidError);
  CHECK_THROWS_AS(make_classifier("q", ctx), ConfigInvalidError);  // no personas
}

TEST_CASE("prefix datasets nest and preserve records") {
  GeneratorConfig gen = default_config();
  gen.volume = 50;
  LabeledDataset ds = generate(gen);
  LabeledDataset p20 = prefix_dataset(ds, 20);
  CHECK(p20.records.size() == 20);
  for (size_t i = 0; i < 20; ++i) CHECK(p20.records[i] == ds.records[i]);
  CHECK_THROWS_AS(prefix_dataset(p20, 21), TooSmallError);
}

TEST_CASE("small sweep emits one aggregated row per cell, deterministically") {
  SweepConfig cfg;
  cfg.sizes = {60, 120};
  cfg.models = {"nb", "rule"};
  cfg.folds = 3;
  cfg.master_seed = 9;
  cfg.rl.episodes = 10;
  cfg.mlp.epochs = 2;
  SweepResult a = run_scale_sweep(cfg);
  CHECK(a.reports.size() == 4);

  size_t rows = 0;
  for (char c : a.comparison_csv)
    if (c == '\n') ++rows;
  CHECK(rows == 5);  // header + 4 cells
  CHECK(a.comparison_csv.rfind("model,size,fold,accuracy,macro_recall,macro_f1",
                               0) == 0);

  cfg.jobs = 4;
  SweepResult b = run_scale_sweep(cfg);
  CHECK(a.comparison_csv == b.comparison_csv);
  CHECK(a.config_digest == b.config_digest);
  for (size_t i = 0; i < a.reports.size(); ++i)
    CHECK(a.reports[i].digest_payload() == b.reports[i].digest_payload());
}

TEST_CASE("figure CSVs pull accuracy per model and scale") {
  MetricsReport r1, r2;
  r1.model = "nb";
  r1.dataset_size = 10000;
  r1.aggregate.accuracy = 0.5;
  r2.model = "mlp";
  r2.dataset_size = 10000;
  r2.aggregate.accuracy = 0.625;
  std::vector<MetricsReport> reports = {r1, r2};
  CHECK(fig3_csv(reports) == "model,accuracy\nnb,0.5\nmlp,0.625\n");
  CHECK(fig4_csv(reports) ==
        "model,size,accuracy\nnb,10000,0.5\nmlp,10000,0.625\n");
  CHECK(find_report(reports, "mlp", 10000) != nullptr);
  CHECK(find_report(reports, "q", 10000) == nullptr);
}
