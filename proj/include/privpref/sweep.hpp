#pragma once

#include "privpref/eval.hpp"
#include "privpref/preprocess.hpp"

namespace privpref {

struct SweepConfig {
  GeneratorConfig gen;
  PreprocessConfig prep;
  GeneralizationHierarchy hierarchy;
  std::vector<std::string> models = {"nb", "mlp", "q", "rule"};
  std::vector<size_t> sizes = {1000, 5000, 10000, 20000};
  size_t folds = 5;
  uint64_t master_seed = 42;
  unsigned jobs = 1;  // cell parallelism; never affects results
  RlConfig rl;
  MlpConfig mlp;

  SweepConfig() : gen(default_config()) {
    hierarchy = default_hierarchy(gen.schema);
  }

  void validate() const;
  // Digest over everything that determines results (jobs excluded).
  std::string digest() const;
};

struct SweepResult {
  std::vector<MetricsReport> reports;  // sizes ascending, models in order
  std::string comparison_csv;
  std::string config_digest;
};

// One generation at the largest size; smaller scales are prefixes of it, so
// scale effects are not confounded by resampling. Each size runs the full
// preprocessing pipeline once; each (model, size) cell trains and evaluates
// with 5-fold CV on its own derived random stream.
SweepResult run_scale_sweep(const SweepConfig& cfg);

// "model,size,fold,accuracy,macro_recall,macro_f1"; one aggregated row per
// (model, size) cell with fold = "agg".
std::string comparison_csv(const std::vector<MetricsReport>& reports);

// Plot data: per-model accuracy at the 10k scale (or the largest available).
std::string fig3_csv(const std::vector<MetricsReport>& reports);
// Plot data: accuracy for every (model, size) cell.
std::string fig4_csv(const std::vector<MetricsReport>& reports);

const MetricsReport* find_report(const std::vector<MetricsReport>& reports,
                                 const std::string& model, size_t size);

}  // namespace privpref
