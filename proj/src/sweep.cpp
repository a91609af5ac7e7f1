#include "privpref/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

#include "privpref/csv.hpp"
#include "privpref/errors.hpp"

namespace privpref {

void SweepConfig::validate() const {
  gen.validate();
  prep.validate();
  hierarchy.validate(gen.schema);
  rl.validate();
  mlp.validate();
  if (models.empty()) throw ConfigInvalidError("sweep needs at least one model");
  for (const std::string& m : models)
    if (m != "nb" && m != "mlp" && m != "q" && m != "rule")
      throw ConfigInvalidError("unknown model kind \"" + m + "\"");
  if (sizes.empty()) throw ConfigInvalidError("sweep needs at least one size");
  for (size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 10)
      throw ConfigInvalidError("sweep sizes must be >= 10");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw ConfigInvalidError("sweep sizes must be strictly ascending");
  }
  if (jobs < 1) throw ConfigInvalidError("jobs must be >= 1");
}

std::string SweepConfig::digest() const {
  nlohmann::json j;
  j["gen"] = gen.to_json();
  j["prep"] = prep.to_json();
  j["hierarchy"] = hierarchy.to_json();
  j["models"] = models;
  j["sizes"] = sizes;
  j["folds"] = folds;
  j["master_seed"] = master_seed;
  j["rl"] = {{"alpha", rl.alpha},
             {"gamma", rl.gamma},
             {"epsilon0", rl.epsilon0},
             {"epsilon_decay", rl.epsilon_decay},
             {"epsilon_floor", rl.epsilon_floor},
             {"episodes", rl.episodes},
             {"steps_per_episode", rl.steps_per_episode}};
  j["mlp"] = {{"hidden1", mlp.hidden1},
              {"hidden2", mlp.hidden2},
              {"learning_rate", mlp.learning_rate},
              {"epochs", mlp.epochs},
              {"batch_size", mlp.batch_size}};
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  return std::string(buf);
}

SweepResult run_scale_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::string digest = cfg.digest();

  GeneratorConfig gen = cfg.gen;
  gen.volume = cfg.sizes.back();
  gen.master_seed = derive_seed(cfg.master_seed, "sweep/gen");
  const LabeledDataset master = generate(gen);

  // Per-size preprocessing, shared by every model at that size.
  std::vector<LabeledDataset> prepared;
  prepared.reserve(cfg.sizes.size());
  for (size_t s : cfg.sizes) {
    PreprocessConfig prep = cfg.prep;
    prep.seed = derive_seed(cfg.master_seed, "sweep/prep", {s});
    prepared.push_back(
        preprocess_pipeline(prefix_dataset(master, s), prep, cfg.hierarchy)
            .data);
  }

  struct Cell {
    size_t size_idx;
    size_t model_idx;
  };
  std::vector<Cell> cells;
  for (size_t si = 0; si < cfg.sizes.size(); ++si)
    for (size_t mi = 0; mi < cfg.models.size(); ++mi) cells.push_back({si, mi});

  std::vector<MetricsReport> reports(cells.size());
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      size_t c = next.fetch_add(1);
      if (c >= cells.size()) return;
      try {
        const Cell& cell = cells[c];
        const size_t size = cfg.sizes[cell.size_idx];
        const std::string& model = cfg.models[cell.model_idx];
        ModelContext ctx;
        ctx.gen_config = &cfg.gen;
        ctx.rl_config = cfg.rl;
        ctx.mlp_config = cfg.mlp;
        ctx.nominal_size = size;
        uint64_t cell_seed =
            derive_seed(cfg.master_seed, "sweep/cell", {size, fnv1a64(model)});
        MetricsReport r = evaluate_model_cv(model, prepared[cell.size_idx],
                                            cfg.folds, cell_seed, ctx, digest);
        r.dataset_size = size;  // nominal scale, not post-pipeline row count
        reports[c] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (cfg.jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < cfg.jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  SweepResult result;
  result.reports = std::move(reports);
  result.config_digest = digest;
  result.comparison_csv = comparison_csv(result.reports);
  return result;
}

std::string comparison_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "model,size,fold,accuracy,macro_recall,macro_f1\n";
  for (const MetricsReport& r : reports) {
    out += r.model;
    out += ',';
    out += std::to_string(r.dataset_size);
    out += ",agg,";
    out += format_number(r.aggregate.accuracy);
    out += ',';
    out += format_number(r.aggregate.macro_recall);
    out += ',';
    out += format_number(r.aggregate.macro_f1);
    out += '\n';
  }
  return out;
}

const MetricsReport* find_report(const std::vector<MetricsReport>& reports,
                                 const std::string& model, size_t size) {
  for (const MetricsReport& r : reports)
    if (r.model == model && r.dataset_size == size) return &r;
  return nullptr;
}

std::string fig3_csv(const std::vector<MetricsReport>& reports) {
  size_t best_size = 0;
  bool has_10k = false;
  for (const MetricsReport& r : reports) {
    if (r.dataset_size == 10000) has_10k = true;
    best_size = std::max(best_size, r.dataset_size);
  }
  const size_t size = has_10k ? 10000 : best_size;
  std::string out = "model,accuracy\n";
  for (const MetricsReport& r : reports) {
    if (r.dataset_size != size) continue;
    out += r.model;
    out += ',';
    out += format_number(r.aggregate.accuracy);
    out += '\n';
  }
  return out;
}

std::string fig4_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "model,size,accuracy\n";
  for (const MetricsReport& r : reports) {
    out += r.model;
    out += ',';
    out += std::to_string(r.dataset_size);
    out += ',';
    out += format_number(r.aggregate.accuracy);
    out += '\n';
  }
  return out;
}

}  // namespace privpref
