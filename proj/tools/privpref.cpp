#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "privpref/csv.hpp"
#include "privpref/errors.hpp"
#include "privpref/naive_bayes.hpp"
#include "privpref/rule_model.hpp"
#include "privpref/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace privpref;

namespace {

std::string single_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  if (fs::path(path).has_parent_path())
    fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed for \"" + path + "\"");
}

json parse_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ParseError("\"" + path + "\": " + single_line(e.what()));
  }
}

std::string hex_digest(const std::string& payload) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(payload)));
  return std::string(buf);
}

// Every output embeds the fully resolved configuration so a run can be
// reproduced from its artifacts alone.
json provenance_block(const std::string& command, const json& resolved) {
  json p;
  p["tool"] = "privpref";
  p["command"] = command;
  p["resolved_config"] = resolved;
  p["config_digest"] = hex_digest(resolved.dump());
  return p;
}

struct SeedOpt {
  uint64_t value = 42;
  CLI::Option* opt = nullptr;

  void attach(CLI::App* cmd) {
    opt = cmd->add_option("--seed", value, "master seed")
              ->envname("PRIVPREF_SEED");
  }
};

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-preference prediction experiments"};
  app.require_subcommand(1);

  // --- gen ---------------------------------------------------------------
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic dataset");
  std::string gen_config_path, gen_out;
  uint64_t gen_volume = 0;
  SeedOpt gen_seed;
  gen_cmd->add_option("--config", gen_config_path, "generator config JSON");
  auto* gen_volume_opt =
      gen_cmd->add_option("--volume", gen_volume, "record count override");
  gen_seed.attach(gen_cmd);
  gen_cmd->add_option("--out", gen_out, "output dataset CSV")->required();

  // --- prep --------------------------------------------------------------
  auto* prep_cmd = app.add_subcommand("prep", "run the preprocessing pipeline");
  std::string prep_data, prep_schema_path, prep_config_path, prep_hier_path,
      prep_out;
  double prep_dp_epsilon = 1.0;
  uint64_t prep_anon_k = 5, prep_knn_k = 5, prep_augment = 0;
  SeedOpt prep_seed;
  prep_cmd->add_option("--data", prep_data, "input dataset CSV")->required();
  prep_cmd->add_option("--schema", prep_schema_path,
                       "schema JSON (default: shipped benchmark schema)");
  prep_cmd->add_option("--config", prep_config_path, "preprocess config JSON");
  prep_cmd->add_option("--hierarchy", prep_hier_path,
                       "generalization hierarchy JSON");
  auto* prep_dp_opt = prep_cmd->add_option(
      "--dp-epsilon", prep_dp_epsilon, "enable randomized response/Laplace");
  auto* prep_anon_opt =
      prep_cmd->add_option("--anonymity-k", prep_anon_k, "k-anonymity k");
  auto* prep_knn_opt =
      prep_cmd->add_option("--knn-k", prep_knn_k, "imputation neighbor count");
  auto* prep_augment_opt = prep_cmd->add_option(
      "--augment-target", prep_augment, "per-class minimum record count");
  prep_seed.attach(prep_cmd);
  prep_cmd->add_option("--out", prep_out, "output dataset CSV")->required();

  // --- train -------------------------------------------------------------
  auto* train_cmd = app.add_subcommand("train", "fit a model and save it");
  std::string train_model, train_data, train_schema_path, train_out;
  SeedOpt train_seed;
  train_cmd->add_option("--model", train_model, "nb|mlp|rule")->required();
  train_cmd->add_option("--data", train_data, "training dataset CSV")->required();
  train_cmd->add_option("--schema", train_schema_path, "schema JSON");
  train_seed.attach(train_cmd);
  train_cmd->add_option("--out", train_out, "output model JSON")->required();

  // --- eval --------------------------------------------------------------
  auto* eval_cmd = app.add_subcommand("eval", "cross-validated evaluation");
  std::string eval_model, eval_data, eval_schema_path, eval_gen_path, eval_out;
  uint64_t eval_folds = 5;
  SeedOpt eval_seed;
  eval_cmd->add_option("--model", eval_model, "nb|mlp|rule|q")->required();
  eval_cmd->add_option("--data", eval_data, "dataset CSV")->required();
  eval_cmd->add_option("--schema", eval_schema_path, "schema JSON");
  eval_cmd->add_option("--gen-config", eval_gen_path,
                       "generator config (environment for q)");
  eval_cmd->add_option("--folds", eval_folds, "cross-validation folds");
  eval_seed.attach(eval_cmd);
  eval_cmd->add_option("--out", eval_out, "output report JSON")->required();

  // --- rl ----------------------------------------------------------------
  auto* rl_cmd = app.add_subcommand("rl", "train the q-learning policy");
  std::string rl_gen_path, rl_out, rl_episodes_out;
  RlConfig rl_cfg;
  SeedOpt rl_seed;
  rl_cmd->add_option("--gen-config", rl_gen_path, "generator config JSON");
  rl_cmd->add_option("--episodes", rl_cfg.episodes, "training episodes");
  rl_cmd->add_option("--steps", rl_cfg.steps_per_episode, "steps per episode");
  rl_cmd->add_option("--alpha", rl_cfg.alpha, "learning rate");
  rl_cmd->add_option("--gamma", rl_cfg.gamma, "discount factor");
  rl_cmd->add_option("--epsilon-decay", rl_cfg.epsilon_decay,
                     "per-episode epsilon decay");
  rl_seed.attach(rl_cmd);
  rl_cmd->add_option("--out", rl_out, "output q-table JSON")->required();
  rl_cmd->add_option("--episodes-out", rl_episodes_out,
                     "episode log CSV (default: <out>.episodes.csv)");

  // --- sweep -------------------------------------------------------------
  auto* sweep_cmd = app.add_subcommand("sweep", "data-scale comparison sweep");
  std::string sweep_gen_path, sweep_sizes = "1000,5000,10000,20000",
              sweep_models = "nb,mlp,q,rule", sweep_out_dir;
  uint64_t sweep_folds = 5;
  unsigned sweep_jobs = 1;
  double sweep_dp_epsilon = 1.0;
  uint64_t sweep_anon_k = 5, sweep_knn_k = 5;
  SeedOpt sweep_seed;
  sweep_cmd->add_option("--gen-config", sweep_gen_path, "generator config JSON");
  sweep_cmd->add_option("--sizes", sweep_sizes, "comma-separated scales");
  sweep_cmd->add_option("--models", sweep_models, "comma-separated model kinds");
  sweep_cmd->add_option("--folds", sweep_folds, "cross-validation folds");
  sweep_cmd->add_option("--jobs", sweep_jobs, "worker threads for cells");
  auto* sweep_dp_opt = sweep_cmd->add_option(
      "--dp-epsilon", sweep_dp_epsilon, "enable randomized response/Laplace");
  auto* sweep_anon_opt =
      sweep_cmd->add_option("--anonymity-k", sweep_anon_k, "k-anonymity k");
  auto* sweep_knn_opt =
      sweep_cmd->add_option("--knn-k", sweep_knn_k, "imputation neighbor count");
  sweep_seed.attach(sweep_cmd);
  sweep_cmd->add_option("--out-dir", sweep_out_dir, "output directory")
      ->required();

  // --- report ------------------------------------------------------------
  auto* report_cmd =
      app.add_subcommand("report", "emit comparison plot data CSVs");
  std::string report_dir, report_episodes, report_out_dir;
  report_cmd->add_option("--reports", report_dir, "directory of report JSONs")
      ->required();
  report_cmd->add_option("--episodes", report_episodes,
                         "episode log CSV for the reward curve");
  report_cmd->add_option("--out-dir", report_out_dir, "output directory")
      ->required();

  try {
    app.parse(argc, argv);

    if (*gen_cmd) {
      GeneratorConfig config = gen_config_path.empty()
                                   ? default_config()
                                   : GeneratorConfig::from_json(
                                         parse_json_file(gen_config_path));
      if (gen_seed.opt->count()) config.master_seed = gen_seed.value;
      if (gen_volume_opt->count()) config.volume = gen_volume;
      LabeledDataset ds = generate(config);
      save_dataset(ds, gen_out);
      json resolved = config.to_json();
      write_file(gen_out + ".provenance.json",
                 provenance_block("gen", resolved).dump(2) + "\n");
      return 0;
    }

    if (*prep_cmd) {
      FeatureSchema schema =
          prep_schema_path.empty()
              ? default_config().schema
              : FeatureSchema::from_json(parse_json_file(prep_schema_path));
      LabeledDataset ds = load_dataset(prep_data, schema);
      PreprocessConfig cfg =
          prep_config_path.empty()
              ? PreprocessConfig{}
              : PreprocessConfig::from_json(parse_json_file(prep_config_path));
      if (prep_dp_opt->count()) {
        cfg.dp_enabled = true;
        cfg.dp_epsilon = prep_dp_epsilon;
      }
      if (prep_anon_opt->count()) cfg.anonymity_k = prep_anon_k;
      if (prep_knn_opt->count()) cfg.knn_k = prep_knn_k;
      if (prep_augment_opt->count()) cfg.augment_target = prep_augment;
      if (prep_seed.opt->count() || cfg.seed == 0) cfg.seed = prep_seed.value;
      GeneralizationHierarchy hierarchy =
          prep_hier_path.empty()
              ? default_hierarchy(schema)
              : GeneralizationHierarchy::from_json(
                    parse_json_file(prep_hier_path));
      PipelineResult result = preprocess_pipeline(ds, cfg, hierarchy);
      save_dataset(result.data, prep_out);
      json resolved;
      resolved["preprocess"] = cfg.to_json();
      resolved["hierarchy"] = hierarchy.to_json();
      resolved["schema_digest"] = schema.digest();
      json prov = provenance_block("prep", resolved);
      prov["pipeline"] = result.provenance;
      write_file(prep_out + ".provenance.json", prov.dump(2) + "\n");
      return 0;
    }

    if (*train_cmd) {
      FeatureSchema schema =
          train_schema_path.empty()
              ? default_config().schema
              : FeatureSchema::from_json(parse_json_file(train_schema_path));
      LabeledDataset ds = load_dataset(train_data, schema);
      json params;
      if (train_model == "nb") {
        params = nb_fit(ds).to_json();
      } else if (train_model == "mlp") {
        MlpConfig cfg;
        cfg.seed = derive_seed(train_seed.value, "train/mlp");
        params["schema"] = ds.schema.to_json();
        params["params"] = mlp_train(cfg, ds).to_json();
      } else if (train_model == "rule") {
        params["schema"] = ds.schema.to_json();
        params["table"] = default_rule_table(ds.schema).to_json();
      } else {
        throw ConfigInvalidError("train supports nb|mlp|rule, got \"" +
                                 train_model + "\"");
      }
      json resolved = {{"model", train_model},
                       {"data", train_data},
                       {"master_seed", train_seed.value}};
      json out;
      out["format_version"] = 1;
      out["kind"] = train_model;
      out["schema_digest"] = ds.schema.digest();
      out["params"] = params;
      out["provenance"] = provenance_block("train", resolved);
      write_file(train_out, out.dump(2) + "\n");
      return 0;
    }

    if (*eval_cmd) {
      FeatureSchema schema =
          eval_schema_path.empty()
              ? default_config().schema
              : FeatureSchema::from_json(parse_json_file(eval_schema_path));
      LabeledDataset ds = load_dataset(eval_data, schema);
      GeneratorConfig gen_config =
          eval_gen_path.empty()
              ? default_config()
              : GeneratorConfig::from_json(parse_json_file(eval_gen_path));
      ModelContext ctx;
      ctx.gen_config = &gen_config;
      json resolved = {{"model", eval_model},
                       {"folds", eval_folds},
                       {"master_seed", eval_seed.value},
                       {"schema_digest", schema.digest()}};
      if (eval_model == "q") resolved["gen_config"] = gen_config.to_json();
      const std::string digest = hex_digest(resolved.dump());
      MetricsReport report = evaluate_model_cv(eval_model, ds, eval_folds,
                                               eval_seed.value, ctx, digest);
      json out = report.to_json();
      out["provenance"] = provenance_block("eval", resolved);
      write_file(eval_out, out.dump(2) + "\n");
      return 0;
    }

    if (*rl_cmd) {
      GeneratorConfig gen_config =
          rl_gen_path.empty()
              ? default_config()
              : GeneratorConfig::from_json(parse_json_file(rl_gen_path));
      rl_cfg.seed = derive_seed(rl_seed.value, "rl");
      PrivacyEnv env(gen_config);
      auto [q, log] = train_q(env, rl_cfg);
      json resolved = {{"alpha", rl_cfg.alpha},
                       {"gamma", rl_cfg.gamma},
                       {"epsilon0", rl_cfg.epsilon0},
                       {"epsilon_decay", rl_cfg.epsilon_decay},
                       {"epsilon_floor", rl_cfg.epsilon_floor},
                       {"episodes", rl_cfg.episodes},
                       {"steps_per_episode", rl_cfg.steps_per_episode},
                       {"master_seed", rl_seed.value}};
      json out = qtable_to_json(q, env.space());
      out["provenance"] = provenance_block("rl", resolved);
      write_file(rl_out, out.dump(2) + "\n");
      const std::string episodes_path =
          rl_episodes_out.empty() ? rl_out + ".episodes.csv" : rl_episodes_out;
      write_file(episodes_path, episode_log_to_csv(log));
      return 0;
    }

    if (*sweep_cmd) {
      SweepConfig cfg;
      if (!sweep_gen_path.empty())
        cfg.gen = GeneratorConfig::from_json(parse_json_file(sweep_gen_path));
      cfg.hierarchy = default_hierarchy(cfg.gen.schema);
      cfg.models = split_csv_list(sweep_models);
      cfg.sizes.clear();
      for (const std::string& s : split_csv_list(sweep_sizes))
        cfg.sizes.push_back(std::stoull(s));
      cfg.folds = sweep_folds;
      cfg.master_seed = sweep_seed.value;
      cfg.jobs = sweep_jobs;
      if (sweep_dp_opt->count()) {
        cfg.prep.dp_enabled = true;
        cfg.prep.dp_epsilon = sweep_dp_epsilon;
      }
      if (sweep_anon_opt->count()) cfg.prep.anonymity_k = sweep_anon_k;
      if (sweep_knn_opt->count()) cfg.prep.knn_k = sweep_knn_k;
      SweepResult result = run_scale_sweep(cfg);
      fs::create_directories(sweep_out_dir);
      write_file(sweep_out_dir + "/comparison.csv", result.comparison_csv);
      for (const MetricsReport& r : result.reports) {
        json out = r.to_json();
        write_file(sweep_out_dir + "/report_" + r.model + "_" +
                       std::to_string(r.dataset_size) + ".json",
                   out.dump(2) + "\n");
      }
      json resolved = {{"models", cfg.models},
                       {"sizes", cfg.sizes},
                       {"folds", cfg.folds},
                       {"master_seed", cfg.master_seed},
                       {"prep", cfg.prep.to_json()},
                       {"gen", cfg.gen.to_json()},
                       {"config_digest", result.config_digest}};
      write_file(sweep_out_dir + "/sweep_config.json",
                 provenance_block("sweep", resolved).dump(2) + "\n");
      return 0;
    }

    if (*report_cmd) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(report_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("report_", 0) == 0 && entry.path().extension() == ".json")
          files.push_back(entry.path());
      }
      if (files.empty())
        throw ConfigInvalidError("no report_*.json files in \"" + report_dir +
                                 "\"");
      std::sort(files.begin(), files.end());
      std::vector<MetricsReport> reports;
      std::string digest;
      for (const fs::path& f : files) {
        json j = parse_json_file(f.string());
        MetricsReport r;
        r.model = j.at("model").get<std::string>();
        r.dataset_size = j.at("dataset_size").get<size_t>();
        r.config_digest = j.at("config_digest").get<std::string>();
        r.aggregate.accuracy = j.at("aggregate").at("accuracy").get<double>();
        if (digest.empty()) digest = r.config_digest;
        if (r.config_digest != digest)
          throw ConfigInvalidError("mixed config digests: \"" + f.string() +
                                   "\" has " + r.config_digest + ", expected " +
                                   digest);
        reports.push_back(std::move(r));
      }
      fs::create_directories(report_out_dir);
      write_file(report_out_dir + "/fig3.csv", fig3_csv(reports));
      write_file(report_out_dir + "/fig4.csv", fig4_csv(reports));
      if (!report_episodes.empty()) {
        std::string csv = read_file(report_episodes);
        if (csv.rfind("episode,reward,cumulative_reward,epsilon", 0) != 0)
          throw ParseError("\"" + report_episodes +
                           "\" is not an episode log CSV");
        write_file(report_out_dir + "/fig5.csv", csv);
      }
      return 0;
    }

    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: Usage: " << single_line(e.what()) << "\n";
    return 1;
  } catch (const InternalError& e) {
    std::cerr << "error: " << e.kind() << ": " << single_line(e.what()) << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.kind() << ": " << single_line(e.what()) << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: ParseError: " << single_line(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: Internal: " << single_line(e.what()) << "\n";
    return 3;
  }
}
