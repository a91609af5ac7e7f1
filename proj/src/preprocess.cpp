#include "privpref/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "privpref/csv.hpp"
#include "privpref/errors.hpp"
#include "privpref/rng.hpp"

namespace privpref {

void PreprocessConfig::validate() const {
  if (knn_k < 1) throw ConfigInvalidError("knn_k must be >= 1");
  if (!(dp_epsilon > 0.0) || !std::isfinite(dp_epsilon))
    throw ConfigInvalidError("dp_epsilon must be a positive finite value");
  if (anonymity_k < 1) throw ConfigInvalidError("anonymity_k must be >= 1");
}

nlohmann::json PreprocessConfig::to_json() const {
  nlohmann::json j;
  j["knn_k"] = knn_k;
  j["dp_epsilon"] = dp_epsilon;
  j["dp_enabled"] = dp_enabled;
  j["anonymity_k"] = anonymity_k;
  if (augment_target)
    j["augment_target"] = *augment_target;
  else
    j["augment_target"] = nullptr;
  j["seed"] = seed;
  return j;
}

PreprocessConfig PreprocessConfig::from_json(const nlohmann::json& j) {
  PreprocessConfig c;
  c.knn_k = j.value("knn_k", size_t{5});
  c.dp_epsilon = j.value("dp_epsilon", 1.0);
  c.dp_enabled = j.value("dp_enabled", false);
  c.anonymity_k = j.value("anonymity_k", size_t{5});
  if (j.contains("augment_target") && !j.at("augment_target").is_null())
    c.augment_target = j.at("augment_target").get<uint64_t>();
  c.seed = j.value("seed", uint64_t{0});
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// deduplicate

namespace {

std::string dedup_key(const PrivacyRecord& r) {
  std::string key;
  for (const CellValue& v : r.values) {
    switch (v.kind) {
      case CellValue::Kind::Missing: key += '\x01'; break;
      case CellValue::Kind::Categorical:
        key += '\x02';
        key += v.cat;
        break;
      case CellValue::Kind::Numeric: {
        key += '\x03';
        double d = v.num == 0.0 ? 0.0 : v.num;  // fold -0 into 0
        key.append(reinterpret_cast<const char*>(&d), sizeof(double));
        break;
      }
    }
    key += '\x1f';
  }
  key += r.label ? static_cast<char>('A' + choice_index(*r.label)) : '\x01';
  return key;
}

}  // namespace

LabeledDataset deduplicate(const LabeledDataset& ds) {
  LabeledDataset out;
  out.schema = ds.schema;
  out.provenance = ds.provenance;
  std::unordered_map<std::string, bool> seen;
  seen.reserve(ds.records.size());
  for (const PrivacyRecord& r : ds.records) {
    if (seen.emplace(dedup_key(r), true).second) out.records.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// knn_impute

LabeledDataset knn_impute(const LabeledDataset& ds,
                          const PreprocessConfig& cfg) {
  cfg.validate();
  const size_t n = ds.records.size();
  const size_t nf = ds.schema.features.size();

  std::vector<double> range(nf, 1.0);
  for (size_t f = 0; f < nf; ++f) {
    if (ds.schema.features[f].is_numeric()) {
      const NumericKind& k = ds.schema.features[f].numeric();
      range[f] = k.max - k.min;
    }
  }

  auto distance = [&](const PrivacyRecord& a, const PrivacyRecord& b) {
    double d = 0.0;
    for (size_t f = 0; f < nf; ++f) {
      const CellValue& va = a.values[f];
      const CellValue& vb = b.values[f];
      if (va.is_missing() || vb.is_missing()) continue;
      if (ds.schema.features[f].is_categorical()) {
        if (va.cat != vb.cat) d += 1.0;
      } else {
        d += std::fabs(va.num - vb.num) / range[f];
      }
    }
    return d;
  };

  LabeledDataset out = ds;
  struct Donor {
    double dist;
    uint64_t id;
    size_t idx;
    bool operator<(const Donor& o) const {
      return dist != o.dist ? dist < o.dist : id < o.id;
    }
  };

  std::vector<Donor> candidates;
  candidates.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const PrivacyRecord& r = ds.records[i];
    bool incomplete = false;
    for (const CellValue& v : r.values) incomplete |= v.is_missing();
    if (!incomplete) continue;

    std::vector<double> dist_to(n, 0.0);
    for (size_t j = 0; j < n; ++j)
      if (j != i) dist_to[j] = distance(r, ds.records[j]);

    for (size_t f = 0; f < nf; ++f) {
      if (!r.values[f].is_missing()) continue;
      candidates.clear();
      for (size_t j = 0; j < n; ++j) {
        if (j == i || ds.records[j].values[f].is_missing()) continue;
        candidates.push_back({dist_to[j], ds.records[j].record_id, j});
      }
      if (candidates.size() < cfg.knn_k)
        throw InsufficientDonorsError(
            "feature \"" + ds.schema.features[f].name + "\" of record " +
            std::to_string(r.record_id) + " has " +
            std::to_string(candidates.size()) + " donors, need " +
            std::to_string(cfg.knn_k));
      std::nth_element(candidates.begin(), candidates.begin() + cfg.knn_k - 1,
                       candidates.end());
      std::sort(candidates.begin(), candidates.begin() + cfg.knn_k);

      if (ds.schema.features[f].is_categorical()) {
        std::map<std::string, size_t> votes;
        for (size_t k = 0; k < cfg.knn_k; ++k)
          ++votes[ds.records[candidates[k].idx].values[f].cat];
        // Sorted map order makes a count tie resolve to the smallest token.
        const std::string* best = nullptr;
        size_t best_count = 0;
        for (const auto& [token, count] : votes) {
          if (count > best_count) {
            best = &token;
            best_count = count;
          }
        }
        out.records[i].values[f] = CellValue::of(*best);
      } else {
        double sum = 0.0;
        for (size_t k = 0; k < cfg.knn_k; ++k)
          sum += ds.records[candidates[k].idx].values[f].num;
        out.records[i].values[f] =
            CellValue::of(sum / static_cast<double>(cfg.knn_k));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// dp_randomize

LabeledDataset dp_randomize(const LabeledDataset& ds,
                            const PreprocessConfig& cfg) {
  cfg.validate();
  if (!cfg.dp_enabled)
    throw ConfigInvalidError("dp_randomize called with dp_enabled = false");
  if (!ds.schema.has_sensitive())
    throw NoSensitiveFeaturesError("schema marks no feature as sensitive");

  const double exp_eps = std::exp(cfg.dp_epsilon);
  const bool keep_all = !std::isfinite(exp_eps);

  LabeledDataset out = ds;
  for (PrivacyRecord& r : out.records) {
    for (size_t f = 0; f < r.values.size(); ++f) {
      const Feature& feat = ds.schema.features[f];
      if (!feat.sensitive || r.values[f].is_missing() || keep_all) continue;
      SplitMix64 rng(derive_seed(cfg.seed, "dp/cell", {r.record_id, f}));
      if (feat.is_categorical()) {
        const auto& domain = feat.categorical().domain;
        const double m = static_cast<double>(domain.size());
        if (domain.size() < 2) continue;
        double keep = exp_eps / (exp_eps + m - 1.0);
        if (!rng.bernoulli(keep)) {
          size_t self = static_cast<size_t>(
              std::find(domain.begin(), domain.end(), r.values[f].cat) -
              domain.begin());
          uint64_t pick = rng.uniform_below(domain.size() - 1);
          size_t idx = pick < self ? pick : pick + 1;
          r.values[f] = CellValue::of(domain[idx]);
        }
      } else {
        const NumericKind& k = feat.numeric();
        double scale = (k.max - k.min) / cfg.dp_epsilon;
        double v = r.values[f].num + rng.laplace(scale);
        r.values[f] = CellValue::of(std::clamp(v, k.min, k.max));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// generalization hierarchy

size_t GeneralizationHierarchy::levels_for(const Feature& f) const {
  auto it = features.find(f.name);
  size_t mids = 0;
  if (it != features.end())
    mids = f.is_categorical() ? it->second.cat_levels.size()
                              : it->second.widths.size();
  return mids + 2;  // identity + ladder + "*"
}

std::string GeneralizationHierarchy::generalize(const Feature& f,
                                                const CellValue& v,
                                                size_t level) const {
  if (v.is_missing()) return "\x01missing";
  if (level == 0)
    return f.is_categorical() ? v.cat : format_number(v.num);
  const size_t top = levels_for(f) - 1;
  if (level >= top) return "*";
  auto it = features.find(f.name);
  if (it == features.end())
    throw ConfigInvalidError("no hierarchy for feature \"" + f.name + "\"");
  if (f.is_categorical()) {
    const auto& level_map = it->second.cat_levels[level - 1];
    auto entry = level_map.find(v.cat);
    if (entry == level_map.end())
      throw ConfigInvalidError("hierarchy for \"" + f.name +
                               "\" does not cover token \"" + v.cat + "\"");
    return entry->second;
  }
  const NumericKind& k = f.numeric();
  double w = it->second.widths[level - 1];
  double i = std::floor((v.num - k.min) / w);
  double lo = k.min + i * w;
  return "[" + format_number(lo) + "-" + format_number(lo + w) + ")";
}

void GeneralizationHierarchy::validate(const FeatureSchema& schema) const {
  for (const auto& [name, fh] : features) {
    auto idx = schema.index_of(name);
    if (!idx)
      throw ConfigInvalidError("hierarchy names unknown feature \"" + name +
                               "\"");
    const Feature& f = schema.features[*idx];
    if (f.is_categorical()) {
      if (!fh.widths.empty())
        throw ConfigInvalidError("feature \"" + name +
                                 "\" is categorical but has numeric widths");
      const auto& domain = f.categorical().domain;
      for (size_t l = 0; l < fh.cat_levels.size(); ++l) {
        for (const std::string& tok : domain)
          if (!fh.cat_levels[l].count(tok))
            throw ConfigInvalidError("hierarchy level " + std::to_string(l + 1) +
                                     " for \"" + name +
                                     "\" does not cover token \"" + tok + "\"");
        if (l > 0) {
          // refinement: equal class at level l implies equal class at l+1
          std::map<std::string, std::string> coarser;
          for (const std::string& tok : domain) {
            const std::string& prev = fh.cat_levels[l - 1].at(tok);
            const std::string& cur = fh.cat_levels[l].at(tok);
            auto [it2, inserted] = coarser.emplace(prev, cur);
            if (!inserted && it2->second != cur)
              throw ConfigInvalidError("hierarchy level " +
                                       std::to_string(l + 1) + " for \"" + name +
                                       "\" splits class \"" + prev + "\"");
          }
        }
      }
    } else {
      if (!fh.cat_levels.empty())
        throw ConfigInvalidError("feature \"" + name +
                                 "\" is numeric but has categorical levels");
      double prev = 0.0;
      for (size_t l = 0; l < fh.widths.size(); ++l) {
        double w = fh.widths[l];
        if (!(w > 0.0) || !std::isfinite(w))
          throw ConfigInvalidError("width for \"" + name +
                                   "\" must be positive");
        if (l > 0) {
          if (w <= prev || std::fabs(std::fmod(w, prev)) > 1e-9)
            throw ConfigInvalidError(
                "widths for \"" + name +
                "\" must widen by integer multiples for refinement");
        }
        prev = w;
      }
    }
  }
}

nlohmann::json GeneralizationHierarchy::to_json() const {
  nlohmann::json j;
  nlohmann::json feats;
  for (const auto& [name, fh] : features) {
    nlohmann::json jf;
    if (!fh.widths.empty()) {
      jf["kind"] = "numeric";
      jf["widths"] = fh.widths;
    } else {
      jf["kind"] = "categorical";
      jf["levels"] = fh.cat_levels;
    }
    feats[name] = jf;
  }
  j["features"] = feats;
  return j;
}

GeneralizationHierarchy GeneralizationHierarchy::from_json(
    const nlohmann::json& j) {
  GeneralizationHierarchy h;
  for (const auto& [name, jf] : j.at("features").items()) {
    FeatureHierarchy fh;
    std::string kind = jf.at("kind").get<std::string>();
    if (kind == "numeric") {
      fh.widths = jf.at("widths").get<std::vector<double>>();
    } else if (kind == "categorical") {
      fh.cat_levels =
          jf.at("levels")
              .get<std::vector<std::map<std::string, std::string>>>();
    } else {
      throw ConfigInvalidError("unknown hierarchy kind \"" + kind + "\"");
    }
    h.features[name] = std::move(fh);
  }
  return h;
}

GeneralizationHierarchy default_hierarchy(const FeatureSchema& schema) {
  GeneralizationHierarchy h;
  for (const Feature& f : schema.features) {
    if (!f.quasi_identifier) continue;
    FeatureHierarchy fh;
    if (f.is_numeric()) fh.widths = {4.0, 12.0};
    h.features[f.name] = fh;
  }
  return h;
}

// ---------------------------------------------------------------------------
// k_anonymize

namespace {

struct LevelVector {
  std::vector<size_t> levels;
  size_t sum = 0;
};

std::vector<LevelVector> level_candidates(const std::vector<size_t>& max_levels) {
  std::vector<LevelVector> out;
  std::vector<size_t> cur(max_levels.size(), 0);
  while (true) {
    LevelVector lv;
    lv.levels = cur;
    for (size_t l : cur) lv.sum += l;
    out.push_back(lv);
    size_t i = cur.size();
    while (i > 0) {
      --i;
      if (cur[i] + 1 < max_levels[i]) {
        ++cur[i];
        std::fill(cur.begin() + i + 1, cur.end(), 0);
        break;
      }
      if (i == 0) {
        std::stable_sort(out.begin(), out.end(),
                         [](const LevelVector& a, const LevelVector& b) {
                           if (a.sum != b.sum) return a.sum < b.sum;
                           return a.levels < b.levels;
                         });
        return out;
      }
    }
  }
}

}  // namespace

KAnonymizeResult k_anonymize(const LabeledDataset& ds,
                             const GeneralizationHierarchy& hierarchy,
                             const PreprocessConfig& cfg) {
  cfg.validate();
  hierarchy.validate(ds.schema);
  std::vector<size_t> qi;
  for (size_t f = 0; f < ds.schema.features.size(); ++f)
    if (ds.schema.features[f].quasi_identifier) qi.push_back(f);
  if (qi.empty())
    throw ConfigInvalidError("schema declares no quasi-identifier");

  const size_t n = ds.records.size();
  const double budget = 0.05 * static_cast<double>(n);

  std::vector<size_t> max_levels;
  for (size_t f : qi)
    max_levels.push_back(hierarchy.levels_for(ds.schema.features[f]));

  auto class_keys = [&](const std::vector<size_t>& levels) {
    std::vector<std::string> keys(n);
    for (size_t i = 0; i < n; ++i) {
      std::string key;
      for (size_t q = 0; q < qi.size(); ++q) {
        key += hierarchy.generalize(ds.schema.features[qi[q]],
                                    ds.records[i].values[qi[q]], levels[q]);
        key += '\x1f';
      }
      keys[i] = std::move(key);
    }
    return keys;
  };

  for (const LevelVector& lv : level_candidates(max_levels)) {
    std::vector<std::string> keys = class_keys(lv.levels);
    std::unordered_map<std::string, size_t> class_size;
    for (const std::string& k : keys) ++class_size[k];
    size_t suppressed = 0;
    for (const auto& [key, count] : class_size)
      if (count < cfg.anonymity_k) suppressed += count;
    if (static_cast<double>(suppressed) > budget) continue;

    // Feasible: materialize the recoded dataset.
    KAnonymizeResult result;
    result.suppressed_count = suppressed;
    result.chosen_levels = lv.levels;
    result.data.provenance = ds.provenance;
    result.data.schema = ds.schema;
    for (size_t q = 0; q < qi.size(); ++q) {
      const size_t level = lv.levels[q];
      if (level == 0) continue;
      Feature& f = result.data.schema.features[qi[q]];
      const Feature& orig = ds.schema.features[qi[q]];
      std::vector<std::string> domain;
      const size_t top = hierarchy.levels_for(orig) - 1;
      if (level >= top) {
        domain = {"*"};
      } else if (orig.is_categorical()) {
        for (const std::string& tok : orig.categorical().domain) {
          std::string cls =
              hierarchy.generalize(orig, CellValue::of(tok), level);
          if (std::find(domain.begin(), domain.end(), cls) == domain.end())
            domain.push_back(cls);
        }
      } else {
        const NumericKind& k = orig.numeric();
        double w = hierarchy.features.at(orig.name).widths[level - 1];
        // Same arithmetic as generalize() so labels match bit-for-bit.
        for (size_t b = 0;; ++b) {
          double lo = k.min + static_cast<double>(b) * w;
          if (lo > k.max) break;
          domain.push_back("[" + format_number(lo) + "-" +
                           format_number(lo + w) + ")");
        }
      }
      f.kind = CategoricalKind{std::move(domain)};
    }
    for (size_t i = 0; i < n; ++i) {
      if (class_size.at(keys[i]) < cfg.anonymity_k) continue;
      PrivacyRecord r = ds.records[i];
      for (size_t q = 0; q < qi.size(); ++q) {
        const size_t level = lv.levels[q];
        if (level == 0 || r.values[qi[q]].is_missing()) continue;
        r.values[qi[q]] = CellValue::of(hierarchy.generalize(
            ds.schema.features[qi[q]], ds.records[i].values[qi[q]], level));
      }
      result.data.records.push_back(std::move(r));
    }
    return result;
  }
  throw AnonymizationInfeasibleError(
      "no generalization meets k = " + std::to_string(cfg.anonymity_k) +
      " within the 5% suppression budget");
}

// ---------------------------------------------------------------------------
// augment_oversample

LabeledDataset augment_oversample(const LabeledDataset& ds,
                                  const PreprocessConfig& cfg) {
  cfg.validate();
  if (!cfg.augment_target)
    throw ConfigInvalidError("augment_oversample called without augment_target");
  const uint64_t target = *cfg.augment_target;

  std::array<std::vector<size_t>, kNumChoices> members;
  for (size_t i = 0; i < ds.records.size(); ++i)
    if (ds.records[i].label)
      members[choice_index(*ds.records[i].label)].push_back(i);

  LabeledDataset out = ds;
  uint64_t next_id = 0;
  for (const PrivacyRecord& r : ds.records)
    next_id = std::max(next_id, r.record_id);
  ++next_id;

  const uint64_t first_new_id = next_id;
  for (size_t c = 0; c < kNumChoices; ++c) {
    const auto& pool = members[c];
    if (pool.size() >= target) continue;
    if (pool.empty())
      throw EmptyClassError("class " +
                            std::string(choice_token(choice_from_index(c))) +
                            " has no members to oversample from");
    const uint64_t need = target - pool.size();
    for (uint64_t j = 0; j < need; ++j) {
      SplitMix64 rng(derive_seed(cfg.seed, "augment/record", {c, j}));
      const PrivacyRecord& src = ds.records[pool[rng.uniform_below(pool.size())]];
      PrivacyRecord fresh = src;
      fresh.record_id = next_id++;
      for (size_t f = 0; f < fresh.values.size(); ++f) {
        const Feature& feat = ds.schema.features[f];
        if (feat.is_categorical()) {
          if (rng.bernoulli(0.3)) {
            const PrivacyRecord& donor =
                ds.records[pool[rng.uniform_below(pool.size())]];
            fresh.values[f] = donor.values[f];
          }
        } else if (!fresh.values[f].is_missing()) {
          const NumericKind& k = feat.numeric();
          double jitter = (rng.uniform() * 0.1 - 0.05) * (k.max - k.min);
          fresh.values[f] =
              CellValue::of(std::clamp(fresh.values[f].num + jitter, k.min, k.max));
        }
      }
      out.records.push_back(std::move(fresh));
    }
  }
  if (next_id > first_new_id)
    out.provenance += "; augmented ids " + std::to_string(first_new_id) + ".." +
                      std::to_string(next_id - 1);
  return out;
}

// ---------------------------------------------------------------------------
// pipeline

PipelineResult preprocess_pipeline(const LabeledDataset& ds,
                                   const PreprocessConfig& cfg,
                                   const GeneralizationHierarchy& hierarchy) {
  cfg.validate();
  PipelineResult result;
  nlohmann::json ops = nlohmann::json::array();

  const size_t input_rows = ds.records.size();
  LabeledDataset cur = deduplicate(ds);
  ops.push_back("deduplicate");
  const size_t deduplicated = input_rows - cur.records.size();

  cur = knn_impute(cur, cfg);
  ops.push_back("knn_impute");

  size_t suppressed = 0;
  std::vector<size_t> chosen_levels;
  if (cur.schema.has_quasi_identifier()) {
    KAnonymizeResult ka = k_anonymize(cur, hierarchy, cfg);
    cur = std::move(ka.data);
    suppressed = ka.suppressed_count;
    chosen_levels = ka.chosen_levels;
    ops.push_back("k_anonymize");
  }

  if (cfg.dp_enabled) {
    cur = dp_randomize(cur, cfg);
    ops.push_back("dp_randomize");
  }

  if (cfg.augment_target) {
    cur = augment_oversample(cur, cfg);
    ops.push_back("augment_oversample");
  }

  result.provenance["ops"] = ops;
  result.provenance["input_rows"] = input_rows;
  result.provenance["output_rows"] = cur.records.size();
  result.provenance["deduplicated"] = deduplicated;
  result.provenance["suppressed_count"] = suppressed;
  result.provenance["chosen_levels"] = chosen_levels;
  result.provenance["dp_epsilon"] =
      cfg.dp_enabled ? nlohmann::json(cfg.dp_epsilon) : nlohmann::json(nullptr);
  result.provenance["anonymity_k"] = cfg.anonymity_k;
  result.provenance["knn_k"] = cfg.knn_k;
  result.provenance["seed"] = cfg.seed;
  result.provenance["augment_target"] =
      cfg.augment_target ? nlohmann::json(*cfg.augment_target)
                         : nlohmann::json(nullptr);
  result.data = std::move(cur);
  return result;
}

}  // namespace privpref
