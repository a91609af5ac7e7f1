#pragma once

// Independent brute-force oracles used only by tests. These deliberately share
// no code with the library paths they check: counting instead of log-space
// scoring, full pairwise scans instead of incremental structures, numeric
// differentiation instead of backpropagation.

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "privpref/datagen.hpp"
#include "privpref/env.hpp"
#include "privpref/mlp.hpp"
#include "privpref/preprocess.hpp"

namespace oracles {

using namespace privpref;

// --- naive bayes ------------------------------------------------------------
// Direct count-and-normalize posterior for categorical-only schemas.
// smoothing may be zero (the library enforces >= 1); with zero smoothing the
// result is exactly scale-invariant in the counts.
inline ProbVector nb_posterior_bruteforce(const LabeledDataset& train,
                                          const PrivacyRecord& query,
                                          double smoothing) {
  const size_t nf = train.schema.features.size();
  for (const Feature& f : train.schema.features)
    if (!f.is_categorical())
      throw std::logic_error("oracle handles categorical features only");

  const double n = static_cast<double>(train.records.size());
  std::array<double, kNumChoices> class_count{};
  for (const PrivacyRecord& r : train.records)
    class_count[choice_index(*r.label)] += 1.0;

  std::array<double, kNumChoices> unnorm{};
  for (size_t y = 0; y < kNumChoices; ++y) {
    double p = (class_count[y] + smoothing) /
               (n + smoothing * static_cast<double>(kNumChoices));
    for (size_t f = 0; f < nf; ++f) {
      const double m =
          static_cast<double>(train.schema.features[f].categorical().domain.size());
      double match = 0.0;
      for (const PrivacyRecord& r : train.records)
        if (choice_index(*r.label) == y && r.values[f].cat == query.values[f].cat)
          match += 1.0;
      double denom = class_count[y] + smoothing * m;
      p *= denom == 0.0 ? 0.0 : (match + smoothing) / denom;
    }
    unnorm[y] = p;
  }
  double total = unnorm[0] + unnorm[1] + unnorm[2];
  ProbVector out;
  for (size_t y = 0; y < kNumChoices; ++y)
    out[y] = total == 0.0 ? 1.0 / 3.0 : unnorm[y] / total;
  return out;
}

// --- finite differences ------------------------------------------------------
inline std::vector<double> finite_difference_gradients(
    const MlpParams& params, const std::vector<std::vector<double>>& xs,
    const std::vector<size_t>& ys, double h) {
  std::vector<double> flat = params.flatten();
  std::vector<double> grad(flat.size());
  MlpParams probe = params;
  for (size_t i = 0; i < flat.size(); ++i) {
    double saved = flat[i];
    flat[i] = saved + h;
    probe.unflatten(flat);
    double plus = mlp_batch_loss(probe, xs, ys);
    flat[i] = saved - h;
    probe.unflatten(flat);
    double minus = mlp_batch_loss(probe, xs, ys);
    flat[i] = saved;
    grad[i] = (plus - minus) / (2.0 * h);
  }
  return grad;
}

// --- dedup -------------------------------------------------------------------
// O(n^2) pairwise scan: keep a record iff no earlier record matches on all
// feature values and the label.
inline LabeledDataset dedup_bruteforce(const LabeledDataset& ds) {
  LabeledDataset out;
  out.schema = ds.schema;
  out.provenance = ds.provenance;
  for (size_t i = 0; i < ds.records.size(); ++i) {
    bool duplicate = false;
    for (size_t j = 0; j < i && !duplicate; ++j)
      duplicate = ds.records[i].values == ds.records[j].values &&
                  ds.records[i].label == ds.records[j].label;
    if (!duplicate) out.records.push_back(ds.records[i]);
  }
  return out;
}

// --- knn imputation ----------------------------------------------------------
// Exhaustive neighbor search with a full distance matrix.
inline LabeledDataset knn_impute_bruteforce(const LabeledDataset& ds,
                                            size_t k) {
  const size_t n = ds.records.size();
  const size_t nf = ds.schema.features.size();
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      if (a == b) continue;
      double d = 0.0;
      for (size_t f = 0; f < nf; ++f) {
        const CellValue& va = ds.records[a].values[f];
        const CellValue& vb = ds.records[b].values[f];
        if (va.is_missing() || vb.is_missing()) continue;
        if (ds.schema.features[f].is_categorical()) {
          if (va.cat != vb.cat) d += 1.0;
        } else {
          const NumericKind& nk = ds.schema.features[f].numeric();
          d += std::fabs(va.num - vb.num) / (nk.max - nk.min);
        }
      }
      dist[a][b] = d;
    }
  }

  LabeledDataset out = ds;
  for (size_t i = 0; i < n; ++i) {
    for (size_t f = 0; f < nf; ++f) {
      if (!ds.records[i].values[f].is_missing()) continue;
      std::vector<std::pair<double, size_t>> donors;  // (distance, index)
      for (size_t j = 0; j < n; ++j)
        if (j != i && !ds.records[j].values[f].is_missing())
          donors.push_back({dist[i][j], j});
      std::sort(donors.begin(), donors.end(),
                [&](const auto& x, const auto& y) {
                  if (x.first != y.first) return x.first < y.first;
                  return ds.records[x.second].record_id <
                         ds.records[y.second].record_id;
                });
      if (donors.size() < k) throw std::logic_error("oracle: not enough donors");
      if (ds.schema.features[f].is_categorical()) {
        std::map<std::string, size_t> votes;
        for (size_t d = 0; d < k; ++d)
          ++votes[ds.records[donors[d].second].values[f].cat];
        size_t best = 0;
        std::string token;
        for (const auto& [tok, count] : votes) {
          if (count > best) {
            best = count;
            token = tok;
          }
        }
        out.records[i].values[f] = CellValue::of(token);
      } else {
        double sum = 0.0;
        for (size_t d = 0; d < k; ++d)
          sum += ds.records[donors[d].second].values[f].num;
        out.records[i].values[f] = CellValue::of(sum / static_cast<double>(k));
      }
    }
  }
  return out;
}

// --- k-anonymity ---------------------------------------------------------------
// Independent search over the same candidate ordering: enumerate every level
// vector, order by (sum, lexicographic), and return the first whose
// suppression need fits the 5% budget, together with the suppression count.
struct KAnonOracle {
  std::vector<size_t> levels;
  size_t suppressed = 0;
  std::vector<uint64_t> kept_ids;
};

inline KAnonOracle k_anonymize_bruteforce(const LabeledDataset& ds,
                                          const GeneralizationHierarchy& h,
                                          size_t k) {
  std::vector<size_t> qi;
  for (size_t f = 0; f < ds.schema.features.size(); ++f)
    if (ds.schema.features[f].quasi_identifier) qi.push_back(f);

  std::vector<size_t> maxed;
  for (size_t f : qi) maxed.push_back(h.levels_for(ds.schema.features[f]));

  std::vector<std::vector<size_t>> combos;
  std::vector<size_t> cur(qi.size(), 0);
  for (;;) {
    combos.push_back(cur);
    size_t i = cur.size();
    bool done = true;
    while (i > 0) {
      --i;
      if (cur[i] + 1 < maxed[i]) {
        ++cur[i];
        std::fill(cur.begin() + i + 1, cur.end(), 0);
        done = false;
        break;
      }
    }
    if (done) break;
  }
  std::sort(combos.begin(), combos.end(),
            [](const std::vector<size_t>& a, const std::vector<size_t>& b) {
              size_t sa = 0, sb = 0;
              for (size_t v : a) sa += v;
              for (size_t v : b) sb += v;
              if (sa != sb) return sa < sb;
              return a < b;
            });

  for (const auto& combo : combos) {
    std::map<std::vector<std::string>, std::vector<uint64_t>> classes;
    for (const PrivacyRecord& r : ds.records) {
      std::vector<std::string> key;
      for (size_t q = 0; q < qi.size(); ++q)
        key.push_back(h.generalize(ds.schema.features[qi[q]], r.values[qi[q]],
                                   combo[q]));
      classes[key].push_back(r.record_id);
    }
    size_t suppressed = 0;
    for (const auto& [key, ids] : classes)
      if (ids.size() < k) suppressed += ids.size();
    if (static_cast<double>(suppressed) <=
        0.05 * static_cast<double>(ds.records.size())) {
      KAnonOracle result;
      result.levels = combo;
      result.suppressed = suppressed;
      for (const PrivacyRecord& r : ds.records) {
        std::vector<std::string> key;
        for (size_t q = 0; q < qi.size(); ++q)
          key.push_back(h.generalize(ds.schema.features[qi[q]], r.values[qi[q]],
                                     combo[q]));
        if (classes.at(key).size() >= k) result.kept_ids.push_back(r.record_id);
      }
      return result;
    }
  }
  throw std::logic_error("oracle: no feasible generalization");
}

// Direct class-size enumeration over the quasi-identifier tuples of a dataset
// as published (no hierarchy involved).
inline size_t min_class_size(const LabeledDataset& ds) {
  std::vector<size_t> qi;
  for (size_t f = 0; f < ds.schema.features.size(); ++f)
    if (ds.schema.features[f].quasi_identifier) qi.push_back(f);
  std::map<std::vector<std::string>, size_t> classes;
  for (const PrivacyRecord& r : ds.records) {
    std::vector<std::string> key;
    for (size_t f : qi) {
      const CellValue& v = r.values[f];
      key.push_back(v.is_missing()
                        ? std::string("\x01")
                        : (v.kind == CellValue::Kind::Categorical
                               ? v.cat
                               : std::to_string(v.num)));
    }
    ++classes[key];
  }
  size_t best = ds.records.size();
  for (const auto& [key, count] : classes) best = std::min(best, count);
  return best;
}

// --- value iteration -----------------------------------------------------------
// Q* for a deterministic MDP given next-state and reward tables.
inline std::vector<std::array<double, kNumActions>> value_iteration(
    const std::vector<std::array<size_t, kNumActions>>& next_state,
    const std::vector<std::array<double, kNumActions>>& reward, double gamma,
    double tol) {
  const size_t n = next_state.size();
  std::vector<std::array<double, kNumActions>> q(
      n, std::array<double, kNumActions>{});
  for (;;) {
    double delta = 0.0;
    auto prev = q;
    for (size_t s = 0; s < n; ++s) {
      for (size_t a = 0; a < kNumActions; ++a) {
        double best_next = prev[next_state[s][a]][0];
        for (size_t b = 1; b < kNumActions; ++b)
          best_next = std::max(best_next, prev[next_state[s][a]][b]);
        q[s][a] = reward[s][a] + gamma * best_next;
        delta = std::max(delta, std::fabs(q[s][a] - prev[s][a]));
      }
    }
    if (delta < tol) return q;
  }
}

// --- label marginals -------------------------------------------------------------
// Mixture-implied label distribution, label noise included.
inline std::array<double, kNumChoices> label_marginal(
    const GeneratorConfig& cfg) {
  std::array<double, kNumChoices> marginal{};
  for (size_t p = 0; p < cfg.personas.size(); ++p) {
    const Persona& persona = cfg.personas[p];
    const auto& ctx_w = std::get<CategoricalDist>(
                            persona.feature_distributions.at(kContextFeature))
                            .weights;
    const auto& perm_w =
        std::get<CategoricalDist>(
            persona.feature_distributions.at(kPermissionFeature))
            .weights;
    double ctx_total = 0.0, perm_total = 0.0;
    for (const auto& [t, w] : ctx_w) ctx_total += w;
    for (const auto& [t, w] : perm_w) perm_total += w;
    for (const auto& [ctx, cw] : ctx_w) {
      for (const auto& [perm, pw] : perm_w) {
        const auto& prop = persona.context_propensities.at({ctx, perm});
        double pair_p =
            cfg.mixture_weights[p] * (cw / ctx_total) * (pw / perm_total);
        for (size_t c = 0; c < kNumChoices; ++c) {
          double clean = prop[c];
          double noisy = (1.0 - cfg.label_noise) * clean +
                         cfg.label_noise * 0.5 * (1.0 - clean);
          marginal[c] += pair_p * noisy;
        }
      }
    }
  }
  return marginal;
}

inline std::array<size_t, kNumChoices> count_labels(const LabeledDataset& ds) {
  std::array<size_t, kNumChoices> counts{};
  for (const PrivacyRecord& r : ds.records)
    if (r.label) ++counts[choice_index(*r.label)];
  return counts;
}

}  // namespace oracles
