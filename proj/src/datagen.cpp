#include "privpref/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "privpref/errors.hpp"
#include "privpref/rng.hpp"

namespace privpref {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_prob_vector(const std::array<double, 3>& p, const std::string& what) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0))
      throw ConfigInvalidError(what + ": negative propensity entry");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kSumTolerance)
    throw ConfigInvalidError(what + ": propensities sum to " +
                             std::to_string(sum) + ", expected 1");
}

void check_rate(double r, const std::string& what) {
  if (!(r >= 0.0 && r <= 0.3))
    throw ConfigInvalidError(what + " must lie in [0, 0.3], got " +
                             std::to_string(r));
}

const CategoricalKind& categorical_feature(const FeatureSchema& schema,
                                           const char* name) {
  auto idx = schema.index_of(name);
  if (!idx || !schema.features[*idx].is_categorical())
    throw ConfigInvalidError(std::string("schema must declare a categorical \"") +
                             name + "\" feature");
  return schema.features[*idx].categorical();
}

}  // namespace

void GeneratorConfig::validate() const {
  schema.validate();
  const auto& contexts = categorical_feature(schema, kContextFeature).domain;
  const auto& permissions =
      categorical_feature(schema, kPermissionFeature).domain;
  for (const std::string& t : contexts)
    if (t.find('|') != std::string::npos)
      throw ConfigInvalidError("context token \"" + t + "\" contains '|'");
  for (const std::string& t : permissions)
    if (t.find('|') != std::string::npos)
      throw ConfigInvalidError("permission token \"" + t + "\" contains '|'");

  if (personas.empty()) throw ConfigInvalidError("no personas configured");
  if (mixture_weights.size() != personas.size())
    throw ConfigInvalidError("mixture_weights length " +
                             std::to_string(mixture_weights.size()) +
                             " does not match persona count " +
                             std::to_string(personas.size()));
  double sum = 0.0;
  for (double w : mixture_weights) {
    if (!(w >= 0.0)) throw ConfigInvalidError("negative mixture weight");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > kSumTolerance)
    throw ConfigInvalidError("mixture_weights sum to " + std::to_string(sum) +
                             ", expected 1");
  if (volume < 1) throw ConfigInvalidError("volume must be >= 1");
  check_rate(label_noise, "label_noise");
  check_rate(missing_rate, "missing_rate");
  check_rate(duplicate_rate, "duplicate_rate");

  for (const Persona& p : personas) {
    const std::string who = "persona " + std::to_string(p.persona_id);
    if (!(p.drift >= 0.0 && p.drift <= 0.5))
      throw ConfigInvalidError(who + ": drift must lie in [0, 0.5]");
    for (const std::string& ctx : contexts) {
      for (const std::string& perm : permissions) {
        auto it = p.context_propensities.find({ctx, perm});
        if (it == p.context_propensities.end())
          throw ConfigInvalidError(who + ": no propensity for (" + ctx + ", " +
                                   perm + ")");
        check_prob_vector(it->second, who + " (" + ctx + ", " + perm + ")");
      }
    }
    for (const Feature& f : schema.features) {
      auto it = p.feature_distributions.find(f.name);
      if (it == p.feature_distributions.end())
        throw ConfigInvalidError(who + ": no distribution for feature \"" +
                                 f.name + "\"");
      if (f.is_categorical()) {
        const auto* dist = std::get_if<CategoricalDist>(&it->second);
        if (!dist)
          throw ConfigInvalidError(who + ": feature \"" + f.name +
                                   "\" needs a categorical distribution");
        double total = 0.0;
        for (const auto& [token, w] : dist->weights) {
          const auto& domain = f.categorical().domain;
          if (std::find(domain.begin(), domain.end(), token) == domain.end())
            throw ConfigInvalidError(who + ": weight token \"" + token +
                                     "\" not in domain of \"" + f.name + "\"");
          if (!(w >= 0.0))
            throw ConfigInvalidError(who + ": negative weight for \"" + token +
                                     "\"");
          total += w;
        }
        if (!(total > 0.0))
          throw ConfigInvalidError(who + ": feature \"" + f.name +
                                   "\" has zero total weight");
      } else {
        if (!std::get_if<NumericDist>(&it->second))
          throw ConfigInvalidError(who + ": feature \"" + f.name +
                                   "\" needs a numeric distribution");
      }
    }
  }
}

namespace {

CellValue draw_feature(const Feature& f, const FeatureDist& dist,
                       SplitMix64& rng) {
  if (f.is_categorical()) {
    const auto& domain = f.categorical().domain;
    const auto& weights = std::get<CategoricalDist>(dist).weights;
    std::vector<double> w(domain.size(), 0.0);
    for (size_t i = 0; i < domain.size(); ++i) {
      auto it = weights.find(domain[i]);
      if (it != weights.end()) w[i] = it->second;
    }
    return CellValue::of(domain[rng.categorical(w)]);
  }
  const NumericKind& bounds = f.numeric();
  const NumericDist& nd = std::get<NumericDist>(dist);
  // Quantized to 0.01: coarse enough for an exact canonical-CSV round trip,
  // fine enough that equal rows are duplicates rather than coincidences.
  double v = std::round((nd.mean + nd.spread * rng.normal()) * 100.0) / 100.0;
  v = std::clamp(v, bounds.min, bounds.max);
  return CellValue::of(v == 0.0 ? 0.0 : v);
}

PrivacyChoice other_choice(PrivacyChoice c, uint64_t pick) {
  size_t self = choice_index(c);
  size_t idx = pick < self ? pick : pick + 1;  // pick in {0,1}
  return choice_from_index(idx);
}

}  // namespace

LabeledDataset generate(const GeneratorConfig& config) {
  config.validate();

  LabeledDataset ds;
  ds.schema = config.schema;
  ds.provenance = "simulated-privacy";
  ds.records.resize(config.volume);

  const size_t ctx_idx = *config.schema.index_of(kContextFeature);
  const size_t perm_idx = *config.schema.index_of(kPermissionFeature);
  const size_t n_features = config.schema.features.size();

  const uint64_t dups = static_cast<uint64_t>(
      std::llround(config.duplicate_rate * static_cast<double>(config.volume)));
  const uint64_t originals = config.volume - dups;

  for (uint64_t i = 0; i < config.volume; ++i) {
    SplitMix64 rng(derive_seed(config.master_seed, "gen/record", {i}));
    PrivacyRecord& r = ds.records[i];
    r.record_id = i;

    size_t pidx = rng.categorical(config.mixture_weights);
    const Persona& persona = config.personas[pidx];
    r.persona_id = persona.persona_id;

    r.values.reserve(n_features);
    for (const Feature& f : config.schema.features)
      r.values.push_back(
          draw_feature(f, persona.feature_distributions.at(f.name), rng));

    const auto& prop = persona.context_propensities.at(
        {r.values[ctx_idx].cat, r.values[perm_idx].cat});
    PrivacyChoice label =
        choice_from_index(rng.categorical({prop[0], prop[1], prop[2]}));
    if (rng.bernoulli(config.label_noise))
      label = other_choice(label, rng.uniform_below(2));
    r.label = label;

    for (CellValue& v : r.values)
      if (rng.bernoulli(config.missing_rate)) v = CellValue::missing();
  }

  // Duplicate tail: copy everything except the record id.
  for (uint64_t t = originals; t < config.volume; ++t) {
    SplitMix64 rng(derive_seed(config.master_seed, "gen/dup", {t}));
    uint64_t src = rng.uniform_below(originals);
    ds.records[t].values = ds.records[src].values;
    ds.records[t].label = ds.records[src].label;
    ds.records[t].persona_id = ds.records[src].persona_id;
  }

  return ds;
}

namespace {

std::string pair_key(const ContextPermission& cp) {
  return cp.first + "|" + cp.second;
}

ContextPermission parse_pair_key(const std::string& key) {
  size_t sep = key.find('|');
  if (sep == std::string::npos)
    throw ConfigInvalidError("propensity key \"" + key +
                             "\" is not \"context|permission\"");
  return {key.substr(0, sep), key.substr(sep + 1)};
}

}  // namespace

nlohmann::json GeneratorConfig::to_json() const {
  nlohmann::json j;
  j["schema"] = schema.to_json();
  nlohmann::json personas_json = nlohmann::json::array();
  for (const Persona& p : personas) {
    nlohmann::json jp;
    jp["persona_id"] = p.persona_id;
    jp["name"] = p.name;
    jp["drift"] = p.drift;
    nlohmann::json props;
    for (const auto& [cp, v] : p.context_propensities)
      props[pair_key(cp)] = v;
    jp["context_propensities"] = props;
    nlohmann::json dists;
    for (const auto& [fname, dist] : p.feature_distributions) {
      if (const auto* cd = std::get_if<CategoricalDist>(&dist)) {
        dists[fname] = {{"kind", "categorical"}, {"weights", cd->weights}};
      } else {
        const auto& nd = std::get<NumericDist>(dist);
        dists[fname] = {
            {"kind", "numeric"}, {"mean", nd.mean}, {"spread", nd.spread}};
      }
    }
    jp["feature_distributions"] = dists;
    personas_json.push_back(jp);
  }
  j["personas"] = personas_json;
  j["mixture_weights"] = mixture_weights;
  j["volume"] = volume;
  j["label_noise"] = label_noise;
  j["missing_rate"] = missing_rate;
  j["duplicate_rate"] = duplicate_rate;
  j["master_seed"] = master_seed;
  return j;
}

GeneratorConfig GeneratorConfig::from_json(const nlohmann::json& j) {
  GeneratorConfig c;
  c.schema = FeatureSchema::from_json(j.at("schema"));
  for (const auto& jp : j.at("personas")) {
    Persona p;
    p.persona_id = jp.at("persona_id").get<int64_t>();
    p.name = jp.value("name", std::string());
    p.drift = jp.value("drift", 0.0);
    for (const auto& [key, v] : jp.at("context_propensities").items())
      p.context_propensities[parse_pair_key(key)] =
          v.get<std::array<double, 3>>();
    for (const auto& [fname, jd] : jp.at("feature_distributions").items()) {
      std::string kind = jd.at("kind").get<std::string>();
      if (kind == "categorical") {
        CategoricalDist cd;
        cd.weights = jd.at("weights").get<std::map<std::string, double>>();
        p.feature_distributions[fname] = cd;
      } else if (kind == "numeric") {
        NumericDist nd;
        nd.mean = jd.at("mean").get<double>();
        nd.spread = jd.at("spread").get<double>();
        p.feature_distributions[fname] = nd;
      } else {
        throw ConfigInvalidError("unknown distribution kind \"" + kind + "\"");
      }
    }
    c.personas.push_back(std::move(p));
  }
  c.mixture_weights = j.at("mixture_weights").get<std::vector<double>>();
  c.volume = j.at("volume").get<uint64_t>();
  c.label_noise = j.at("label_noise").get<double>();
  c.missing_rate = j.at("missing_rate").get<double>();
  c.duplicate_rate = j.at("duplicate_rate").get<double>();
  c.master_seed = j.at("master_seed").get<uint64_t>();
  c.validate();
  return c;
}

}  // namespace privpref
