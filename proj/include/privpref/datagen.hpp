#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "privpref/dataset.hpp"

namespace privpref {

struct CategoricalDist {
  std::map<std::string, double> weights;  // over the feature's domain
  bool operator==(const CategoricalDist&) const = default;
};

struct NumericDist {
  double mean = 0.0;
  double spread = 1.0;
  bool operator==(const NumericDist&) const = default;
};

using FeatureDist = std::variant<CategoricalDist, NumericDist>;

using ContextPermission = std::pair<std::string, std::string>;

// A latent user archetype. Labels are drawn from the propensity vector of
// the record's (context, permission) pair; features are drawn from the
// persona's per-feature distributions.
struct Persona {
  int64_t persona_id = 0;
  std::string name;
  std::map<ContextPermission, std::array<double, 3>> context_propensities;
  std::map<std::string, FeatureDist> feature_distributions;
  double drift = 0.0;  // per-step preference-flip probability, [0, 0.5]

  bool operator==(const Persona&) const = default;
};

struct GeneratorConfig {
  FeatureSchema schema;
  std::vector<Persona> personas;
  std::vector<double> mixture_weights;
  uint64_t volume = 10000;
  double label_noise = 0.05;
  double missing_rate = 0.03;
  double duplicate_rate = 0.02;
  uint64_t master_seed = 42;

  void validate() const;  // throws ConfigInvalidError

  nlohmann::json to_json() const;
  static GeneratorConfig from_json(const nlohmann::json& j);
};

// Feature names the generator and the RL environment bind to.
inline constexpr const char* kContextFeature = "context";
inline constexpr const char* kPermissionFeature = "permission";
inline constexpr const char* kHourFeature = "hour_of_day";
inline constexpr const char* kDenialsFeature = "prior_denials";

// Shipped benchmark configuration: six personas over a five-context,
// five-permission schema with hour-of-day and prior-denial-count features.
GeneratorConfig default_config();

// Draws exactly `volume` records. Each record's randomness comes from a
// stream derived from (master_seed, record index), so output is independent
// of scheduling; the duplicate tail replaces the last records with copies of
// earlier ones.
LabeledDataset generate(const GeneratorConfig& config);

}  // namespace privpref
