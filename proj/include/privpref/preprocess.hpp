#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "privpref/dataset.hpp"

namespace privpref {

struct PreprocessConfig {
  size_t knn_k = 5;
  double dp_epsilon = 1.0;
  bool dp_enabled = false;
  size_t anonymity_k = 5;
  std::optional<uint64_t> augment_target;
  uint64_t seed = 0;

  void validate() const;

  nlohmann::json to_json() const;
  static PreprocessConfig from_json(const nlohmann::json& j);
};

// Per-feature generalization ladder. Level 0 is the exact value and the top
// level maps everything to "*"; in between, categorical features use explicit
// value -> class maps and numeric features use widening brackets anchored at
// the schema minimum.
struct FeatureHierarchy {
  std::vector<std::map<std::string, std::string>> cat_levels;
  std::vector<double> widths;

  bool operator==(const FeatureHierarchy&) const = default;
};

struct GeneralizationHierarchy {
  std::map<std::string, FeatureHierarchy> features;

  // Number of levels available for a feature (identity and "*" included).
  size_t levels_for(const Feature& f) const;

  // Class label of a value at a level. Missing cells form their own class.
  std::string generalize(const Feature& f, const CellValue& v,
                         size_t level) const;

  // Throws ConfigInvalidError when a categorical level is not a refinement of
  // the previous one or does not cover the feature's domain.
  void validate(const FeatureSchema& schema) const;

  nlohmann::json to_json() const;
  static GeneralizationHierarchy from_json(const nlohmann::json& j);
};

// Widths 4 and 12 for numeric quasi-identifiers, suppress-only ladders for
// categorical ones.
GeneralizationHierarchy default_hierarchy(const FeatureSchema& schema);

// Records equal on every feature value and the label collapse to their first
// occurrence; record_id and persona_id are not part of the key.
LabeledDataset deduplicate(const LabeledDataset& ds);

// Fills every missing feature cell from the knn_k nearest donors observed at
// that feature. Distance = categorical mismatch count + range-normalized L1
// over mutually observed features; ties break toward lower record_id; fills
// are the donor mode (categorical, lexicographic tie-break) or mean (numeric).
// Only original cell values are read, so fills never chain.
LabeledDataset knn_impute(const LabeledDataset& ds,
                          const PreprocessConfig& cfg);

// m-ary randomized response on sensitive categorical cells (keep probability
// e^eps / (e^eps + m - 1)), bounded Laplace noise with scale (max-min)/eps on
// sensitive numeric cells. Labels, non-sensitive features, record count and
// order are untouched. Deterministic per (seed, record_id, feature index).
LabeledDataset dp_randomize(const LabeledDataset& ds,
                            const PreprocessConfig& cfg);

struct KAnonymizeResult {
  LabeledDataset data;
  size_t suppressed_count = 0;
  std::vector<size_t> chosen_levels;  // per quasi-identifier, schema order
};

// Global recoding: the minimal uniform level vector (ordered by total level
// sum, then lexicographically) under which every remaining quasi-identifier
// equivalence class has size >= anonymity_k after suppressing at most 5% of
// the input rows.
KAnonymizeResult k_anonymize(const LabeledDataset& ds,
                             const GeneralizationHierarchy& hierarchy,
                             const PreprocessConfig& cfg);

// Oversamples every label class below augment_target with jittered copies of
// same-class members; new record ids continue from max+1.
LabeledDataset augment_oversample(const LabeledDataset& ds,
                                  const PreprocessConfig& cfg);

struct PipelineResult {
  LabeledDataset data;
  nlohmann::json provenance;  // ops applied, suppressed_count, epsilon, seeds
};

// dedup -> impute -> k-anonymize (when a quasi-identifier is declared) ->
// randomized response / Laplace (when enabled) -> oversample (when targeted).
PipelineResult preprocess_pipeline(const LabeledDataset& ds,
                                   const PreprocessConfig& cfg,
                                   const GeneralizationHierarchy& hierarchy);

}  // namespace privpref
