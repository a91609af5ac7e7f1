#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace privpref {

struct CategoricalKind {
  std::vector<std::string> domain;
  bool operator==(const CategoricalKind&) const = default;
};

struct NumericKind {
  double min = 0.0;
  double max = 1.0;
  std::string unit;
  bool operator==(const NumericKind&) const = default;
};

struct Feature {
  std::string name;
  std::variant<CategoricalKind, NumericKind> kind;
  bool quasi_identifier = false;
  bool sensitive = false;

  bool is_categorical() const {
    return std::holds_alternative<CategoricalKind>(kind);
  }
  bool is_numeric() const { return std::holds_alternative<NumericKind>(kind); }
  const CategoricalKind& categorical() const {
    return std::get<CategoricalKind>(kind);
  }
  const NumericKind& numeric() const { return std::get<NumericKind>(kind); }

  bool operator==(const Feature&) const = default;
};

// Ordered feature list; the column layout of every dataset.
struct FeatureSchema {
  std::vector<Feature> features;

  // Throws ConfigInvalidError on duplicate/invalid names, empty categorical
  // domains, unordered numeric bounds, or tokens unsafe for the CSV format.
  void validate() const;

  std::optional<size_t> index_of(std::string_view name) const;
  const Feature& feature(std::string_view name) const;  // throws if absent

  bool has_sensitive() const;
  bool has_quasi_identifier() const;

  nlohmann::json to_json() const;
  static FeatureSchema from_json(const nlohmann::json& j);

  // Stable content hash, hex-encoded; used to pair models with datasets.
  std::string digest() const;

  bool operator==(const FeatureSchema&) const = default;
};

}  // namespace privpref
