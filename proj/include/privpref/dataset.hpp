#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "privpref/choice.hpp"
#include "privpref/schema.hpp"

namespace privpref {

// One cell of a record. Missingness is explicit: imputation and CSV I/O need
// to distinguish "absent" from any in-domain value.
struct CellValue {
  enum class Kind { Missing, Categorical, Numeric };

  Kind kind = Kind::Missing;
  std::string cat;
  double num = 0.0;

  static CellValue missing() { return CellValue{}; }
  static CellValue of(std::string token) {
    CellValue v;
    v.kind = Kind::Categorical;
    v.cat = std::move(token);
    return v;
  }
  static CellValue of(double x) {
    CellValue v;
    v.kind = Kind::Numeric;
    v.num = x;
    return v;
  }

  bool is_missing() const { return kind == Kind::Missing; }

  bool operator==(const CellValue& o) const {
    if (kind != o.kind) return false;
    switch (kind) {
      case Kind::Missing: return true;
      case Kind::Categorical: return cat == o.cat;
      case Kind::Numeric: return num == o.num;
    }
    return false;
  }
};

// One user decision event: context feature values plus the privacy choice.
// persona_id is generator ground truth only and is never exposed to models.
struct PrivacyRecord {
  uint64_t record_id = 0;
  std::vector<CellValue> values;
  std::optional<PrivacyChoice> label;
  std::optional<int64_t> persona_id;

  bool operator==(const PrivacyRecord&) const = default;
};

// Immutable after load/generation; every pipeline stage produces a new one.
struct LabeledDataset {
  FeatureSchema schema;
  std::vector<PrivacyRecord> records;
  std::string provenance;

  size_t size() const { return records.size(); }

  // Throws SchemaMismatchError with row/column position on the first record
  // that does not validate against the schema (domain membership, numeric
  // range, value-count, duplicate record ids).
  void validate() const;

  // Field-for-field equality of schema and records; provenance is a free-text
  // tag and is deliberately excluded.
  bool same_contents(const LabeledDataset& o) const {
    return schema == o.schema && records == o.records;
  }
};

}  // namespace privpref
