#include "privpref/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "privpref/errors.hpp"

namespace privpref {

namespace {

void check_cell(const Feature& f, const CellValue& v, size_t row, size_t col) {
  auto where = [&] {
    return "row " + std::to_string(row) + " column \"" + f.name + "\" (index " +
           std::to_string(col) + ")";
  };
  if (v.is_missing()) return;
  if (f.is_categorical()) {
    if (v.kind != CellValue::Kind::Categorical)
      throw SchemaMismatchError(where() + ": expected categorical token");
    const auto& domain = f.categorical().domain;
    if (std::find(domain.begin(), domain.end(), v.cat) == domain.end())
      throw SchemaMismatchError(where() + ": token \"" + v.cat +
                                "\" not in declared domain");
  } else {
    if (v.kind != CellValue::Kind::Numeric)
      throw SchemaMismatchError(where() + ": expected numeric value");
    const NumericKind& n = f.numeric();
    if (!(v.num >= n.min && v.num <= n.max))
      throw SchemaMismatchError(where() + ": value " + std::to_string(v.num) +
                                " outside [" + std::to_string(n.min) + ", " +
                                std::to_string(n.max) + "]");
  }
}

}  // namespace

void LabeledDataset::validate() const {
  schema.validate();
  std::unordered_set<uint64_t> ids;
  ids.reserve(records.size());
  for (size_t row = 0; row < records.size(); ++row) {
    const PrivacyRecord& r = records[row];
    if (r.values.size() != schema.features.size())
      throw SchemaMismatchError(
          "row " + std::to_string(row) + ": has " +
          std::to_string(r.values.size()) + " values, schema declares " +
          std::to_string(schema.features.size()));
    if (!ids.insert(r.record_id).second)
      throw SchemaMismatchError("row " + std::to_string(row) +
                                " column \"record_id\": duplicate id " +
                                std::to_string(r.record_id));
    for (size_t col = 0; col < r.values.size(); ++col)
      check_cell(schema.features[col], r.values[col], row, col);
  }
}

}  // namespace privpref
