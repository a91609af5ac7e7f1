#include "privpref/encoding.hpp"

#include <algorithm>

#include "privpref/errors.hpp"

namespace privpref {

OneHotEncoder::OneHotEncoder(const FeatureSchema& schema) : schema_(schema) {
  schema_.validate();
  for (const Feature& f : schema_.features) {
    offsets_.push_back(width_);
    width_ += f.is_categorical() ? f.categorical().domain.size() : 1;
  }
}

std::vector<double> OneHotEncoder::encode(const PrivacyRecord& r) const {
  if (r.values.size() != schema_.features.size())
    throw DimensionMismatchError(
        "record " + std::to_string(r.record_id) + " has " +
        std::to_string(r.values.size()) + " values, schema declares " +
        std::to_string(schema_.features.size()));
  std::vector<double> x(width_, 0.0);
  for (size_t f = 0; f < schema_.features.size(); ++f) {
    const Feature& feat = schema_.features[f];
    const CellValue& v = r.values[f];
    if (v.is_missing())
      throw ConfigInvalidError("record " + std::to_string(r.record_id) +
                               " feature \"" + feat.name +
                               "\" is missing; impute before encoding");
    if (feat.is_categorical()) {
      const auto& domain = feat.categorical().domain;
      auto it = std::find(domain.begin(), domain.end(), v.cat);
      if (it == domain.end())
        throw SchemaMismatchError("record " + std::to_string(r.record_id) +
                                  " feature \"" + feat.name + "\": token \"" +
                                  v.cat + "\" not in domain");
      x[offsets_[f] + static_cast<size_t>(it - domain.begin())] = 1.0;
    } else {
      const NumericKind& k = feat.numeric();
      x[offsets_[f]] = (v.num - k.min) / (k.max - k.min);
    }
  }
  return x;
}

}  // namespace privpref
