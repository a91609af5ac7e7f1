#pragma once

#include <vector>

#include "privpref/dataset.hpp"

namespace privpref {

// One-hot encoding for categorical features, min-max scaling to [0, 1] for
// numeric ones (bounds taken from the schema). Input layout is fixed by the
// schema, so encoded width is schema-determined, not data-determined.
class OneHotEncoder {
 public:
  explicit OneHotEncoder(const FeatureSchema& schema);

  size_t width() const { return width_; }

  // Throws DimensionMismatchError on value-count mismatch and
  // ConfigInvalidError on missing cells (inputs must be imputed first).
  std::vector<double> encode(const PrivacyRecord& r) const;

 private:
  FeatureSchema schema_;
  std::vector<size_t> offsets_;
  size_t width_ = 0;
};

}  // namespace privpref
