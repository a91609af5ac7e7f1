#pragma once

#include <string>

#include "privpref/dataset.hpp"

namespace privpref {

// Canonical numeric formatting: up to 6 significant digits, trailing zeros
// stripped, plain notation for |x| in [1e-3, 1e6). Stable under a
// parse/format round trip.
std::string format_number(double x);

// Canonical CSV: UTF-8, comma separated, '\n' line endings, header
// `record_id,<feature names...>,persona_id,label`, labels as tokens,
// missing cells as empty fields. Byte-deterministic for equal inputs.
std::string dataset_to_csv(const LabeledDataset& ds);
LabeledDataset dataset_from_csv(const std::string& text,
                                const FeatureSchema& schema,
                                const std::string& provenance = "");

void save_dataset(const LabeledDataset& ds, const std::string& path);
LabeledDataset load_dataset(const std::string& path,
                            const FeatureSchema& schema);

}  // namespace privpref
