#pragma once

#include <map>

#include "json.hpp"
#include "privpref/classifier.hpp"
#include "privpref/datagen.hpp"

namespace privpref {

// Static (context, permission) -> choice policy; the non-learning baseline.
struct RuleTable {
  std::map<ContextPermission, PrivacyChoice> rules;
  PrivacyChoice default_choice = PrivacyChoice::Ask;

  nlohmann::json to_json() const;
  static RuleTable from_json(const nlohmann::json& j);
};

// Shipped privacy-protective policy over the schema's declared domains:
// Deny camera/microphone/location everywhere, Ask for anything in finance or
// health contexts, Allow the rest. Unmapped pairs fall back to Ask.
RuleTable default_rule_table(const FeatureSchema& schema);

PrivacyChoice rule_predict(const RuleTable& rules, const std::string& context,
                           const std::string& permission);

class RuleClassifier : public Classifier {
 public:
  // fit() only rebuilds the table for the training schema; nothing is learned.
  void fit(const LabeledDataset& train, uint64_t seed) override;
  ProbVector predict_proba(const PrivacyRecord& r) const override;
  std::string kind() const override { return "rule"; }

  const RuleTable& table() const { return table_; }
  void set_model(const FeatureSchema& schema, RuleTable table);

 private:
  RuleTable table_;
  std::optional<size_t> ctx_idx_;
  std::optional<size_t> perm_idx_;
};

}  // namespace privpref
