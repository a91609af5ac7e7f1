#include "privpref/rule_model.hpp"

#include "privpref/errors.hpp"

namespace privpref {

RuleTable default_rule_table(const FeatureSchema& schema) {
  const auto& ctx_feature = schema.feature(kContextFeature);
  const auto& perm_feature = schema.feature(kPermissionFeature);
  if (!ctx_feature.is_categorical() || !perm_feature.is_categorical())
    throw ConfigInvalidError("rule table needs categorical context/permission");

  auto is_hardware = [](const std::string& perm) {
    return perm == "camera" || perm == "microphone" || perm == "location";
  };
  auto is_guarded = [](const std::string& ctx) {
    return ctx == "finance" || ctx == "health";
  };

  RuleTable t;
  t.default_choice = PrivacyChoice::Ask;
  for (const std::string& ctx : ctx_feature.categorical().domain) {
    for (const std::string& perm : perm_feature.categorical().domain) {
      PrivacyChoice c = PrivacyChoice::Allow;
      if (is_hardware(perm))
        c = PrivacyChoice::Deny;
      else if (is_guarded(ctx))
        c = PrivacyChoice::Ask;
      t.rules[{ctx, perm}] = c;
    }
  }
  return t;
}

PrivacyChoice rule_predict(const RuleTable& rules, const std::string& context,
                           const std::string& permission) {
  auto it = rules.rules.find({context, permission});
  return it == rules.rules.end() ? rules.default_choice : it->second;
}

void RuleClassifier::fit(const LabeledDataset& train, uint64_t) {
  set_model(train.schema, default_rule_table(train.schema));
}

void RuleClassifier::set_model(const FeatureSchema& schema, RuleTable table) {
  ctx_idx_ = schema.index_of(kContextFeature);
  perm_idx_ = schema.index_of(kPermissionFeature);
  if (!ctx_idx_ || !perm_idx_)
    throw ConfigInvalidError(
        "rule classifier needs context and permission features");
  table_ = std::move(table);
}

ProbVector RuleClassifier::predict_proba(const PrivacyRecord& r) const {
  if (!ctx_idx_) throw ConfigInvalidError("rule classifier is not fitted");
  const CellValue& ctx = r.values.at(*ctx_idx_);
  const CellValue& perm = r.values.at(*perm_idx_);
  if (ctx.is_missing() || perm.is_missing())
    throw ConfigInvalidError("record " + std::to_string(r.record_id) +
                             " lacks context/permission; impute first");
  PrivacyChoice c = rule_predict(table_, ctx.cat, perm.cat);
  ProbVector p{0.0, 0.0, 0.0};
  p[choice_index(c)] = 1.0;
  return p;
}

nlohmann::json RuleTable::to_json() const {
  nlohmann::json j;
  nlohmann::json entries;
  for (const auto& [pair, choice] : rules)
    entries[pair.first + "|" + pair.second] = choice_token(choice);
  j["rules"] = entries;
  j["default_choice"] = choice_token(default_choice);
  return j;
}

RuleTable RuleTable::from_json(const nlohmann::json& j) {
  RuleTable t;
  t.default_choice =
      choice_from_token(j.at("default_choice").get<std::string>());
  for (const auto& [key, v] : j.at("rules").items()) {
    size_t sep = key.find('|');
    if (sep == std::string::npos)
      throw ConfigInvalidError("rule key \"" + key +
                               "\" is not \"context|permission\"");
    t.rules[{key.substr(0, sep), key.substr(sep + 1)}] =
        choice_from_token(v.get<std::string>());
  }
  return t;
}

}  // namespace privpref
