#include "privpref/schema.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "privpref/errors.hpp"
#include "privpref/rng.hpp"

namespace privpref {

namespace {

// Tokens and names ride in an unquoted CSV, so separators are forbidden.
bool csv_safe(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') return false;
  }
  return true;
}

}  // namespace

void FeatureSchema::validate() const {
  std::set<std::string> seen;
  for (const Feature& f : features) {
    if (!csv_safe(f.name))
      throw ConfigInvalidError("feature name \"" + f.name +
                               "\" is empty or contains CSV separators");
    if (f.name == "record_id" || f.name == "label" || f.name == "persona_id")
      throw ConfigInvalidError("feature name \"" + f.name +
                               "\" collides with a reserved column");
    if (!seen.insert(f.name).second)
      throw ConfigInvalidError("duplicate feature name \"" + f.name + "\"");
    if (f.is_categorical()) {
      const auto& domain = f.categorical().domain;
      if (domain.empty())
        throw ConfigInvalidError("feature \"" + f.name +
                                 "\" has an empty categorical domain");
      std::set<std::string> values;
      for (const std::string& v : domain) {
        if (!csv_safe(v))
          throw ConfigInvalidError("feature \"" + f.name + "\" token \"" + v +
                                   "\" is empty or contains CSV separators");
        if (!values.insert(v).second)
          throw ConfigInvalidError("feature \"" + f.name +
                                   "\" repeats domain token \"" + v + "\"");
      }
    } else {
      const NumericKind& n = f.numeric();
      if (!std::isfinite(n.min) || !std::isfinite(n.max) || !(n.min < n.max))
        throw ConfigInvalidError("feature \"" + f.name +
                                 "\" needs finite bounds with min < max");
    }
  }
}

std::optional<size_t> FeatureSchema::index_of(std::string_view name) const {
  for (size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return i;
  }
  return std::nullopt;
}

const Feature& FeatureSchema::feature(std::string_view name) const {
  auto idx = index_of(name);
  if (!idx)
    throw ConfigInvalidError("schema has no feature named \"" +
                             std::string(name) + "\"");
  return features[*idx];
}

bool FeatureSchema::has_sensitive() const {
  for (const Feature& f : features)
    if (f.sensitive) return true;
  return false;
}

bool FeatureSchema::has_quasi_identifier() const {
  for (const Feature& f : features)
    if (f.quasi_identifier) return true;
  return false;
}

nlohmann::json FeatureSchema::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const Feature& f : features) {
    nlohmann::json jf;
    jf["name"] = f.name;
    if (f.is_categorical()) {
      jf["kind"] = "categorical";
      jf["domain"] = f.categorical().domain;
    } else {
      jf["kind"] = "numeric";
      jf["min"] = f.numeric().min;
      jf["max"] = f.numeric().max;
      jf["unit"] = f.numeric().unit;
    }
    jf["quasi_identifier"] = f.quasi_identifier;
    jf["sensitive"] = f.sensitive;
    arr.push_back(jf);
  }
  return nlohmann::json{{"features", arr}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
  FeatureSchema schema;
  for (const auto& jf : j.at("features")) {
    Feature f;
    f.name = jf.at("name").get<std::string>();
    std::string kind = jf.at("kind").get<std::string>();
    if (kind == "categorical") {
      f.kind = CategoricalKind{jf.at("domain").get<std::vector<std::string>>()};
    } else if (kind == "numeric") {
      NumericKind n;
      n.min = jf.at("min").get<double>();
      n.max = jf.at("max").get<double>();
      n.unit = jf.value("unit", std::string());
      f.kind = n;
    } else {
      throw ConfigInvalidError("unknown feature kind \"" + kind + "\"");
    }
    f.quasi_identifier = jf.value("quasi_identifier", false);
    f.sensitive = jf.value("sensitive", false);
    schema.features.push_back(std::move(f));
  }
  schema.validate();
  return schema;
}

std::string FeatureSchema::digest() const {
  uint64_t h = fnv1a64(to_json().dump());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace privpref
