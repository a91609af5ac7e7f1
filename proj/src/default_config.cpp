#include "privpref/datagen.hpp"

namespace privpref {

namespace {

const std::vector<std::string> kContexts = {"social", "ecommerce", "assistant",
                                            "finance", "health"};
const std::vector<std::string> kPermissions = {"camera", "microphone",
                                               "location", "contacts",
                                               "storage"};

using Prop = std::array<double, 3>;  // (Allow, Deny, Ask)

constexpr PrivacyChoice A = PrivacyChoice::Allow;
constexpr PrivacyChoice D = PrivacyChoice::Deny;
constexpr PrivacyChoice K = PrivacyChoice::Ask;

// Population structure: three behavior groups, each with its own
// (context, permission) disposition table. Groups differ in how often they
// have denied requests before, so the denial-count feature separates them.
// On the mainstream contexts (social, ecommerce) everyone behaves alike and
// disposition is a pure function of the permission; the groups diverge on
// the lighter contexts (assistant, finance, health), where disposition
// depends jointly on context, permission, and group.
using Disposition = PrivacyChoice[5][5];

// permissive group: shares freely, wary only of hardware in banking
constexpr Disposition kPermissive = {
    // camera, microphone, location, contacts, storage
    {A, D, A, A, A},  // social
    {A, D, A, A, A},  // ecommerce
    {A, A, A, A, A},  // assistant
    {D, D, D, A, A},  // finance
    {A, D, A, A, A},  // health
};

// balanced group: defers on sensitive context/permission combinations
constexpr Disposition kBalanced = {
    {A, D, A, A, A},  // social
    {A, D, A, A, A},  // ecommerce
    {D, A, A, A, A},  // assistant
    {D, D, D, K, A},  // finance
    {K, D, A, A, K},  // health
};

// restrictive group: denies or defers once the context leaves the mainstream
constexpr Disposition kRestrictive = {
    {A, D, A, A, A},  // social
    {A, D, A, A, A},  // ecommerce
    {D, K, D, D, A},  // assistant
    {D, D, D, K, K},  // finance
    {K, D, K, D, K},  // health
};

// How sharply a persona follows its group table, per target kind. Styles
// never move the argmax away from the table entry.
struct Style {
  Prop on_allow;
  Prop on_deny;
  Prop on_ask;
};

Prop styled(PrivacyChoice target, const Style& s) {
  switch (target) {
    case PrivacyChoice::Allow: return s.on_allow;
    case PrivacyChoice::Deny: return s.on_deny;
    case PrivacyChoice::Ask: return s.on_ask;
  }
  return s.on_ask;
}

struct PersonaBuilder {
  Persona p;

  PersonaBuilder(int64_t id, std::string name, const Disposition& table,
                 const Style& style) {
    p.persona_id = id;
    p.name = std::move(name);
    for (size_t c = 0; c < kContexts.size(); ++c)
      for (size_t m = 0; m < kPermissions.size(); ++m)
        p.context_propensities[{kContexts[c], kPermissions[m]}] =
            styled(table[c][m], style);
  }

  PersonaBuilder& contexts(std::map<std::string, double> w) {
    p.feature_distributions[kContextFeature] = CategoricalDist{std::move(w)};
    return *this;
  }
  PersonaBuilder& permissions(std::map<std::string, double> w) {
    p.feature_distributions[kPermissionFeature] = CategoricalDist{std::move(w)};
    return *this;
  }
  PersonaBuilder& hour(double mean, double spread) {
    p.feature_distributions[kHourFeature] = NumericDist{mean, spread};
    return *this;
  }
  PersonaBuilder& denials(double mean, double spread) {
    p.feature_distributions[kDenialsFeature] = NumericDist{mean, spread};
    return *this;
  }
};

FeatureSchema default_schema() {
  FeatureSchema s;
  s.features.push_back(
      {kContextFeature, CategoricalKind{kContexts}, false, false});
  s.features.push_back(
      {kPermissionFeature, CategoricalKind{kPermissions}, false, false});
  s.features.push_back(
      {kHourFeature, NumericKind{0.0, 23.0, "hour"}, true, false});
  s.features.push_back(
      {kDenialsFeature, NumericKind{0.0, 20.0, "count"}, false, true});
  return s;
}

}  // namespace

GeneratorConfig default_config() {
  GeneratorConfig c;
  c.schema = default_schema();

  const Style sharp = {{0.90, 0.06, 0.04}, {0.05, 0.90, 0.05}, {0.07, 0.08, 0.85}};
  const Style firm = {{0.86, 0.08, 0.06}, {0.05, 0.88, 0.07}, {0.07, 0.12, 0.81}};
  const Style allow_soft = {{0.84, 0.09, 0.07}, {0.22, 0.67, 0.11}, {0.30, 0.14, 0.56}};
  const Style deny_soft = {{0.60, 0.30, 0.10}, {0.03, 0.92, 0.05}, {0.05, 0.28, 0.67}};
  const Style hedging = {{0.46, 0.21, 0.33}, {0.14, 0.48, 0.38}, {0.14, 0.16, 0.70}};

  // Group denial-count habits; within a group the personas share the habit
  // so the count adds nothing beyond its coarse bucket.
  const double kFewDenials[2] = {0.25, 0.25};
  const double kSomeDenials[2] = {2.0, 0.33};
  const double kManyDenials[2] = {9.0, 1.6};

  PersonaBuilder convenience(0, "convenience-first", kPermissive, allow_soft);
  convenience
      .contexts({{"social", 0.36},
                 {"ecommerce", 0.36},
                 {"assistant", 0.12},
                 {"finance", 0.08},
                 {"health", 0.08}})
      .permissions({{"camera", 0.16},
                    {"microphone", 0.16},
                    {"location", 0.24},
                    {"contacts", 0.16},
                    {"storage", 0.28}})
      .hour(13, 6)
      .denials(kFewDenials[0], kFewDenials[1]);

  PersonaBuilder sharer(1, "social-sharer", kPermissive, sharp);
  sharer
      .contexts({{"social", 0.40},
                 {"ecommerce", 0.34},
                 {"assistant", 0.10},
                 {"finance", 0.06},
                 {"health", 0.10}})
      .permissions({{"camera", 0.28},
                    {"microphone", 0.16},
                    {"location", 0.24},
                    {"contacts", 0.16},
                    {"storage", 0.16}})
      .hour(13, 6)
      .denials(kFewDenials[0], kFewDenials[1]);

  PersonaBuilder contextual(2, "context-sensitive", kBalanced, sharp);
  contextual
      .contexts({{"social", 0.34},
                 {"ecommerce", 0.32},
                 {"assistant", 0.12},
                 {"finance", 0.12},
                 {"health", 0.10}})
      .permissions({{"camera", 0.22},
                    {"microphone", 0.18},
                    {"location", 0.24},
                    {"contacts", 0.16},
                    {"storage", 0.20}})
      .hour(13, 6)
      .denials(kSomeDenials[0], kSomeDenials[1]);

  PersonaBuilder guarded(3, "finance-guarded", kBalanced, firm);
  guarded
      .contexts({{"social", 0.30},
                 {"ecommerce", 0.32},
                 {"assistant", 0.10},
                 {"finance", 0.18},
                 {"health", 0.10}})
      .permissions({{"camera", 0.16},
                    {"microphone", 0.12},
                    {"location", 0.24},
                    {"contacts", 0.20},
                    {"storage", 0.28}})
      .hour(13, 6)
      .denials(kSomeDenials[0], kSomeDenials[1]);

  PersonaBuilder maximalist(4, "privacy-maximalist", kRestrictive, deny_soft);
  maximalist
      .contexts({{"social", 0.34},
                 {"ecommerce", 0.32},
                 {"assistant", 0.10},
                 {"finance", 0.14},
                 {"health", 0.10}})
      .permissions({{"camera", 0.20},
                    {"microphone", 0.20},
                    {"location", 0.20},
                    {"contacts", 0.20},
                    {"storage", 0.20}})
      .hour(13, 6)
      .denials(kManyDenials[0], kManyDenials[1]);

  PersonaBuilder ambivalent(5, "ambivalent", kRestrictive, hedging);
  ambivalent
      .contexts({{"social", 0.34},
                 {"ecommerce", 0.34},
                 {"assistant", 0.12},
                 {"finance", 0.10},
                 {"health", 0.10}})
      .permissions({{"camera", 0.20},
                    {"microphone", 0.20},
                    {"location", 0.20},
                    {"contacts", 0.20},
                    {"storage", 0.20}})
      .hour(13, 6)
      .denials(kManyDenials[0], kManyDenials[1]);

  c.personas = {convenience.p, sharer.p,     contextual.p,
                guarded.p,     maximalist.p, ambivalent.p};
  c.mixture_weights = {0.14, 0.11, 0.13, 0.12, 0.28, 0.22};
  c.volume = 10000;
  c.label_noise = 0.05;
  c.missing_rate = 0.03;
  c.duplicate_rate = 0.02;
  c.master_seed = 42;
  return c;
}

}  // namespace privpref
