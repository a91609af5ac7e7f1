#include "privpref/env.hpp"

#include "privpref/errors.hpp"

namespace privpref {

std::string_view action_token(Action a) {
  switch (a) {
    case Action::Retain: return "Retain";
    case Action::SetAllow: return "SetAllow";
    case Action::SetDeny: return "SetDeny";
    case Action::SetAsk: return "SetAsk";
  }
  throw InternalError("invalid Action value");
}

int denial_bucket_of(double prior_denials) {
  if (prior_denials < 1.0) return 0;
  if (prior_denials <= 3.0) return 1;
  return 2;
}

std::string_view denial_bucket_token(int bucket) {
  switch (bucket) {
    case 0: return "0";
    case 1: return "1-3";
    case 2: return "4+";
  }
  throw InternalError("invalid denial bucket");
}

PrivacyChoice apply_action(Action a, PrivacyChoice current) {
  switch (a) {
    case Action::Retain: return current;
    case Action::SetAllow: return PrivacyChoice::Allow;
    case Action::SetDeny: return PrivacyChoice::Deny;
    case Action::SetAsk: return PrivacyChoice::Ask;
  }
  throw InternalError("invalid Action value");
}

PreferenceState preference_state(const Persona& persona) {
  PreferenceState prefs;
  for (const auto& [pair, prop] : persona.context_propensities) {
    size_t best = 0;
    for (size_t i = 1; i < prop.size(); ++i)
      if (prop[i] > prop[best]) best = i;
    prefs[pair] = choice_from_index(best);
  }
  return prefs;
}

namespace {

std::string draw_token(const Persona& persona, const char* feature,
                       SplitMix64& rng) {
  const auto& dist =
      std::get<CategoricalDist>(persona.feature_distributions.at(feature));
  std::vector<const std::string*> tokens;
  std::vector<double> weights;
  tokens.reserve(dist.weights.size());
  for (const auto& [tok, w] : dist.weights) {
    tokens.push_back(&tok);
    weights.push_back(w);
  }
  return *tokens[rng.categorical(weights)];
}

int draw_bucket(const Persona& persona, SplitMix64& rng) {
  auto it = persona.feature_distributions.find(kDenialsFeature);
  if (it == persona.feature_distributions.end()) return 0;
  const auto* nd = std::get_if<NumericDist>(&it->second);
  if (!nd) return 0;
  return denial_bucket_of(std::round(nd->mean + nd->spread * rng.normal()));
}

PrivacyChoice flip_preference(PrivacyChoice current, uint64_t pick) {
  size_t self = choice_index(current);
  size_t idx = pick < self ? pick : pick + 1;
  return choice_from_index(idx);
}

}  // namespace

double action_reward(const PreferenceState& prefs, const EnvState& state,
                     Action action) {
  PrivacyChoice setting = apply_action(action, state.current_setting);
  auto it = prefs.find({state.context, state.permission});
  if (it == prefs.end())
    throw ConfigInvalidError("no preference for (" + state.context + ", " +
                             state.permission + ")");
  return setting == it->second ? 1.0 : -1.0;
}

EnvState advance_state(const Persona& persona, PreferenceState& prefs,
                       PrivacyChoice setting, SplitMix64& rng) {
  EnvState next;
  next.context = draw_token(persona, kContextFeature, rng);
  next.permission = draw_token(persona, kPermissionFeature, rng);
  next.denial_bucket = draw_bucket(persona, rng);
  next.current_setting = setting;

  if (persona.drift > 0.0 && rng.bernoulli(persona.drift)) {
    PrivacyChoice& pref = prefs.at({next.context, next.permission});
    pref = flip_preference(pref, rng.uniform_below(2));
  }
  return next;
}

std::pair<EnvState, double> sample_transition(const Persona& persona,
                                              PreferenceState& prefs,
                                              const EnvState& state,
                                              Action action, SplitMix64& rng) {
  double reward = action_reward(prefs, state, action);
  EnvState next = advance_state(
      persona, prefs, apply_action(action, state.current_setting), rng);
  return {next, reward};
}

EnvState sample_start_state(const Persona& persona, SplitMix64& rng) {
  EnvState s;
  s.context = draw_token(persona, kContextFeature, rng);
  s.permission = draw_token(persona, kPermissionFeature, rng);
  s.denial_bucket = draw_bucket(persona, rng);
  s.current_setting = PrivacyChoice::Ask;  // sessions open undecided
  return s;
}

}  // namespace privpref
