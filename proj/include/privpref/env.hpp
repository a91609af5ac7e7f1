#pragma once

#include <map>

#include "privpref/datagen.hpp"
#include "privpref/rng.hpp"

namespace privpref {

// Privacy-settings MDP state: what is being asked, what the setting currently
// is, and a coarse history bucket.
struct EnvState {
  std::string context;
  std::string permission;
  PrivacyChoice current_setting = PrivacyChoice::Ask;
  int denial_bucket = 0;  // 0: none, 1: 1-3 prior denials, 2: 4+

  bool operator==(const EnvState&) const = default;
};

enum class Action { Retain = 0, SetAllow = 1, SetDeny = 2, SetAsk = 3 };
inline constexpr size_t kNumActions = 4;
inline constexpr std::array<Action, 4> kActionOrder = {
    Action::Retain, Action::SetAllow, Action::SetDeny, Action::SetAsk};

std::string_view action_token(Action a);

int denial_bucket_of(double prior_denials);
std::string_view denial_bucket_token(int bucket);

// The setting in force after applying an action.
PrivacyChoice apply_action(Action a, PrivacyChoice current);

// The persona's currently preferred choice per (context, permission). Starts
// at the propensity argmax and evolves only through drift.
using PreferenceState = std::map<ContextPermission, PrivacyChoice>;
PreferenceState preference_state(const Persona& persona);

// +1 when the post-action setting equals the preferred choice for the
// state's (context, permission) pair, -1 otherwise.
double action_reward(const PreferenceState& prefs, const EnvState& state,
                     Action action);

// Fresh (context, permission) pair and denial bucket from the persona's
// feature distributions; current_setting carries over from the caller.
// Preference drift, when configured, flips the freshly drawn pair's
// preference with probability `drift`.
EnvState advance_state(const Persona& persona, PreferenceState& prefs,
                       PrivacyChoice setting, SplitMix64& rng);

// One environment step against a single persona: action_reward on the
// current state, then advance_state with the post-action setting.
std::pair<EnvState, double> sample_transition(const Persona& persona,
                                              PreferenceState& prefs,
                                              const EnvState& state,
                                              Action action, SplitMix64& rng);

// Start state for an episode: fresh pair and bucket; sessions open with the
// setting undecided (Ask).
EnvState sample_start_state(const Persona& persona, SplitMix64& rng);

}  // namespace privpref
