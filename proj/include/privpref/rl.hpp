#pragma once

#include "json.hpp"
#include "privpref/classifier.hpp"
#include "privpref/env.hpp"

namespace privpref {

struct RlConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon0 = 1.0;
  double epsilon_decay = 0.97;  // multiplicative, per episode
  double epsilon_floor = 0.05;
  size_t episodes = 200;
  size_t steps_per_episode = 50;
  uint64_t seed = 0;

  void validate() const;
  double epsilon_at(size_t episode) const;
};

// Dense (state, action) value table over an integer-indexed state space.
class QTable {
 public:
  QTable() = default;
  explicit QTable(size_t state_count)
      : values_(state_count * kNumActions, 0.0) {}

  size_t state_count() const { return values_.size() / kNumActions; }
  double at(size_t state, Action a) const {
    return values_[state * kNumActions + static_cast<size_t>(a)];
  }
  double& at(size_t state, Action a) {
    return values_[state * kNumActions + static_cast<size_t>(a)];
  }
  double max_value(size_t state) const;
  Action greedy_action(size_t state) const;  // ties break in action order

  const std::vector<double>& raw() const { return values_; }

 private:
  std::vector<double> values_;
};

struct Transition {
  size_t state = 0;
  Action action = Action::Retain;
  double reward = 0.0;
  size_t next_state = 0;
};

// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); touches exactly
// one entry.
void q_update(QTable& q, const Transition& t, const RlConfig& cfg);

// Uniform random action with probability eps, greedy otherwise.
Action epsilon_greedy(const QTable& q, size_t state, double eps,
                      SplitMix64& rng);

struct EpisodeStats {
  double total_reward = 0.0;
  size_t steps = 0;
  double epsilon = 0.0;
};

struct EpisodeLog {
  std::vector<EpisodeStats> episodes;
  std::vector<double> cumulative_reward;  // prefix sums of total_reward
};

// What train_q runs against; integer-indexed so toy MDPs can plug in.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual size_t state_count() const = 0;
  virtual size_t start_state(SplitMix64& rng) = 0;
  virtual std::pair<size_t, double> step(size_t state, Action a,
                                         SplitMix64& rng) = 0;
};

std::pair<QTable, EpisodeLog> train_q(Environment& env, const RlConfig& cfg);

// Integer index mapping for the privacy MDP state space
// (context x permission x current setting x denial bucket).
class StateSpace {
 public:
  StateSpace(std::vector<std::string> contexts,
             std::vector<std::string> permissions);
  static StateSpace from_schema(const FeatureSchema& schema);

  size_t count() const {
    return contexts_.size() * permissions_.size() * kNumChoices * 3;
  }
  size_t index(const EnvState& s) const;
  EnvState state(size_t index) const;
  std::string key(const EnvState& s) const;  // "context|permission|setting|bucket"

  const std::vector<std::string>& contexts() const { return contexts_; }
  const std::vector<std::string>& permissions() const { return permissions_; }

 private:
  std::vector<std::string> contexts_;
  std::vector<std::string> permissions_;
};

// Privacy-settings environment over the persona mixture. Each step is a
// request from a freshly drawn persona: the reward judges the current state
// under the persona that issued it, then the next request is drawn from a
// newly sampled persona. Preference drift state resets per episode.
class PrivacyEnv : public Environment {
 public:
  explicit PrivacyEnv(const GeneratorConfig& config);

  size_t state_count() const override { return space_.count(); }
  size_t start_state(SplitMix64& rng) override;
  std::pair<size_t, double> step(size_t state, Action a,
                                 SplitMix64& rng) override;

  const StateSpace& space() const { return space_; }

 private:
  GeneratorConfig config_;
  StateSpace space_;
  size_t persona_idx_ = 0;
  std::vector<PreferenceState> prefs_;  // one per persona
};

// Greedy policy turned into a classifier: the state is built from the record
// with current setting Ask; the chosen action maps to the predicted choice.
class QPolicyClassifier : public Classifier {
 public:
  QPolicyClassifier(const GeneratorConfig& gen_config, RlConfig rl_config)
      : gen_config_(gen_config), rl_config_(rl_config) {}
  QPolicyClassifier(QTable q, StateSpace space, const FeatureSchema& schema);

  // Trains against the simulated environment; the dataset argument only
  // provides the schema binding for prediction.
  void fit(const LabeledDataset& train, uint64_t seed) override;
  ProbVector predict_proba(const PrivacyRecord& r) const override;
  std::string kind() const override { return "q"; }

  const QTable& table() const { return q_; }
  const EpisodeLog& training_log() const { return log_; }

 private:
  void bind_schema(const FeatureSchema& schema);

  GeneratorConfig gen_config_;
  RlConfig rl_config_;
  QTable q_;
  StateSpace space_{{}, {}};
  EpisodeLog log_;
  std::optional<size_t> ctx_idx_, perm_idx_, denials_idx_;
};

nlohmann::json qtable_to_json(const QTable& q, const StateSpace& space);
std::pair<QTable, StateSpace> qtable_from_json(const nlohmann::json& j);

// "episode,reward,cumulative_reward,epsilon" rows.
std::string episode_log_to_csv(const EpisodeLog& log);

}  // namespace privpref
