#include "privpref/rl.hpp"

#include <algorithm>
#include <cmath>

#include "privpref/csv.hpp"
#include "privpref/errors.hpp"

namespace privpref {

void RlConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigInvalidError("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw ConfigInvalidError("gamma must lie in [0, 1)");
  if (!(epsilon0 >= 0.0 && epsilon0 <= 1.0) ||
      !(epsilon_floor >= 0.0 && epsilon_floor <= 1.0) ||
      !(epsilon_decay > 0.0 && epsilon_decay <= 1.0))
    throw ConfigInvalidError("epsilon schedule out of range");
  if (steps_per_episode < 1)
    throw ConfigInvalidError("steps_per_episode must be >= 1");
}

double RlConfig::epsilon_at(size_t episode) const {
  double eps = epsilon0 * std::pow(epsilon_decay, static_cast<double>(episode));
  return std::max(eps, epsilon_floor);
}

double QTable::max_value(size_t state) const {
  double best = at(state, Action::Retain);
  for (size_t a = 1; a < kNumActions; ++a)
    best = std::max(best, at(state, static_cast<Action>(a)));
  return best;
}

Action QTable::greedy_action(size_t state) const {
  size_t best = 0;
  for (size_t a = 1; a < kNumActions; ++a)
    if (at(state, static_cast<Action>(a)) > at(state, static_cast<Action>(best)))
      best = a;
  return static_cast<Action>(best);
}

void q_update(QTable& q, const Transition& t, const RlConfig& cfg) {
  double& cell = q.at(t.state, t.action);
  cell += cfg.alpha * (t.reward + cfg.gamma * q.max_value(t.next_state) - cell);
}

Action epsilon_greedy(const QTable& q, size_t state, double eps,
                      SplitMix64& rng) {
  if (rng.bernoulli(eps))
    return static_cast<Action>(rng.uniform_below(kNumActions));
  return q.greedy_action(state);
}

std::pair<QTable, EpisodeLog> train_q(Environment& env, const RlConfig& cfg) {
  cfg.validate();
  QTable q(env.state_count());
  EpisodeLog log;
  double running = 0.0;
  for (size_t ep = 0; ep < cfg.episodes; ++ep) {
    SplitMix64 rng(derive_seed(cfg.seed, "rl/episode", {ep}));
    const double eps = cfg.epsilon_at(ep);
    size_t state = env.start_state(rng);
    EpisodeStats stats;
    stats.epsilon = eps;
    for (size_t step = 0; step < cfg.steps_per_episode; ++step) {
      Action a = epsilon_greedy(q, state, eps, rng);
      auto [next, reward] = env.step(state, a, rng);
      q_update(q, {state, a, reward, next}, cfg);
      stats.total_reward += reward;
      ++stats.steps;
      state = next;
    }
    running += stats.total_reward;
    log.episodes.push_back(stats);
    log.cumulative_reward.push_back(running);
  }
  return {q, log};
}

// ---------------------------------------------------------------------------
// StateSpace / PrivacyEnv

StateSpace::StateSpace(std::vector<std::string> contexts,
                       std::vector<std::string> permissions)
    : contexts_(std::move(contexts)), permissions_(std::move(permissions)) {}

StateSpace StateSpace::from_schema(const FeatureSchema& schema) {
  return StateSpace(schema.feature(kContextFeature).categorical().domain,
                    schema.feature(kPermissionFeature).categorical().domain);
}

size_t StateSpace::index(const EnvState& s) const {
  auto find = [](const std::vector<std::string>& v, const std::string& t) {
    auto it = std::find(v.begin(), v.end(), t);
    if (it == v.end())
      throw ConfigInvalidError("state token \"" + t + "\" not in state space");
    return static_cast<size_t>(it - v.begin());
  };
  size_t ci = find(contexts_, s.context);
  size_t pi = find(permissions_, s.permission);
  size_t si = choice_index(s.current_setting);
  size_t bi = static_cast<size_t>(s.denial_bucket);
  return ((ci * permissions_.size() + pi) * kNumChoices + si) * 3 + bi;
}

EnvState StateSpace::state(size_t index) const {
  EnvState s;
  s.denial_bucket = static_cast<int>(index % 3);
  index /= 3;
  s.current_setting = choice_from_index(index % kNumChoices);
  index /= kNumChoices;
  s.permission = permissions_[index % permissions_.size()];
  index /= permissions_.size();
  s.context = contexts_[index];
  return s;
}

std::string StateSpace::key(const EnvState& s) const {
  return s.context + "|" + s.permission + "|" +
         std::string(choice_token(s.current_setting)) + "|" +
         std::string(denial_bucket_token(s.denial_bucket));
}

PrivacyEnv::PrivacyEnv(const GeneratorConfig& config)
    : config_(config), space_(StateSpace::from_schema(config.schema)) {
  config_.validate();
}

size_t PrivacyEnv::start_state(SplitMix64& rng) {
  prefs_.clear();
  for (const Persona& p : config_.personas)
    prefs_.push_back(preference_state(p));
  persona_idx_ = rng.categorical(config_.mixture_weights);
  return space_.index(sample_start_state(config_.personas[persona_idx_], rng));
}

std::pair<size_t, double> PrivacyEnv::step(size_t state, Action a,
                                           SplitMix64& rng) {
  EnvState current = space_.state(state);
  double reward = action_reward(prefs_[persona_idx_], current, a);
  persona_idx_ = rng.categorical(config_.mixture_weights);
  EnvState next = advance_state(config_.personas[persona_idx_],
                                prefs_[persona_idx_],
                                apply_action(a, current.current_setting), rng);
  return {space_.index(next), reward};
}

// ---------------------------------------------------------------------------
// QPolicyClassifier

QPolicyClassifier::QPolicyClassifier(QTable q, StateSpace space,
                                     const FeatureSchema& schema)
    : q_(std::move(q)), space_(std::move(space)) {
  bind_schema(schema);
}

void QPolicyClassifier::bind_schema(const FeatureSchema& schema) {
  ctx_idx_ = schema.index_of(kContextFeature);
  perm_idx_ = schema.index_of(kPermissionFeature);
  denials_idx_ = schema.index_of(kDenialsFeature);
  if (!ctx_idx_ || !perm_idx_)
    throw ConfigInvalidError(
        "q-policy classifier needs context and permission features");
  if (denials_idx_ && !schema.features[*denials_idx_].is_numeric())
    denials_idx_.reset();  // bracket-generalized denials carry no count
}

void QPolicyClassifier::fit(const LabeledDataset& train, uint64_t seed) {
  PrivacyEnv env(gen_config_);
  RlConfig cfg = rl_config_;
  cfg.seed = seed;
  auto [q, log] = train_q(env, cfg);
  q_ = std::move(q);
  log_ = std::move(log);
  space_ = env.space();
  bind_schema(train.schema);
}

ProbVector QPolicyClassifier::predict_proba(const PrivacyRecord& r) const {
  if (!ctx_idx_) throw ConfigInvalidError("q-policy classifier is not fitted");
  const CellValue& ctx = r.values.at(*ctx_idx_);
  const CellValue& perm = r.values.at(*perm_idx_);
  if (ctx.is_missing() || perm.is_missing())
    throw ConfigInvalidError("record " + std::to_string(r.record_id) +
                             " lacks context/permission; impute first");
  EnvState s;
  s.context = ctx.cat;
  s.permission = perm.cat;
  s.current_setting = PrivacyChoice::Ask;
  s.denial_bucket = 0;
  if (denials_idx_ && !r.values.at(*denials_idx_).is_missing())
    s.denial_bucket = denial_bucket_of(r.values.at(*denials_idx_).num);

  PrivacyChoice predicted =
      apply_action(q_.greedy_action(space_.index(s)), s.current_setting);

  // One-hot softened by 0.01 so the probability contract holds strictly.
  constexpr double spread = 0.01;
  ProbVector p;
  p.fill(spread / kNumChoices);
  p[choice_index(predicted)] += 1.0 - spread;
  return p;
}

// ---------------------------------------------------------------------------
// serialization

nlohmann::json qtable_to_json(const QTable& q, const StateSpace& space) {
  nlohmann::json states;
  for (size_t s = 0; s < space.count(); ++s) {
    std::array<double, kNumActions> row;
    for (size_t a = 0; a < kNumActions; ++a)
      row[a] = q.at(s, static_cast<Action>(a));
    states[space.key(space.state(s))] = row;
  }
  nlohmann::json j;
  j["contexts"] = space.contexts();
  j["permissions"] = space.permissions();
  j["states"] = states;
  return j;
}

std::pair<QTable, StateSpace> qtable_from_json(const nlohmann::json& j) {
  StateSpace space(j.at("contexts").get<std::vector<std::string>>(),
                   j.at("permissions").get<std::vector<std::string>>());
  QTable q(space.count());
  const auto& states = j.at("states");
  for (size_t s = 0; s < space.count(); ++s) {
    const std::string key = space.key(space.state(s));
    auto it = states.find(key);
    if (it == states.end())
      throw ConfigInvalidError("q-table json lacks state \"" + key + "\"");
    auto row = it->get<std::array<double, kNumActions>>();
    for (size_t a = 0; a < kNumActions; ++a)
      q.at(s, static_cast<Action>(a)) = row[a];
  }
  return {std::move(q), std::move(space)};
}

std::string episode_log_to_csv(const EpisodeLog& log) {
  std::string out = "episode,reward,cumulative_reward,epsilon\n";
  for (size_t i = 0; i < log.episodes.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_number(log.episodes[i].total_reward);
    out += ',';
    out += format_number(log.cumulative_reward[i]);
    out += ',';
    out += format_number(log.episodes[i].epsilon);
    out += '\n';
  }
  return out;
}

}  // namespace privpref
