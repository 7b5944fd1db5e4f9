#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "socnav/env.hpp"
#include "socnav/netopt.hpp"
#include "socnav/rng.hpp"

namespace socnav {

struct TrainConfig {
  long total_env_steps = 10000;
  int n_steps = 5;
  double value_loss_coef = 0.5;
  double entropy_coef = 0.0;
  double grad_clip_norm = 0.5;
  std::uint64_t seed = 0;
  double learning_rate = 5e-4;
  double rmsprop_rho = 0.99;
  double rmsprop_epsilon = 1e-8;
  std::vector<int> hidden = {64, 128, 256, 128, 64};
  // Episodes between progress lines on the optional log stream; 0 disables.
  int log_interval = 0;

  void validate() const;
};

// Separate actor (logits over headings) and critic (state value) networks
// with the same hidden stack.
struct ActorCritic {
  MlpParams actor;
  MlpParams critic;
};

ActorCritic make_actor_critic(int observation_size, int n_actions,
                              const std::vector<int>& hidden, Rng& rng);

struct EpisodeLogEntry {
  long index = 0;
  long env_step = 0;  // environment steps consumed when the episode ended
  double reward = 0.0;
  int length = 0;
  EpisodeStatus status = EpisodeStatus::kRunning;
};

struct UpdateLogEntry {
  long env_step = 0;
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;  // before clipping
};

struct TrainLog {
  std::vector<EpisodeLogEntry> episodes;
  std::vector<UpdateLogEntry> updates;
};

struct Transition {
  Observation observation;
  int action = 0;
  double reward = 0.0;
  bool done = false;
  double value = 0.0;
};

struct Rollout {
  std::vector<Transition> steps;
  double bootstrap_value = 0.0;  // V of the state after the last step; 0 if it ended an episode
};

struct ActionChoice {
  int action = 0;
  double value = 0.0;
};

using PolicyFn = std::function<ActionChoice(const Observation&, Rng&)>;
using ValueFn = std::function<double(const Observation&)>;

// Runs exactly n_steps transitions, resetting the environment after each
// finished episode. Finished episodes are appended to episodes (if given) with
// env_step counted from *env_steps_so_far.
Rollout collect_rollout(const PolicyFn& policy, const ValueFn& value, NavEnv& env, int n_steps,
                        Rng& rng, std::vector<EpisodeLogEntry>* episodes = nullptr,
                        long* env_steps_so_far = nullptr);

struct Advantages {
  std::vector<double> returns;
  std::vector<double> advantages;
};

// n-step returns R_t = r_t + gamma R_{t+1}, cut at done and seeded with the
// bootstrap value; A_t = R_t - V(s_t).
Advantages compute_advantages(const Rollout& rollout, double gamma);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
  double clipped_norm = 0.0;
};

struct Optimizers {
  RmspropState actor;
  RmspropState critic;
};

Optimizers make_optimizers(const ActorCritic& nets, const TrainConfig& config);

// One A2C step: policy-gradient loss with advantages held constant, squared
// value error, joint global-norm clipping, then one RMSprop step per network.
// Throws TrainingDivergenceError (with a text dump of the batch) on a
// non-finite loss or gradient.
UpdateStats a2c_update(ActorCritic& nets, Optimizers& opt, const Rollout& rollout,
                       const Advantages& adv, const TrainConfig& config);

struct TrainResult {
  ActorCritic nets;
  TrainLog log;
  long env_steps = 0;
};

// Optional progress stream receives one line per log_interval episodes.
TrainResult train(const Scenario& scenario, const EnvConfig& env_config,
                  const TrainConfig& train_config, std::ostream* progress = nullptr);

// Argmax actions, ties to the lowest index. Throws DimensionError when the
// network does not fit the scenario's observation or action sizes.
EpisodeRecord rollout_greedy(const MlpParams& actor, const Scenario& scenario,
                             const EnvConfig& env_config);

// Hex digest of every environment setting that shapes the learned policy.
std::string env_fingerprint(const EnvConfig& config);

void write_episode_log_csv(const TrainLog& log, std::ostream& out);
void write_update_log_csv(const TrainLog& log, std::ostream& out);

// Actor checkpoint in the network text format with an "env-fingerprint" trailer.
void save_policy(const MlpParams& actor, const EnvConfig& env_config,
                 const std::filesystem::path& path);
struct PolicyCheckpoint {
  MlpParams actor;
  std::string fingerprint;  // empty if the file carries none
};
PolicyCheckpoint load_policy(const std::filesystem::path& path);

}  // namespace socnav
