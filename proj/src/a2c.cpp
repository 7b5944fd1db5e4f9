#include "socnav/a2c.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

Eigen::VectorXd to_vector(const Observation& obs) {
  return Eigen::Map<const Eigen::VectorXd>(obs.data(), static_cast<Eigen::Index>(obs.size()));
}

int sample_categorical(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  int last_positive = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  // u landed in the rounding gap above the cumulative sum.
  return last_positive;
}

std::string dump_batch(const Rollout& rollout, const Advantages& adv, const std::string& why) {
  std::ostringstream out;
  out.precision(17);
  out << "# divergence: " << why << '\n';
  out << "# index,action,reward,done,value,return,advantage,observation...\n";
  for (std::size_t i = 0; i < rollout.steps.size(); ++i) {
    const Transition& t = rollout.steps[i];
    out << i << ',' << t.action << ',' << t.reward << ',' << t.done << ',' << t.value << ','
        << adv.returns[i] << ',' << adv.advantages[i];
    for (double v : t.observation) out << ',' << v;
    out << '\n';
  }
  out << "# bootstrap_value," << rollout.bootstrap_value << '\n';
  return out.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

void TrainConfig::validate() const {
  if (n_steps < 1 || total_env_steps < n_steps) {
    throw std::invalid_argument("train config: need total_env_steps >= n_steps >= 1");
  }
  if (value_loss_coef < 0.0 || entropy_coef < 0.0 || grad_clip_norm < 0.0) {
    throw std::invalid_argument("train config: coefficients must be >= 0");
  }
  if (!(learning_rate > 0.0) || !(rmsprop_rho > 0.0 && rmsprop_rho < 1.0)) {
    throw std::invalid_argument("train config: bad optimizer settings");
  }
}

ActorCritic make_actor_critic(int observation_size, int n_actions, const std::vector<int>& hidden,
                              Rng& rng) {
  std::vector<int> actor_sizes{observation_size};
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  std::vector<int> critic_sizes = actor_sizes;
  actor_sizes.push_back(n_actions);
  critic_sizes.push_back(1);
  ActorCritic nets;
  nets.actor = glorot_mlp(actor_sizes, rng);
  nets.critic = glorot_mlp(critic_sizes, rng);
  return nets;
}

Rollout collect_rollout(const PolicyFn& policy, const ValueFn& value, NavEnv& env, int n_steps,
                        Rng& rng, std::vector<EpisodeLogEntry>* episodes,
                        long* env_steps_so_far) {
  Rollout rollout;
  rollout.steps.reserve(static_cast<std::size_t>(n_steps));
  if (env.status() != EpisodeStatus::kRunning) env.reset();
  Observation obs = env.observe();
  for (int i = 0; i < n_steps; ++i) {
    const ActionChoice choice = policy(obs, rng);
    const StepOutcome outcome = env.step(choice.action);
    if (env_steps_so_far != nullptr) ++*env_steps_so_far;
    const bool done = outcome.status != EpisodeStatus::kRunning;
    rollout.steps.push_back(Transition{std::move(obs), choice.action, outcome.reward, done, choice.value});
    if (done) {
      if (episodes != nullptr) {
        const EpisodeRecord& rec = env.record();
        episodes->push_back(EpisodeLogEntry{static_cast<long>(episodes->size()),
                                            env_steps_so_far ? *env_steps_so_far : 0,
                                            rec.total_reward, static_cast<int>(rec.length()),
                                            rec.status});
      }
      obs = env.reset();
    } else {
      obs = outcome.observation;
    }
  }
  rollout.bootstrap_value = rollout.steps.back().done ? 0.0 : value(obs);
  return rollout;
}

Advantages compute_advantages(const Rollout& rollout, double gamma) {
  const std::size_t n = rollout.steps.size();
  Advantages out;
  out.returns.assign(n, 0.0);
  out.advantages.assign(n, 0.0);
  double running = rollout.bootstrap_value;
  for (std::size_t i = n; i-- > 0;) {
    const Transition& t = rollout.steps[i];
    if (t.done) running = 0.0;
    running = t.reward + gamma * running;
    out.returns[i] = running;
    out.advantages[i] = running - t.value;
  }
  return out;
}

Optimizers make_optimizers(const ActorCritic& nets, const TrainConfig& config) {
  return Optimizers{
      make_rmsprop(nets.actor, config.learning_rate, config.rmsprop_rho, config.rmsprop_epsilon),
      make_rmsprop(nets.critic, config.learning_rate, config.rmsprop_rho, config.rmsprop_epsilon)};
}

UpdateStats a2c_update(ActorCritic& nets, Optimizers& opt, const Rollout& rollout,
                       const Advantages& adv, const TrainConfig& config) {
  const auto batch = static_cast<Eigen::Index>(rollout.steps.size());
  if (batch == 0) throw std::invalid_argument("a2c_update: empty batch");
  const auto obs_size = static_cast<Eigen::Index>(rollout.steps.front().observation.size());
  Eigen::MatrixXd inputs(obs_size, batch);
  for (Eigen::Index j = 0; j < batch; ++j) inputs.col(j) = to_vector(rollout.steps[j].observation);

  const ForwardTrace actor_trace = forward(nets.actor, inputs);
  const ForwardTrace critic_trace = forward(nets.critic, inputs);
  const Eigen::MatrixXd& logits = actor_trace.activations.back();
  const Eigen::MatrixXd& values = critic_trace.activations.back();

  const double inv_b = 1.0 / static_cast<double>(batch);
  UpdateStats stats;
  Eigen::MatrixXd logit_grad(logits.rows(), batch);
  Eigen::MatrixXd value_grad(1, batch);
  for (Eigen::Index j = 0; j < batch; ++j) {
    const Eigen::VectorXd z = logits.col(j);
    const double top = z.maxCoeff();
    const Eigen::ArrayXd shifted = z.array() - top;
    const double log_norm = std::log(shifted.exp().sum());
    const Eigen::ArrayXd log_p = shifted - log_norm;
    const Eigen::ArrayXd p = log_p.exp();
    const double entropy = -(p * log_p).sum();
    const int a = rollout.steps[j].action;
    const double advantage = adv.advantages[j];

    stats.policy_loss += -advantage * log_p[a] * inv_b;
    stats.entropy += entropy * inv_b;

    // d(-A log p_a)/dz = -A (onehot_a - p);  dH/dz = -p (log p + H).
    Eigen::ArrayXd g = advantage * p;
    g[a] -= advantage;
    g += config.entropy_coef * p * (log_p + entropy);
    logit_grad.col(j) = (g * inv_b).matrix();

    const double diff = values(0, j) - adv.returns[j];
    stats.value_loss += config.value_loss_coef * diff * diff * inv_b;
    value_grad(0, j) = config.value_loss_coef * 2.0 * diff * inv_b;
  }
  stats.policy_loss -= config.entropy_coef * stats.entropy;

  if (!std::isfinite(stats.policy_loss) || !std::isfinite(stats.value_loss)) {
    throw TrainingDivergenceError("a2c: non-finite loss",
                                  dump_batch(rollout, adv, "non-finite loss"));
  }

  MlpParams actor_grad = backward(nets.actor, actor_trace, logit_grad);
  MlpParams critic_grad = backward(nets.critic, critic_trace, value_grad);
  const double na = global_norm(actor_grad);
  const double nc = global_norm(critic_grad);
  stats.grad_norm = std::sqrt(na * na + nc * nc);
  if (!std::isfinite(stats.grad_norm)) {
    throw TrainingDivergenceError("a2c: non-finite gradient",
                                  dump_batch(rollout, adv, "non-finite gradient"));
  }
  stats.clipped_norm = stats.grad_norm;
  if (stats.grad_norm > config.grad_clip_norm) {
    const double scale = config.grad_clip_norm / (stats.grad_norm + 1e-6);
    scale_in_place(actor_grad, scale);
    scale_in_place(critic_grad, scale);
    stats.clipped_norm = stats.grad_norm * scale;
  }
  rmsprop_step(nets.actor, actor_grad, opt.actor);
  rmsprop_step(nets.critic, critic_grad, opt.critic);
  return stats;
}

TrainResult train(const Scenario& scenario, const EnvConfig& env_config,
                  const TrainConfig& train_config, std::ostream* progress) {
  train_config.validate();
  NavEnv env(scenario, env_config);
  Rng init_rng(mix_seed(train_config.seed, 0));
  Rng sample_rng(mix_seed(train_config.seed, 1));

  TrainResult result;
  result.nets = make_actor_critic(static_cast<int>(env.observation_size()),
                                  env_config.n_headings, train_config.hidden, init_rng);
  Optimizers opt = make_optimizers(result.nets, train_config);
  ActorCritic& nets = result.nets;

  const PolicyFn policy = [&nets](const Observation& obs, Rng& rng) {
    const Eigen::VectorXd x = to_vector(obs);
    const Eigen::VectorXd probs = softmax(forward(nets.actor, x));
    return ActionChoice{sample_categorical(probs, rng), forward(nets.critic, x)[0]};
  };
  const ValueFn value = [&nets](const Observation& obs) {
    return forward(nets.critic, to_vector(obs))[0];
  };

  std::size_t reported = 0;
  while (result.env_steps < train_config.total_env_steps) {
    const Rollout rollout = collect_rollout(policy, value, env, train_config.n_steps, sample_rng,
                                            &result.log.episodes, &result.env_steps);
    const Advantages adv = compute_advantages(rollout, env_config.gamma);
    const UpdateStats stats = a2c_update(nets, opt, rollout, adv, train_config);
    result.log.updates.push_back(UpdateLogEntry{result.env_steps, stats.policy_loss,
                                                stats.value_loss, stats.entropy, stats.grad_norm});
    if (progress != nullptr && train_config.log_interval > 0) {
      while (reported + static_cast<std::size_t>(train_config.log_interval) <=
             result.log.episodes.size()) {
        reported += static_cast<std::size_t>(train_config.log_interval);
        const auto& e = result.log.episodes[reported - 1];
        *progress << "episode " << e.index << " step " << e.env_step << " reward " << e.reward
                  << " length " << e.length << ' ' << to_string(e.status) << '\n';
      }
    }
  }
  return result;
}

EpisodeRecord rollout_greedy(const MlpParams& actor, const Scenario& scenario,
                             const EnvConfig& env_config) {
  NavEnv env(scenario, env_config);
  if (actor.input_size() != static_cast<int>(env.observation_size()) ||
      actor.output_size() != env_config.n_headings) {
    throw DimensionError("policy network " + std::to_string(actor.input_size()) + "->" +
                         std::to_string(actor.output_size()) + " does not fit observation size " +
                         std::to_string(env.observation_size()) + " and " +
                         std::to_string(env_config.n_headings) + " actions");
  }
  Observation obs = env.observe();
  while (env.status() == EpisodeStatus::kRunning) {
    const Eigen::VectorXd logits = forward(actor, to_vector(obs));
    int best = 0;
    for (Eigen::Index i = 1; i < logits.size(); ++i) {
      if (logits[i] > logits[best]) best = static_cast<int>(i);
    }
    obs = env.step(best).observation;
  }
  return env.record();
}

std::string env_fingerprint(const EnvConfig& c) {
  std::ostringstream s;
  s.precision(17);
  s << c.arena << ' ' << c.step_length << ' ' << c.success_threshold << ' ' << c.max_steps << ' '
    << c.n_headings << ' ' << c.gamma << ' ' << c.sigma << ' ' << c.terminal_c << ' ' << c.alpha
    << ' ' << c.literal_social_sign << ' ' << c.slm.m_agent << ' ' << c.slm.n_agent << ' '
    << c.slm.m_person << ' ' << c.slm.n_person << ' ' << c.slm.a << ' ' << c.slm.b << ' '
    << c.slm.c << ' ' << c.slm.k_cap << ' ' << c.slm.enable_hrsc << c.slm.enable_hisc
    << c.slm.enable_cac;
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(s.str())));
  return buf;
}

void write_episode_log_csv(const TrainLog& log, std::ostream& out) {
  out << "episode_idx,env_step,reward,length,status\n";
  char buf[160];
  for (const auto& e : log.episodes) {
    std::snprintf(buf, sizeof(buf), "%ld,%ld,%.9g,%d,%s\n", e.index, e.env_step, e.reward,
                  e.length, to_string(e.status));
    out << buf;
  }
}

void write_update_log_csv(const TrainLog& log, std::ostream& out) {
  out << "env_step,policy_loss,value_loss,entropy,grad_norm\n";
  char buf[160];
  for (const auto& u : log.updates) {
    std::snprintf(buf, sizeof(buf), "%ld,%.9g,%.9g,%.9g,%.9g\n", u.env_step, u.policy_loss,
                  u.value_loss, u.entropy, u.grad_norm);
    out << buf;
  }
}

void save_policy(const MlpParams& actor, const EnvConfig& env_config,
                 const std::filesystem::path& path) {
  save_checkpoint(actor, path, {"env-fingerprint " + env_fingerprint(env_config)});
}

PolicyCheckpoint load_policy(const std::filesystem::path& path) {
  Checkpoint ck = load_checkpoint(path);
  PolicyCheckpoint out{std::move(ck.params), {}};
  for (const auto& line : ck.trailer) {
    constexpr std::string_view kKey = "env-fingerprint ";
    if (line.starts_with(kKey)) out.fingerprint = line.substr(kKey.size());
  }
  return out;
}

}  // namespace socnav
