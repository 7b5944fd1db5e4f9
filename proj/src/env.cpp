#include "socnav/env.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "socnav/errors.hpp"

namespace socnav {

void EnvConfig::validate() const {
  if (!(step_length > 0.0) || !(step_length < arena)) {
    throw std::invalid_argument("env config: need 0 < step_length < arena");
  }
  if (!(success_threshold > 0.0)) throw std::invalid_argument("env config: success_threshold must be > 0");
  if (n_headings < 4) throw std::invalid_argument("env config: n_headings must be >= 4");
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("env config: gamma must be in (0, 1]");
  if (!(sigma >= 0.0)) throw std::invalid_argument("env config: sigma must be >= 0");
  if (max_steps < 1) throw std::invalid_argument("env config: max_steps must be >= 1");
  slm.validate();
}

const char* to_string(EpisodeStatus status) {
  switch (status) {
    case EpisodeStatus::kRunning: return "running";
    case EpisodeStatus::kSuccess: return "success";
    case EpisodeStatus::kOutOfBounds: return "failure_out_of_bounds";
    case EpisodeStatus::kStepLimit: return "failure_step_limit";
  }
  return "unknown";
}

double reward_energy(const EnvConfig& config) { return -config.alpha; }

double reward_distance(double d_prev, double d_curr, const EnvConfig& config) {
  return (d_prev - d_curr) / config.step_length;
}

double reward_social(const Pose& agent, std::span<const Pose> persons,
                     const EnvConfig& config) {
  return total_field_contact_clamped(agent, persons, config.slm).total;
}

EpisodeStatus check_termination(const Point& agent, const Point& goal, int steps_taken,
                                const EnvConfig& config) {
  if (std::hypot(goal.x - agent.x, goal.y - agent.y) < config.success_threshold) {
    return EpisodeStatus::kSuccess;
  }
  if (agent.x < 0.0 || agent.x > config.arena || agent.y < 0.0 || agent.y > config.arena) {
    return EpisodeStatus::kOutOfBounds;
  }
  if (steps_taken >= config.max_steps) return EpisodeStatus::kStepLimit;
  return EpisodeStatus::kRunning;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (double r : rewards) {
    total += weight * r;
    weight *= gamma;
  }
  return total;
}

NavEnv::NavEnv(Scenario scenario, EnvConfig config)
    : scenario_(std::move(scenario)), config_(std::move(config)) {
  config_.validate();
  if (scenario_.arena_side != config_.arena) {
    throw InvalidScenarioError(scenario_.id, "arena side differs from the environment arena");
  }
  validate_scenario(scenario_, config_.success_threshold);
  humans_ = scenario_.human_poses();
  reset();
}

Observation NavEnv::reset() {
  agent_ = Pose(scenario_.start.x, scenario_.start.y, 0.0);
  record_ = EpisodeRecord{};
  record_.positions.push_back(scenario_.start);
  record_.headings.push_back(0.0);
  rewards_.clear();
  return observe();
}

Observation NavEnv::observe() const {
  const double half = config_.arena / 2.0;
  Observation obs;
  obs.reserve(observation_size());
  obs.push_back((agent_.x() - half) / half);
  obs.push_back((agent_.y() - half) / half);
  for (const Pose& h : humans_) {
    obs.push_back((h.x() - agent_.x()) / config_.arena);
    obs.push_back((h.y() - agent_.y()) / config_.arena);
    obs.push_back(h.heading() / std::numbers::pi);
  }
  return obs;
}

StepOutcome NavEnv::step(int action) {
  if (record_.status != EpisodeStatus::kRunning) throw EpisodeFinishedError();
  if (action < 0 || action >= config_.n_headings) {
    throw std::out_of_range("action index " + std::to_string(action) + " outside [0, " +
                            std::to_string(config_.n_headings) + ")");
  }
  const double heading = 2.0 * std::numbers::pi * action / config_.n_headings;
  const Point& goal = scenario_.goal;
  const double d_prev = std::hypot(goal.x - agent_.x(), goal.y - agent_.y());
  agent_.set_position(agent_.x() + config_.step_length * std::cos(heading),
                      agent_.y() + config_.step_length * std::sin(heading));
  agent_.set_heading(heading);
  const double d_curr = std::hypot(goal.x - agent_.x(), goal.y - agent_.y());

  StepOutcome out;
  RewardBreakdown& r = out.breakdown;
  r.distance = reward_distance(d_prev, d_curr, config_);
  r.energy = reward_energy(config_);
  r.social_raw = reward_social(agent_, humans_, config_);
  r.social_weighted = (config_.literal_social_sign ? 1.0 : -1.0) * config_.sigma * r.social_raw;

  const Point here{agent_.x(), agent_.y()};
  const int steps = steps_taken() + 1;
  out.status = check_termination(here, goal, steps, config_);
  if (out.status == EpisodeStatus::kSuccess) {
    r.terminal = config_.terminal_c;
  } else if (out.status != EpisodeStatus::kRunning) {
    r.terminal = -config_.terminal_c;
  }
  out.reward = r.total();
  out.observation = observe();

  record_.positions.push_back(here);
  record_.headings.push_back(agent_.heading());
  record_.total_reward += out.reward;
  rewards_.push_back(out.reward);
  record_.discounted_return = discounted_return(rewards_, config_.gamma);
  record_.status = out.status;
  record_.steps.push_back(out);
  return out;
}

void write_episode_csv(const EpisodeRecord& record, std::ostream& out) {
  out << "step,x,y,heading,r_total,r_d,r_e,r_s_weighted,status\n";
  char buf[256];
  for (std::size_t i = 0; i < record.positions.size(); ++i) {
    RewardBreakdown r;
    double total = 0.0;
    const char* status = "running";
    if (i > 0) {
      const StepOutcome& s = record.steps[i - 1];
      r = s.breakdown;
      total = s.reward;
      status = to_string(s.status);
    }
    std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%s\n", i,
                  record.positions[i].x, record.positions[i].y, record.headings[i], total,
                  r.distance, r.energy, r.social_weighted, status);
    out << buf;
  }
}

}  // namespace socnav
