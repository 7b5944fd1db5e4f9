#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "socnav/scenarios.hpp"
#include "socnav/slm.hpp"

namespace socnav {

struct EnvConfig {
  double arena = 15.0;
  double step_length = 0.45;
  double success_threshold = 0.45;
  int max_steps = 200;
  int n_headings = 16;
  double gamma = 0.9;
  double sigma = 0.5;
  double terminal_c = 500.0;
  double alpha = 1.0;
  // Reward social discomfort with +sigma R_s instead of the default penalty.
  bool literal_social_sign = false;
  SlmParams slm;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

enum class EpisodeStatus { kRunning, kSuccess, kOutOfBounds, kStepLimit };

const char* to_string(EpisodeStatus status);

// Agent position relative to the arena center, then (dx, dy, heading) per
// person. Positions are scaled by the half side and relative offsets by the
// full side, so all entries stay in [-1, 1] while the agent is inside.
using Observation = std::vector<double>;

struct RewardBreakdown {
  double distance = 0.0;        // R_d
  double energy = 0.0;          // R_e
  double social_raw = 0.0;      // R_s, unweighted
  double social_weighted = 0.0; // signed sigma R_s as applied
  double terminal = 0.0;        // +-C on the final step, else 0

  double total() const { return distance + energy + social_weighted + terminal; }
};

struct StepOutcome {
  Observation observation;
  double reward = 0.0;
  EpisodeStatus status = EpisodeStatus::kRunning;
  RewardBreakdown breakdown;
};

struct EpisodeRecord {
  std::vector<Point> positions;  // steps + 1 entries
  std::vector<double> headings;  // heading of each position; 0 at the start
  std::vector<StepOutcome> steps;
  double total_reward = 0.0;
  double discounted_return = 0.0;
  EpisodeStatus status = EpisodeStatus::kRunning;

  std::size_t length() const { return steps.size(); }
};

double reward_energy(const EnvConfig& config);
double reward_distance(double d_prev, double d_curr, const EnvConfig& config);
// Unweighted R_s at the agent pose. A person exactly on the agent contributes
// the clamp value 1.
double reward_social(const Pose& agent, std::span<const Pose> persons,
                     const EnvConfig& config);

EpisodeStatus check_termination(const Point& agent, const Point& goal, int steps_taken,
                                const EnvConfig& config);

// sum_t gamma^t r_t.
double discounted_return(std::span<const double> rewards, double gamma);

// Single-agent episodic navigation among static people.
class NavEnv {
 public:
  // Throws InvalidScenarioError if the scenario does not fit the config.
  NavEnv(Scenario scenario, EnvConfig config);

  Observation reset();
  // Moves step_length along heading 2 pi action / n_headings. Throws
  // EpisodeFinishedError after termination and std::out_of_range for a bad
  // action index.
  StepOutcome step(int action);

  Observation observe() const;
  std::size_t observation_size() const { return 3 * humans_.size() + 2; }
  const Pose& agent() const { return agent_; }
  EpisodeStatus status() const { return record_.status; }
  int steps_taken() const { return static_cast<int>(record_.steps.size()); }
  const EpisodeRecord& record() const { return record_; }
  const Scenario& scenario() const { return scenario_; }
  const EnvConfig& config() const { return config_; }

 private:
  Scenario scenario_;
  EnvConfig config_;
  std::vector<Pose> humans_;
  Pose agent_;
  EpisodeRecord record_;
  std::vector<double> rewards_;
};

// Columns: step,x,y,heading,r_total,r_d,r_e,r_s_weighted,status. Row 0 is the
// start position with zero rewards.
void write_episode_csv(const EpisodeRecord& record, std::ostream& out);

}  // namespace socnav
