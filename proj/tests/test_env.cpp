#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "socnav/env.hpp"
#include "socnav/errors.hpp"
#include "socnav/rng.hpp"

using namespace socnav;
constexpr double kPi = std::numbers::pi;

namespace {

Scenario corridor(std::vector<HumanSpec> humans = {}) {
  Scenario s;
  s.id = "corridor";
  s.start = {2.0, 7.5};
  s.goal = {13.0, 7.5};
  s.humans = std::move(humans);
  return s;
}

}  // namespace

TEST(EnvConfig, Validation) {
  EnvConfig c;
  EXPECT_NO_THROW(c.validate());
  c.n_headings = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = EnvConfig{};
  c.gamma = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = EnvConfig{};
  c.step_length = 20.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = EnvConfig{};
  c.sigma = -0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Reset, ObservationLength) {
  EnvConfig c;
  EXPECT_EQ(NavEnv(corridor(), c).reset().size(), 2u);
  EXPECT_EQ(NavEnv(corridor({{7, 8, 90}}), c).reset().size(), 5u);
  EXPECT_EQ(NavEnv(corridor({{7, 8, 90}, {8, 9, 0}, {9, 6, 180}}), c).reset().size(), 11u);
}

TEST(Reset, ArenaMismatchIsInvalidScenario) {
  Scenario s = corridor();
  s.arena_side = 20.0;
  EXPECT_THROW(NavEnv(s, EnvConfig{}), InvalidScenarioError);
  Scenario outside = corridor();
  outside.goal = {16.0, 7.5};
  EXPECT_THROW(NavEnv(outside, EnvConfig{}), InvalidScenarioError);
}

TEST(Reset, ObservationValues) {
  NavEnv env(corridor({{8.0, 9.0, 90}}), EnvConfig{});
  const Observation o = env.reset();
  EXPECT_NEAR(o[0], (2.0 - 7.5) / 7.5, 1e-15);
  EXPECT_NEAR(o[1], 0.0, 1e-15);
  EXPECT_NEAR(o[2], 6.0 / 15.0, 1e-15);
  EXPECT_NEAR(o[3], 1.5 / 15.0, 1e-15);
  EXPECT_NEAR(o[4], 0.5, 1e-15);
}

TEST(Rewards, Energy) {
  EnvConfig c;
  EXPECT_EQ(reward_energy(c), -1.0);
  c.alpha = 0.0;
  EXPECT_EQ(reward_energy(c), 0.0);
  c.alpha = 2.5;
  EXPECT_EQ(reward_energy(c), -2.5);
}

TEST(Rewards, Distance) {
  EnvConfig c;
  EXPECT_DOUBLE_EQ(reward_distance(5.0, 4.55, c), 1.0);
  EXPECT_DOUBLE_EQ(reward_distance(4.55, 5.0, c), -1.0);
  EXPECT_NEAR(reward_distance(10.0, std::sqrt(100.0 + 0.2025), c), -0.022488620893, 1e-11);
}

TEST(Rewards, Social) {
  EnvConfig c;
  const Pose agent(0, 0, 0);
  EXPECT_EQ(reward_social(agent, {}, c), 0.0);
  const std::vector<Pose> one{Pose(1, 0, kPi)};
  EXPECT_NEAR(reward_social(agent, one, c), 0.229674140717, 1e-11);
}

TEST(Termination, Examples) {
  EnvConfig c;
  const Point goal{10, 10};
  EXPECT_EQ(check_termination({10.44, 10}, goal, 3, c), EpisodeStatus::kSuccess);
  EXPECT_EQ(check_termination({10.46, 10}, goal, 3, c), EpisodeStatus::kRunning);
  EXPECT_EQ(check_termination({15.1, 7}, goal, 3, c), EpisodeStatus::kOutOfBounds);
  EXPECT_EQ(check_termination({5, 5}, goal, 200, c), EpisodeStatus::kStepLimit);
  EXPECT_EQ(check_termination({15.1, 7}, goal, 200, c), EpisodeStatus::kOutOfBounds);
  EXPECT_EQ(check_termination({10.2, 10}, goal, 200, c), EpisodeStatus::kSuccess);
}

TEST(DiscountedReturn, Examples) {
  const std::vector<double> ones{1, 1, 1};
  EXPECT_DOUBLE_EQ(discounted_return(ones, 1.0), 3.0);
  const std::vector<double> late{0, 0, 500};
  EXPECT_NEAR(discounted_return(late, 0.9), 405.0, 1e-12);
  EXPECT_EQ(discounted_return({}, 0.9), 0.0);
}

TEST(Step, StraightAtGoalIsZeroReward) {
  NavEnv env(corridor(), EnvConfig{});
  const StepOutcome o = env.step(0);
  EXPECT_NEAR(o.reward, 0.0, 1e-12);
  EXPECT_EQ(o.status, EpisodeStatus::kRunning);
  EXPECT_NEAR(env.agent().x(), 2.45, 1e-12);
  EXPECT_NEAR(env.agent().heading(), 0.0, 1e-15);
}

TEST(Step, OutOfBounds) {
  Scenario s = corridor();
  s.start = {0.3, 7.5};
  NavEnv env(s, EnvConfig{});
  const StepOutcome o = env.step(8);  // heading pi
  EXPECT_EQ(o.status, EpisodeStatus::kOutOfBounds);
  EXPECT_EQ(o.breakdown.terminal, -500.0);
  EXPECT_NEAR(o.reward, -1.0 - 1.0 - 500.0, 1e-12);
  EXPECT_THROW(env.step(0), EpisodeFinishedError);
}

TEST(Step, Success) {
  Scenario s = corridor();
  s.start = {12.2, 7.5};
  NavEnv env(s, EnvConfig{});
  const StepOutcome o = env.step(0);
  EXPECT_EQ(o.status, EpisodeStatus::kSuccess);
  EXPECT_EQ(o.breakdown.terminal, 500.0);
  EXPECT_NEAR(o.reward, 1.0 - 1.0 + 500.0, 1e-12);
}

TEST(Step, StepLimit) {
  EnvConfig c;
  c.max_steps = 4;
  NavEnv env(corridor(), c);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(env.step(i % 2 ? 4 : 12).status, EpisodeStatus::kRunning);
  const StepOutcome o = env.step(4);
  EXPECT_EQ(o.status, EpisodeStatus::kStepLimit);
  EXPECT_EQ(o.breakdown.terminal, -500.0);
}

TEST(Step, BadActionAndHeadingDirections) {
  NavEnv env(corridor(), EnvConfig{});
  EXPECT_THROW(env.step(16), std::out_of_range);
  EXPECT_THROW(env.step(-1), std::out_of_range);
  env.step(4);
  EXPECT_NEAR(env.agent().x(), 2.0, 1e-12);
  EXPECT_NEAR(env.agent().y(), 7.95, 1e-12);
  EXPECT_NEAR(env.agent().heading(), kPi / 2, 1e-15);
}

TEST(Step, SocialPenaltySignAndLiteralFlag) {
  const Scenario s = corridor({{3.0, 7.5, 180}});
  EnvConfig c;
  NavEnv env(s, c);
  const StepOutcome o = env.step(0);
  EXPECT_GT(o.breakdown.social_raw, 0.0);
  EXPECT_NEAR(o.breakdown.social_weighted, -0.5 * o.breakdown.social_raw, 1e-15);
  c.literal_social_sign = true;
  NavEnv literal(s, c);
  const StepOutcome l = literal.step(0);
  EXPECT_NEAR(l.breakdown.social_weighted, 0.5 * l.breakdown.social_raw, 1e-15);
}

TEST(Step, AgentHeadingFeedsField) {
  // The person faces the agent; after stepping toward the person the agent
  // faces them too, after stepping away it turns its back.
  const Scenario s = corridor({{4.0, 7.5, 180}});
  NavEnv toward(s, EnvConfig{});
  NavEnv away(s, EnvConfig{});
  toward.step(4);
  toward.step(12);
  away.step(12);
  away.step(4);
  ASSERT_NEAR(toward.agent().x(), away.agent().x(), 1e-12);
  const Pose facing(2.0, 7.5, 0.0);
  const std::vector<Pose> person{Pose(4.0, 7.5, kPi)};
  EXPECT_NEAR(toward.record().steps.back().breakdown.social_raw,
              reward_social(Pose(2.0, 7.5, -kPi / 2), person, EnvConfig{}), 1e-12);
  EXPECT_NEAR(away.record().steps.back().breakdown.social_raw,
              reward_social(Pose(2.0, 7.5, kPi / 2), person, EnvConfig{}), 1e-12);
}

TEST(EnvProperties, RandomWalkInvariants) {
  const Scenario s = corridor({{7.0, 7.7, 30}, {9.0, 7.0, -120}});
  EnvConfig c;
  Rng rng(77);
  for (int episode = 0; episode < 300; ++episode) {
    NavEnv env(s, c);
    Observation obs = env.reset();
    while (env.status() == EpisodeStatus::kRunning) {
      EXPECT_EQ(obs.size(), 8u);
      EXPECT_GE(obs[0], -1.0);
      EXPECT_LE(obs[0], 1.0);
      EXPECT_GE(obs[1], -1.0);
      EXPECT_LE(obs[1], 1.0);
      for (double v : obs) {
        EXPECT_GE(v, -1.0);
        EXPECT_LE(v, 1.0);
      }
      const StepOutcome o = env.step(static_cast<int>(uniform_index(rng, 16)));
      const auto& b = o.breakdown;
      if (o.status == EpisodeStatus::kRunning) {
        EXPECT_EQ(b.terminal, 0.0);
      } else {
        EXPECT_EQ(std::abs(b.terminal), 500.0);
      }
      EXPECT_DOUBLE_EQ(o.reward, b.distance + b.energy + b.social_weighted + b.terminal);
      EXPECT_NEAR(b.social_weighted, -c.sigma * b.social_raw, 1e-15);
      EXPECT_GE(b.distance, -1.0 - 1e-12);
      EXPECT_LE(b.distance, 1.0 + 1e-12);
      obs = o.observation;
    }
    const auto& r = env.record();
    ASSERT_EQ(r.positions.size(), r.length() + 1);
    EXPECT_LE(r.length(), 200u);
    for (std::size_t i = 1; i < r.positions.size(); ++i) {
      const double step = std::hypot(r.positions[i].x - r.positions[i - 1].x,
                                     r.positions[i].y - r.positions[i - 1].y);
      EXPECT_NEAR(step, 0.45, 0.45 * 1e-12);
    }
    std::vector<double> rewards;
    for (const auto& st : r.steps) rewards.push_back(st.reward);
    EXPECT_DOUBLE_EQ(r.discounted_return, discounted_return(rewards, c.gamma));
  }
}

TEST(EnvProperties, EpisodeDeterminism) {
  const Scenario s = corridor({{7.0, 7.7, 30}});
  Rng rng(5);
  std::vector<int> actions;
  for (int i = 0; i < 60; ++i) actions.push_back(static_cast<int>(uniform_index(rng, 16)));
  auto run = [&] {
    NavEnv env(s, EnvConfig{});
    for (int a : actions) {
      if (env.status() != EpisodeStatus::kRunning) break;
      env.step(a);
    }
    std::ostringstream out;
    write_episode_csv(env.record(), out);
    return out.str();
  };
  EXPECT_EQ(run(), run());
}

TEST(EnvProperties, SigmaZeroIgnoresHumans) {
  EnvConfig c;
  c.sigma = 0.0;
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<HumanSpec> a{{uniform(rng, 3, 12), uniform(rng, 3, 12), uniform(rng, -180, 180)}};
    std::vector<HumanSpec> b{{uniform(rng, 3, 12), uniform(rng, 3, 12), uniform(rng, -180, 180)}};
    NavEnv ea(corridor(a), c), eb(corridor(b), c);
    for (int i = 0; i < 30 && ea.status() == EpisodeStatus::kRunning; ++i) {
      const int act = static_cast<int>(uniform_index(rng, 16));
      EXPECT_EQ(ea.step(act).reward, eb.step(act).reward);
    }
  }
}

TEST(EpisodeCsv, Columns) {
  NavEnv env(corridor(), EnvConfig{});
  env.step(0);
  std::ostringstream out;
  write_episode_csv(env.record(), out);
  std::istringstream in(out.str());
  std::string header, first, second;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_EQ(header, "step,x,y,heading,r_total,r_d,r_e,r_s_weighted,status");
  EXPECT_EQ(first.substr(0, 4), "0,2,");
  EXPECT_EQ(second.substr(0, 2), "1,");
}
