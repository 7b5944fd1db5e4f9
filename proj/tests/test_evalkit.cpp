#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "socnav/evalkit.hpp"

using namespace socnav;
constexpr double kPi = std::numbers::pi;

namespace {

std::vector<Point> straight(int n, double dx = 0.45, double dy = 0.0) {
  std::vector<Point> p;
  for (int i = 0; i < n; ++i) p.push_back({1.0 + i * dx, 2.0 + i * dy});
  return p;
}

Scenario corridor() {
  Scenario s;
  s.id = "c";
  s.start = {2.0, 7.5};
  s.goal = {13.0, 7.5};
  s.humans = {{7.0, 7.7, 60.0}};
  return s;
}

TrainConfig tiny_train() {
  TrainConfig tc;
  tc.hidden = {8};
  tc.total_env_steps = 100;
  return tc;
}

}  // namespace

TEST(Smooth, StraightLineUnchanged) {
  const auto p = straight(30, 0.3, 0.2);
  const auto s = smooth_trajectory(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_NEAR(s[i].x, p[i].x, 1e-9);
    EXPECT_NEAR(s[i].y, p[i].y, 1e-9);
  }
}

TEST(Smooth, ZeroSigmaIsIdentity) {
  std::vector<Point> p{{0, 0}, {1, 3}, {2, -1}, {5, 5}};
  const auto s = smooth_trajectory(p, 0.0);
  EXPECT_EQ(s, p);
}

TEST(Smooth, ZigZagContracts) {
  std::vector<Point> p;
  for (int i = 0; i < 25; ++i) p.push_back({i * 0.4, (i % 2 ? 0.3 : -0.3)});
  p.front().y = 0.0;
  p.back().y = 0.0;
  const Point a{0, 0}, b{24 * 0.4, 0};
  EXPECT_LT(compute_mld(smooth_trajectory(p), a, b), compute_mld(p, a, b));
}

TEST(Smooth, EndpointsPinned) {
  std::vector<Point> p{{0, 0}, {1, 2}, {2, 1}, {3, 4}, {4, 0}};
  const auto s = smooth_trajectory(p);
  EXPECT_EQ(s.front(), p.front());
  EXPECT_EQ(s.back(), p.back());
}

TEST(Mld, Examples) {
  const Point a{0, 0}, b{10, 0};
  EXPECT_EQ(compute_mld(straight(5, 1.0, 0.0), {1, 2}, {5, 2}), 0.0);
  const std::vector<Point> one{{4.0, 1.3}};
  EXPECT_NEAR(compute_mld(one, a, b), 1.3, 1e-15);
  std::vector<Point> arc;
  for (int i = 0; i <= 180; ++i) {
    const double t = kPi * i / 180.0;
    arc.push_back({5.0 - 2.0 * std::cos(t), 2.0 * std::sin(t)});
  }
  EXPECT_NEAR(compute_mld(arc, a, b), 2.0, 1e-12);
  EXPECT_THROW(compute_mld(one, a, a), std::invalid_argument);
}

TEST(Mld, UsesInfiniteLine) {
  const std::vector<Point> beyond{{15.0, 0.5}};
  EXPECT_NEAR(compute_mld(beyond, {0, 0}, {10, 0}), 0.5, 1e-15);
}

TEST(FrontPass, Examples) {
  const Pose human(5.0, 0.0, kPi / 2);  // faces +y
  std::vector<Point> ahead, behind, lateral;
  for (int i = 0; i <= 20; ++i) {
    ahead.push_back({i * 0.5, 1.0});
    behind.push_back({i * 0.5, -1.0});
    lateral.push_back({i * 0.5, 0.0});
  }
  EXPECT_TRUE(classify_front_pass(ahead, human));
  EXPECT_FALSE(classify_front_pass(behind, human));
  // The closest point coincides with the human: dot product exactly 0.
  EXPECT_FALSE(classify_front_pass(lateral, human));
}

TEST(FrontPass, RigidMotionInvariance) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Point> path;
    Point q{uniform(rng, 2, 4), uniform(rng, 2, 4)};
    for (int i = 0; i < 25; ++i) {
      const double h = uniform(rng, -0.6, 0.6);
      q = {q.x + 0.45 * std::cos(h), q.y + 0.45 * std::sin(h)};
      path.push_back(q);
    }
    const Pose human(uniform(rng, 4, 9), uniform(rng, 2, 5), uniform(rng, -kPi, kPi));
    const double rot = uniform(rng, -kPi, kPi), tx = uniform(rng, -3, 3), ty = uniform(rng, -3, 3);
    auto move = [&](double x, double y) {
      return Point{std::cos(rot) * x - std::sin(rot) * y + tx, std::sin(rot) * x + std::cos(rot) * y + ty};
    };
    std::vector<Point> moved;
    for (const auto& p : path) moved.push_back(move(p.x, p.y));
    const Point hm = move(human.x(), human.y());
    const Pose human_moved(hm.x, hm.y, human.heading() + rot);
    EXPECT_EQ(classify_front_pass(path, human), classify_front_pass(moved, human_moved));
  }
}

TEST(EvalProperties, SmoothingNeverWidensMldOnRandomWalks) {
  Rng rng(4);
  const Point a{2, 7.5}, b{13, 7.5};
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<Point> path{a};
    for (int i = 0; i < 30; ++i) {
      const double h = uniform(rng, -1.2, 1.2);
      path.push_back({path.back().x + 0.45 * std::cos(h), path.back().y + 0.45 * std::sin(h)});
    }
    EXPECT_LE(compute_mld(smooth_trajectory(path), a, b), compute_mld(path, a, b) + 1e-9);
  }
}

TEST(Metrics, FieldIntegralMatchesEnvLog) {
  const Scenario s = corridor();
  EnvConfig c;
  NavEnv env(s, c);
  Rng rng(5);
  double logged = 0.0;
  while (env.status() == EpisodeStatus::kRunning) {
    const int a = uniform01(rng) < 0.7 ? 0 : static_cast<int>(uniform_index(rng, 16));
    logged += env.step(a).breakdown.social_raw;
  }
  const MetricReport m = compute_metrics(env.record(), s, c);
  EXPECT_EQ(m.field_integral, logged);
  EXPECT_GE(m.mld_raw, 0.0);
  EXPECT_EQ(m.status, env.status());
}

TEST(Metrics, StraightSuccess) {
  Scenario s = corridor();
  s.humans[0].y = 9.0;
  NavEnv env(s, EnvConfig{});
  while (env.status() == EpisodeStatus::kRunning) env.step(0);
  const MetricReport m = compute_metrics(env.record(), s, EnvConfig{});
  EXPECT_EQ(m.status, EpisodeStatus::kSuccess);
  EXPECT_NEAR(m.mld_raw, 0.0, 1e-12);
  EXPECT_NEAR(m.detour_ratio, 1.0, 1e-9);
  EXPECT_FALSE(m.front_pass);  // the person faces away from the path
}

TEST(Cells, SeedsSharedAcrossVariants) {
  EXPECT_EQ(cell_seed(5, 3, 0), cell_seed(5, 3, 0));
  EXPECT_NE(cell_seed(5, 3, 0), cell_seed(5, 4, 0));
  EXPECT_NE(cell_seed(5, 3, 0), cell_seed(5, 3, 1));
  ExperimentOptions o;
  o.seeds = 2;
  const std::vector<double> sigmas{0.0, 1.0};
  const auto cells = sigma_sweep_cells(3, sigmas, o);
  ASSERT_EQ(cells.size(), 12u);
  for (const auto& c : cells) {
    EXPECT_EQ(c.env.sigma, c.sigma);
    EXPECT_EQ(c.variant, c.sigma == 0.0 ? "sigma=0" : "sigma=1");
  }
}

TEST(Cells, FailuresAreMarkedNotThrown) {
  std::vector<Scenario> suite{corridor()};
  std::vector<CellSpec> cells(2);
  cells[0].variant = "ok";
  cells[1].variant = "bad";
  cells[1].env.arena = 20.0;  // scenario arena mismatch
  const auto out = run_cells(suite, cells, tiny_train(), 2);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(out[0].completed);
  EXPECT_FALSE(out[1].completed);
  EXPECT_FALSE(out[1].error.empty());
  ExperimentReport r{"t", out, summarize(out)};
  EXPECT_DOUBLE_EQ(r.completion_rate(), 0.5);
}

TEST(Cells, ParallelMatchesSerial) {
  const auto suite = gen_single_human(3, 8);
  ExperimentOptions o;
  o.train = tiny_train();
  const std::vector<double> sigmas{0.0, 0.5};
  o.parallelism = 1;
  const auto serial = run_sigma_sweep(suite, sigmas, o);
  o.parallelism = 3;
  const auto parallel = run_sigma_sweep(suite, sigmas, o);
  std::ostringstream a, b;
  write_cells_csv(serial, a);
  write_cells_csv(parallel, b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Experiments, ReportShapes) {
  ExperimentOptions o;
  o.train = tiny_train();
  const auto hrsc_suite = gen_hrsc_suite(1);
  const std::vector<Scenario> few(hrsc_suite.begin(), hrsc_suite.begin() + 2);
  const auto hrsc = run_hrsc_ablation(o, few);
  EXPECT_EQ(hrsc.cells.size(), 4u);
  EXPECT_NO_THROW(hrsc.group("full"));
  EXPECT_NO_THROW(hrsc.group("no_hrsc"));
  const auto hisc = run_hisc_cac_ablation(o, few);
  EXPECT_EQ(hisc.cells.size(), 6u);
  EXPECT_EQ(hisc.groups.size(), 3u);
  std::ostringstream out;
  write_summary_csv(hisc, out);
  write_polylines_csv(hisc, out);
  print_summary(hisc, out);
  EXPECT_FALSE(out.str().empty());
}

TEST(Summary, MeansOverSucceededCells) {
  std::vector<CellResult> cells(3);
  for (auto& c : cells) {
    c.variant = "v";
    c.completed = true;
    c.metrics.status = EpisodeStatus::kSuccess;
  }
  cells[0].metrics.mld_smoothed = 1.0;
  cells[1].metrics.mld_smoothed = 3.0;
  cells[2].metrics.mld_smoothed = 100.0;
  cells[2].metrics.status = EpisodeStatus::kStepLimit;
  cells[1].metrics.front_pass = true;
  const auto g = summarize(cells);
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0].succeeded, 2);
  EXPECT_DOUBLE_EQ(g[0].mean_mld_smoothed, 2.0);
  EXPECT_EQ(g[0].front_passes, 1);
}
