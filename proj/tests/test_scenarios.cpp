#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "socnav/errors.hpp"
#include "socnav/scenarios.hpp"

using namespace socnav;

namespace {

// Signed lateral offset and fraction along the start-goal segment.
std::pair<double, double> segment_coords(const Scenario& s, double x, double y) {
  const double dx = s.goal.x - s.start.x, dy = s.goal.y - s.start.y;
  const double len = std::hypot(dx, dy);
  const double rx = x - s.start.x, ry = y - s.start.y;
  return {(dx * ry - dy * rx) / len, (dx * rx + dy * ry) / (len * len)};
}

double angle_deg(double a) {
  double d = std::remainder(a, 360.0);
  return d;
}

double line_deg(const Scenario& s) {
  return std::atan2(s.goal.y - s.start.y, s.goal.x - s.start.x) * 180.0 / std::numbers::pi;
}

Scenario minimal() {
  Scenario s;
  s.id = "one";
  s.start = {1, 1};
  s.goal = {12, 1};
  s.humans = {{6, 1.2, 45}};
  return s;
}

}  // namespace

TEST(Validate, Invariants) {
  EXPECT_NO_THROW(validate_scenario(minimal()));
  Scenario s = minimal();
  s.humans[0].x = 15.5;
  EXPECT_THROW(validate_scenario(s), InvalidScenarioError);
  s = minimal();
  s.goal = s.start;
  EXPECT_THROW(validate_scenario(s), InvalidScenarioError);
  s = minimal();
  s.humans.push_back({6.1, 1.3, 0});
  EXPECT_THROW(validate_scenario(s), InvalidScenarioError);
  s = minimal();
  s.humans[0] = {1.3, 1.0, 0};
  try {
    validate_scenario(s);
    FAIL();
  } catch (const InvalidScenarioError& e) {
    EXPECT_EQ(e.scenario_id(), "one");
  }
}

TEST(SuiteIo, ParseMinimal) {
  const std::string text = R"({"suite": "t", "scenarios": [{"id": "a", "arena_side": 15,
    "start": [1, 1], "goal": [12, 1], "humans": [{"x": 6, "y": 1.2, "heading_deg": 45}],
    "tags": ["x"]}]})";
  const ScenarioSuite suite = parse_suite(text);
  ASSERT_EQ(suite.scenarios.size(), 1u);
  EXPECT_EQ(suite.scenarios[0].humans[0].heading_deg, 45.0);
  EXPECT_NEAR(suite.scenarios[0].human_poses()[0].heading(), std::numbers::pi / 4, 1e-15);
  EXPECT_EQ(suite.find("a").tags, std::vector<std::string>{"x"});
  EXPECT_THROW(suite.find("b"), InvalidScenarioError);
}

TEST(SuiteIo, HumanOutsideArena) {
  const std::string text = R"({"suite": "t", "scenarios": [{"id": "a", "arena_side": 15,
    "start": [1, 1], "goal": [12, 1], "humans": [{"x": 16, "y": 1.2, "heading_deg": 45}],
    "tags": []}]})";
  EXPECT_THROW(parse_suite(text), InvalidScenarioError);
}

TEST(SuiteIo, SchemaErrorsNameTheField) {
  const std::string text = R"({"suite": "t", "scenarios": [{"id": "a", "arena_side": 15,
    "start": [1, 1], "goal": [12, 1], "humans": [{"x": "six", "y": 1.2, "heading_deg": 45}]}]})";
  try {
    parse_suite(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "scenarios[0].humans[0].x");
  }
  EXPECT_THROW(parse_suite("{not json"), ParseError);
  EXPECT_THROW(parse_suite(R"({"suite": "t"})"), ParseError);
}

TEST(SuiteIo, RoundTripIsCanonical) {
  ScenarioSuite suite{"mixed", gen_single_human(25, 4)};
  const auto multi = gen_multi_human(25, 4);
  suite.scenarios.insert(suite.scenarios.end(), multi.begin(), multi.end());
  ASSERT_EQ(suite.scenarios.size(), 50u);
  const std::string text = dump_suite(suite);
  const ScenarioSuite back = parse_suite(text);
  EXPECT_EQ(back.scenarios, suite.scenarios);
  EXPECT_EQ(dump_suite(back), text);

  const auto path = std::filesystem::temp_directory_path() / "socnav_suite_rt.json";
  save_suite(suite, path);
  EXPECT_EQ(load_suite(path).scenarios, suite.scenarios);
  std::filesystem::remove(path);
}

TEST(Generators, SizesAndDeterminism) {
  EXPECT_EQ(gen_single_human(25, 1).size(), 25u);
  EXPECT_EQ(gen_multi_human(24, 1).size(), 24u);
  EXPECT_EQ(gen_hrsc_suite(1).size(), 42u);
  EXPECT_EQ(gen_hisc_cac_suite(1).size(), 21u);
  EXPECT_EQ(gen_single_human(5, 9), gen_single_human(5, 9));
  EXPECT_EQ(gen_multi_human(5, 9), gen_multi_human(5, 9));
  EXPECT_EQ(gen_hrsc_suite(9), gen_hrsc_suite(9));
  EXPECT_NE(gen_single_human(5, 9), gen_single_human(5, 10));
  EXPECT_THROW(gen_single_human(0, 1), std::invalid_argument);
}

TEST(Generators, HiscCacSeedsAreDistinct) {
  const auto suite = gen_hisc_cac_suite(3);
  for (std::size_t i = 0; i < suite.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) EXPECT_NE(suite[i].start, suite[j].start);
  }
}

// Construction rules for every generator, checked over 10,000 seeds.
TEST(GeneratorProperties, SingleHuman) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = gen_single_human(1, seed)[0];
    ASSERT_NO_THROW(validate_scenario(s));
    EXPECT_GE(s.straight_distance(), 10.0);
    ASSERT_EQ(s.humans.size(), 1u);
    const auto [lat, frac] = segment_coords(s, s.humans[0].x, s.humans[0].y);
    EXPECT_LE(std::abs(lat), 0.5 + 1e-9);
    EXPECT_GE(frac, 0.3 - 1e-9);
    EXPECT_LE(frac, 0.7 + 1e-9);
  }
}

TEST(GeneratorProperties, MultiHuman) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto s = gen_multi_human(1, seed)[0];
    ASSERT_NO_THROW(validate_scenario(s));
    ASSERT_EQ(s.humans.size(), 3u);
    double cx = 0, cy = 0;
    for (const auto& h : s.humans) {
      cx += h.x / 3;
      cy += h.y / 3;
    }
    for (int a = 0; a < 3; ++a) {
      const auto& h = s.humans[a];
      const double toward = std::atan2(cy - h.y, cx - h.x) * 180.0 / std::numbers::pi;
      EXPECT_LE(std::abs(angle_deg(h.heading_deg - toward)), 20.0);
      for (int b = 0; b < a; ++b) {
        const double d = std::hypot(h.x - s.humans[b].x, h.y - s.humans[b].y);
        EXPECT_GE(d, 1.0);
        EXPECT_LE(d, 2.0);
      }
    }
    const auto [lat, frac] = segment_coords(s, cx, cy);
    EXPECT_LE(std::abs(lat), 1.0);
    EXPECT_GE(frac, 0.0);
    EXPECT_LE(frac, 1.0);
  }
}

TEST(GeneratorProperties, HrscSuite) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto suite = gen_hrsc_suite(seed);
    int left = 0, right = 0;
    for (const auto& s : suite) {
      ASSERT_NO_THROW(validate_scenario(s));
      const auto [lat, frac] = segment_coords(s, s.humans[0].x, s.humans[0].y);
      EXPECT_LT(std::abs(lat), 0.1);
      const double rel = angle_deg(s.humans[0].heading_deg - line_deg(s));
      EXPECT_GT(std::abs(rel), 30.0);
      EXPECT_LT(std::abs(rel), 150.0);
      if (rel > 0) ++left; else ++right;
    }
    EXPECT_EQ(left, 21);
    EXPECT_EQ(right, 21);
  }
}

TEST(GeneratorProperties, HiscCacSuite) {
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const auto suite = gen_hisc_cac_suite(seed);
    ASSERT_EQ(suite.size(), 21u);
    for (const auto& s : suite) {
      ASSERT_NO_THROW(validate_scenario(s));
      const auto [lat, frac] = segment_coords(s, s.humans[0].x, s.humans[0].y);
      EXPECT_LE(std::abs(lat), 0.5 + 1e-9);
    }
  }
}
