#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "socnav/slm.hpp"

namespace socnav {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// A static person. Headings are stored in degrees so files round-trip exactly.
struct HumanSpec {
  double x = 0.0;
  double y = 0.0;
  double heading_deg = 0.0;

  Pose pose() const;
  friend bool operator==(const HumanSpec&, const HumanSpec&) = default;
};

// One navigation task inside the square arena [0, arena_side]^2.
struct Scenario {
  std::string id;
  double arena_side = 15.0;
  Point start;
  Point goal;
  std::vector<HumanSpec> humans;
  std::vector<std::string> tags;

  std::vector<Pose> human_poses() const;
  double straight_distance() const;
  friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct ScenarioSuite {
  std::string name;
  std::vector<Scenario> scenarios;

  // Throws InvalidScenarioError when no scenario has the given id.
  const Scenario& find(const std::string& id) const;
};

constexpr double kMinHumanSpacing = 0.3;

// Start, goal and humans inside the arena, start != goal, humans at least
// kMinHumanSpacing apart and none within success_threshold of start or goal.
// Throws InvalidScenarioError carrying the scenario id.
void validate_scenario(const Scenario& scenario, double success_threshold = 0.45);

// Canonical JSON text with fixed field order; parse_suite(dump_suite(s)) == s
// and dump_suite(parse_suite(t)) == t for canonical t.
std::string dump_suite(const ScenarioSuite& suite);
// Throws ParseError naming the offending field, then validates every scenario.
ScenarioSuite parse_suite(const std::string& text, double success_threshold = 0.45);

void save_suite(const ScenarioSuite& suite, const std::filesystem::path& path);
ScenarioSuite load_suite(const std::filesystem::path& path, double success_threshold = 0.45);

struct SingleHumanOptions {
  double min_length = 10.0;
  double max_length = 12.0;
  // Lateral distance of the human from the start-goal segment.
  double lateral_bound = 0.5;
  double along_min = 0.3;
  double along_max = 0.7;
  // Start-goal directions are drawn from this many evenly spaced angles so the
  // direct route is one repeated action; 0 allows any direction.
  int direction_grid = 16;
  double wall_margin = 1.0;
};

// Each scenario i is drawn from its own stream mix_seed(seed, i).
std::vector<Scenario> gen_single_human(int count, std::uint64_t seed,
                                       const SingleHumanOptions& options = {});

// Three people in a conversational triangle near the start-goal segment.
std::vector<Scenario> gen_multi_human(int count, std::uint64_t seed,
                                      const SingleHumanOptions& options = {});

// 42 scenarios with the person on the route, facing 30-150 degrees off the
// route direction; exactly 21 face left of travel and 21 right.
std::vector<Scenario> gen_hrsc_suite(std::uint64_t seed,
                                     const SingleHumanOptions& options = {});

// 21 single-person scenarios under gen_single_human's rule.
std::vector<Scenario> gen_hisc_cac_suite(std::uint64_t seed,
                                         const SingleHumanOptions& options = {});

}  // namespace socnav
