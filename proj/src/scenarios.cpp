#include "socnav/scenarios.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "socnav/errors.hpp"
#include "socnav/rng.hpp"

namespace socnav {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kDegToRad = std::numbers::pi / 180.0;

bool inside(double x, double y, double side) {
  return x >= 0.0 && x <= side && y >= 0.0 && y <= side;
}

double require_number(const Json& node, const std::string& key, const std::string& path) {
  const std::string field = path + "." + key;
  if (!node.contains(key)) throw ParseError(field, "missing");
  const Json& v = node.at(key);
  if (!v.is_number()) throw ParseError(field, "expected a number");
  const double out = v.get<double>();
  if (!std::isfinite(out)) throw ParseError(field, "not finite");
  return out;
}

Point require_point(const Json& node, const std::string& key, const std::string& path) {
  const std::string field = path + "." + key;
  if (!node.contains(key)) throw ParseError(field, "missing");
  const Json& v = node.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError(field, "expected [x, y]");
  }
  return Point{v[0].get<double>(), v[1].get<double>()};
}

// Geometry of a start-goal pair, shared by all generators.
struct Route {
  Point start;
  Point goal;
  double ux = 1.0;  // unit direction start -> goal
  double uy = 0.0;
  double length = 0.0;

  Point at(double along, double lateral) const {
    return Point{start.x + ux * along - uy * lateral, start.y + uy * along + ux * lateral};
  }
  double direction() const { return std::atan2(uy, ux); }
};

Route draw_route(Rng& rng, double side, const SingleHumanOptions& o) {
  Route r;
  double angle = 0.0;
  if (o.direction_grid > 0) {
    const auto k = uniform_index(rng, static_cast<std::uint64_t>(o.direction_grid));
    angle = 2.0 * std::numbers::pi * static_cast<double>(k) / o.direction_grid;
  } else {
    angle = uniform(rng, -std::numbers::pi, std::numbers::pi);
  }
  r.ux = std::cos(angle);
  r.uy = std::sin(angle);
  r.length = uniform(rng, o.min_length, o.max_length);
  const double dx = r.ux * r.length;
  const double dy = r.uy * r.length;
  const double half_x = std::abs(dx) / 2.0;
  const double half_y = std::abs(dy) / 2.0;
  const double cx = uniform(rng, o.wall_margin + half_x, side - o.wall_margin - half_x);
  const double cy = uniform(rng, o.wall_margin + half_y, side - o.wall_margin - half_y);
  r.start = Point{cx - dx / 2.0, cy - dy / 2.0};
  r.goal = Point{cx + dx / 2.0, cy + dy / 2.0};
  return r;
}

double to_degrees_wrapped(double radians) {
  return normalize_angle(radians) / kDegToRad;
}

bool passes(const Scenario& s) {
  try {
    validate_scenario(s);
    return true;
  } catch (const InvalidScenarioError&) {
    return false;
  }
}

void check_options(const SingleHumanOptions& o, double side) {
  if (!(o.min_length > 0.0) || o.max_length < o.min_length ||
      o.max_length + 2.0 * o.wall_margin > side || o.lateral_bound < 0.0 ||
      o.along_min < 0.0 || o.along_max > 1.0 || o.along_max < o.along_min) {
    throw std::invalid_argument("scenario generator options are inconsistent");
  }
}

Scenario draw_single(Rng& rng, const SingleHumanOptions& o, const std::string& id) {
  constexpr double kSide = 15.0;
  for (;;) {
    const Route route = draw_route(rng, kSide, o);
    const double along = route.length * uniform(rng, o.along_min, o.along_max);
    const double lateral = uniform(rng, -o.lateral_bound, o.lateral_bound);
    const Point h = route.at(along, lateral);
    Scenario s;
    s.id = id;
    s.arena_side = kSide;
    s.start = route.start;
    s.goal = route.goal;
    s.humans.push_back(HumanSpec{h.x, h.y, uniform(rng, -180.0, 180.0)});
    s.tags = {"single"};
    if (passes(s)) return s;
  }
}

}  // namespace

Pose HumanSpec::pose() const { return Pose(x, y, heading_deg * kDegToRad); }

std::vector<Pose> Scenario::human_poses() const {
  std::vector<Pose> out;
  out.reserve(humans.size());
  for (const auto& h : humans) out.push_back(h.pose());
  return out;
}

double Scenario::straight_distance() const {
  return std::hypot(goal.x - start.x, goal.y - start.y);
}

const Scenario& ScenarioSuite::find(const std::string& id) const {
  for (const auto& s : scenarios) {
    if (s.id == id) return s;
  }
  throw InvalidScenarioError(id, "no such scenario in suite '" + name + "'");
}

void validate_scenario(const Scenario& s, double success_threshold) {
  if (!(s.arena_side > 0.0) || !std::isfinite(s.arena_side)) {
    throw InvalidScenarioError(s.id, "arena_side must be positive");
  }
  const double side = s.arena_side;
  if (!inside(s.start.x, s.start.y, side)) throw InvalidScenarioError(s.id, "start outside arena");
  if (!inside(s.goal.x, s.goal.y, side)) throw InvalidScenarioError(s.id, "goal outside arena");
  if (s.start == s.goal) throw InvalidScenarioError(s.id, "start equals goal");
  for (std::size_t i = 0; i < s.humans.size(); ++i) {
    const auto& h = s.humans[i];
    const std::string tag = "human " + std::to_string(i);
    if (!std::isfinite(h.heading_deg)) throw InvalidScenarioError(s.id, tag + " heading not finite");
    if (!inside(h.x, h.y, side)) throw InvalidScenarioError(s.id, tag + " outside arena");
    if (std::hypot(h.x - s.start.x, h.y - s.start.y) < success_threshold) {
      throw InvalidScenarioError(s.id, tag + " too close to start");
    }
    if (std::hypot(h.x - s.goal.x, h.y - s.goal.y) < success_threshold) {
      throw InvalidScenarioError(s.id, tag + " too close to goal");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (std::hypot(h.x - s.humans[j].x, h.y - s.humans[j].y) < kMinHumanSpacing) {
        throw InvalidScenarioError(s.id, tag + " closer than 0.3 m to human " + std::to_string(j));
      }
    }
  }
}

std::string dump_suite(const ScenarioSuite& suite) {
  Json root;
  root["suite"] = suite.name;
  Json list = Json::array();
  for (const auto& s : suite.scenarios) {
    Json node;
    node["id"] = s.id;
    node["arena_side"] = s.arena_side;
    node["start"] = Json::array({s.start.x, s.start.y});
    node["goal"] = Json::array({s.goal.x, s.goal.y});
    Json humans = Json::array();
    for (const auto& h : s.humans) {
      Json hn;
      hn["x"] = h.x;
      hn["y"] = h.y;
      hn["heading_deg"] = h.heading_deg;
      humans.push_back(std::move(hn));
    }
    node["humans"] = std::move(humans);
    node["tags"] = s.tags;
    list.push_back(std::move(node));
  }
  root["scenarios"] = std::move(list);
  return root.dump(2) + "\n";
}

ScenarioSuite parse_suite(const std::string& text, double success_threshold) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("<document>", e.what());
  }
  if (!root.is_object()) throw ParseError("<document>", "expected an object");
  if (!root.contains("suite") || !root["suite"].is_string()) {
    throw ParseError("suite", "missing or not a string");
  }
  if (!root.contains("scenarios") || !root["scenarios"].is_array()) {
    throw ParseError("scenarios", "missing or not a list");
  }
  ScenarioSuite suite;
  suite.name = root["suite"].get<std::string>();
  const Json& list = root["scenarios"];
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string path = "scenarios[" + std::to_string(i) + "]";
    const Json& node = list[i];
    if (!node.is_object()) throw ParseError(path, "expected an object");
    Scenario s;
    if (!node.contains("id") || !node["id"].is_string()) throw ParseError(path + ".id", "missing or not a string");
    s.id = node["id"].get<std::string>();
    s.arena_side = require_number(node, "arena_side", path);
    s.start = require_point(node, "start", path);
    s.goal = require_point(node, "goal", path);
    if (!node.contains("humans") || !node["humans"].is_array()) {
      throw ParseError(path + ".humans", "missing or not a list");
    }
    const Json& humans = node["humans"];
    for (std::size_t k = 0; k < humans.size(); ++k) {
      const std::string hpath = path + ".humans[" + std::to_string(k) + "]";
      if (!humans[k].is_object()) throw ParseError(hpath, "expected an object");
      s.humans.push_back(HumanSpec{require_number(humans[k], "x", hpath),
                                   require_number(humans[k], "y", hpath),
                                   require_number(humans[k], "heading_deg", hpath)});
    }
    if (node.contains("tags")) {
      const Json& tags = node["tags"];
      if (!tags.is_array()) throw ParseError(path + ".tags", "expected a list of strings");
      for (const auto& t : tags) {
        if (!t.is_string()) throw ParseError(path + ".tags", "expected a list of strings");
        s.tags.push_back(t.get<std::string>());
      }
    }
    validate_scenario(s, success_threshold);
    suite.scenarios.push_back(std::move(s));
  }
  return suite;
}

void save_suite(const ScenarioSuite& suite, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open scenario file for writing: " + path.string());
  out << dump_suite(suite);
  if (!out) throw Error("failed writing scenario file: " + path.string());
}

ScenarioSuite load_suite(const std::filesystem::path& path, double success_threshold) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open scenario file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str(), success_threshold);
}

std::vector<Scenario> gen_single_human(int count, std::uint64_t seed,
                                       const SingleHumanOptions& options) {
  if (count < 1) throw std::invalid_argument("gen_single_human: count must be >= 1");
  check_options(options, 15.0);
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    out.push_back(draw_single(rng, options, "single-" + std::to_string(i)));
  }
  return out;
}

std::vector<Scenario> gen_multi_human(int count, std::uint64_t seed,
                                      const SingleHumanOptions& options) {
  if (count < 1) throw std::invalid_argument("gen_multi_human: count must be >= 1");
  check_options(options, 15.0);
  constexpr double kSide = 15.0;
  constexpr double kHeadingJitterDeg = 15.0;
  std::vector<Scenario> out;
  for (int i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed ^ 0x6d756c7469ULL, static_cast<std::uint64_t>(i)));
    for (;;) {
      const Route route = draw_route(rng, kSide, options);
      const Point centroid = route.at(route.length * uniform(rng, 0.35, 0.65),
                                      uniform(rng, -0.8, 0.8));
      const double edge = uniform(rng, 1.2, 1.8);
      const double radius = edge / std::sqrt(3.0);
      const double spin = uniform(rng, -std::numbers::pi, std::numbers::pi);
      Scenario s;
      s.id = "multi-" + std::to_string(i);
      s.arena_side = kSide;
      s.start = route.start;
      s.goal = route.goal;
      s.tags = {"multi"};
      for (int k = 0; k < 3; ++k) {
        const double phi = spin + 2.0 * std::numbers::pi * k / 3.0 + uniform(rng, -0.08, 0.08);
        const double rk = radius * uniform(rng, 0.95, 1.05);
        const double hx = centroid.x + rk * std::cos(phi);
        const double hy = centroid.y + rk * std::sin(phi);
        const double toward = std::atan2(centroid.y - hy, centroid.x - hx);
        s.humans.push_back(HumanSpec{
            hx, hy, to_degrees_wrapped(toward) + uniform(rng, -kHeadingJitterDeg, kHeadingJitterDeg)});
      }
      bool spaced = true;
      for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < a; ++b) {
          const double d = std::hypot(s.humans[a].x - s.humans[b].x, s.humans[a].y - s.humans[b].y);
          spaced = spaced && d >= 1.0 && d <= 2.0;
        }
      }
      if (spaced && passes(s)) {
        out.push_back(std::move(s));
        break;
      }
    }
  }
  return out;
}

std::vector<Scenario> gen_hrsc_suite(std::uint64_t seed, const SingleHumanOptions& options) {
  check_options(options, 15.0);
  constexpr double kSide = 15.0;
  constexpr int kCount = 42;
  std::vector<Scenario> out;
  for (int i = 0; i < kCount; ++i) {
    Rng rng(mix_seed(seed ^ 0x68727363ULL, static_cast<std::uint64_t>(i)));
    const bool faces_left = i % 2 == 0;
    for (;;) {
      const Route route = draw_route(rng, kSide, options);
      const Point h = route.at(route.length * uniform(rng, 0.4, 0.6), uniform(rng, -0.05, 0.05));
      const double off_deg = uniform(rng, 30.0, 150.0);
      if (off_deg <= 30.0) continue;  // open interval
      const double off = off_deg * kDegToRad;
      const double heading = route.direction() + (faces_left ? off : -off);
      Scenario s;
      s.id = "hrsc-" + std::to_string(i);
      s.arena_side = kSide;
      s.start = route.start;
      s.goal = route.goal;
      s.humans.push_back(HumanSpec{h.x, h.y, to_degrees_wrapped(heading)});
      s.tags = {"hrsc", faces_left ? "faces:left" : "faces:right"};
      if (passes(s)) {
        out.push_back(std::move(s));
        break;
      }
    }
  }
  return out;
}

std::vector<Scenario> gen_hisc_cac_suite(std::uint64_t seed, const SingleHumanOptions& options) {
  auto out = gen_single_human(21, mix_seed(seed, 0x68697363ULL), options);
  for (auto& s : out) {
    s.id = "hisc-cac-" + s.id.substr(s.id.find('-') + 1);
    s.tags = {"single", "hisc-cac"};
  }
  return out;
}

}  // namespace socnav
