#include "socnav/evalkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace socnav {

namespace {

// Point reflection through the nearest endpoint, applied until i is in range.
Point reflected(std::span<const Point> p, long i) {
  const long last = static_cast<long>(p.size()) - 1;
  if (i < 0) {
    const Point inner = reflected(p, -i);
    return Point{2.0 * p.front().x - inner.x, 2.0 * p.front().y - inner.y};
  }
  if (i > last) {
    const Point inner = reflected(p, 2 * last - i);
    return Point{2.0 * p.back().x - inner.x, 2.0 * p.back().y - inner.y};
  }
  return p[static_cast<std::size_t>(i)];
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string sigma_label(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sigma=%g", sigma);
  return buf;
}

CellResult run_cell(const Scenario& scenario, const CellSpec& spec, const TrainConfig& base) {
  CellResult out;
  out.scenario_id = scenario.id;
  out.variant = spec.variant;
  out.sigma = spec.sigma;
  out.seed = spec.seed;
  try {
    TrainConfig tc = base;
    tc.seed = spec.seed;
    const TrainResult trained = train(scenario, spec.env, tc);
    out.greedy = rollout_greedy(trained.nets.actor, scenario, spec.env);
    out.metrics = compute_metrics(out.greedy, scenario, spec.env);
    out.completed = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::vector<Point> smooth_trajectory(std::span<const Point> positions, double kernel_sigma,
                                     double truncate) {
  std::vector<Point> out(positions.begin(), positions.end());
  if (positions.size() < 2 || kernel_sigma < 1e-12) return out;
  const long radius = static_cast<long>(truncate * kernel_sigma + 0.5);
  if (radius < 1) return out;
  std::vector<double> weights(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (long k = -radius; k <= radius; ++k) {
    const double w = std::exp(-0.5 * static_cast<double>(k * k) / (kernel_sigma * kernel_sigma));
    weights[static_cast<std::size_t>(k + radius)] = w;
    norm += w;
  }
  for (double& w : weights) w /= norm;

  const long n = static_cast<long>(positions.size());
  for (long i = 1; i + 1 < n; ++i) {
    double x = 0.0;
    double y = 0.0;
    for (long k = -radius; k <= radius; ++k) {
      const Point q = reflected(positions, i + k);
      const double w = weights[static_cast<std::size_t>(k + radius)];
      x += w * q.x;
      y += w * q.y;
    }
    out[static_cast<std::size_t>(i)] = Point{x, y};
  }
  return out;
}

double compute_mld(std::span<const Point> positions, const Point& start, const Point& goal) {
  const double dx = goal.x - start.x;
  const double dy = goal.y - start.y;
  const double length = std::hypot(dx, dy);
  if (!(length > 0.0)) throw std::invalid_argument("compute_mld: start equals goal");
  double worst = 0.0;
  for (const Point& p : positions) {
    const double lateral = std::abs(dx * (p.y - start.y) - dy * (p.x - start.x)) / length;
    worst = std::max(worst, lateral);
  }
  return worst;
}

bool classify_front_pass(std::span<const Point> positions, const Pose& human) {
  if (positions.empty()) throw std::invalid_argument("classify_front_pass: empty trajectory");
  std::size_t closest = 0;
  double best = std::hypot(positions[0].x - human.x(), positions[0].y - human.y());
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const double d = std::hypot(positions[i].x - human.x(), positions[i].y - human.y());
    if (d < best) {
      best = d;
      closest = i;
    }
  }
  const double ahead = (positions[closest].x - human.x()) * std::cos(human.heading()) +
                       (positions[closest].y - human.y()) * std::sin(human.heading());
  return ahead > 0.0;
}

MetricReport compute_metrics(const EpisodeRecord& record, const Scenario& scenario,
                             const EnvConfig& env_config, double kernel_sigma, double truncate) {
  MetricReport m;
  m.scenario_id = scenario.id;
  m.status = record.status;
  const std::span<const Point> raw(record.positions);
  m.mld_raw = compute_mld(raw, scenario.start, scenario.goal);
  m.mld_smoothed =
      compute_mld(smooth_trajectory(raw, kernel_sigma, truncate), scenario.start, scenario.goal);
  for (std::size_t i = 1; i < raw.size(); ++i) {
    m.path_length += std::hypot(raw[i].x - raw[i - 1].x, raw[i].y - raw[i - 1].y);
  }
  m.straight_length = std::hypot(raw.back().x - raw.front().x, raw.back().y - raw.front().y);
  m.detour_ratio = m.straight_length > 0.0 ? m.path_length / m.straight_length : 1.0;

  const std::vector<Pose> humans = scenario.human_poses();
  for (const Pose& h : humans) m.front_pass = m.front_pass || classify_front_pass(raw, h);
  for (std::size_t i = 1; i < raw.size(); ++i) {
    const Pose agent(raw[i].x, raw[i].y, record.headings[i]);
    m.field_integral += reward_social(agent, humans, env_config);
  }
  return m;
}

std::vector<CellResult> run_cells(std::span<const Scenario> suite, std::span<const CellSpec> cells,
                                  const TrainConfig& train_config, int parallelism) {
  for (const auto& c : cells) {
    if (c.scenario_index >= suite.size()) throw std::out_of_range("cell scenario index");
  }
  std::vector<CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      results[i] = run_cell(suite[cells[i].scenario_index], cells[i], train_config);
    }
  };
  const int threads = std::max(1, std::min<int>(parallelism, static_cast<int>(cells.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return results;
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t scenario_index, int replicate) {
  return mix_seed(mix_seed(base_seed, scenario_index), static_cast<std::uint64_t>(replicate));
}

std::vector<GroupSummary> summarize(std::span<const CellResult> cells) {
  std::vector<GroupSummary> groups;
  std::vector<std::vector<double>> mlds;
  for (const auto& c : cells) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const GroupSummary& g) { return g.variant == c.variant; });
    if (it == groups.end()) {
      groups.push_back(GroupSummary{});
      groups.back().variant = c.variant;
      groups.back().sigma = c.sigma;
      mlds.emplace_back();
      it = groups.end() - 1;
    }
    const auto gi = static_cast<std::size_t>(it - groups.begin());
    GroupSummary& g = *it;
    ++g.cells;
    if (!c.completed) continue;
    ++g.completed;
    if (c.metrics.status != EpisodeStatus::kSuccess) continue;
    ++g.succeeded;
    g.mean_mld_smoothed += c.metrics.mld_smoothed;
    g.mean_mld_raw += c.metrics.mld_raw;
    g.front_passes += c.metrics.front_pass ? 1 : 0;
    mlds[gi].push_back(c.metrics.mld_smoothed);
  }
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    GroupSummary& g = groups[gi];
    auto& v = mlds[gi];
    if (v.empty()) continue;
    g.mean_mld_smoothed /= static_cast<double>(v.size());
    g.mean_mld_raw /= static_cast<double>(v.size());
    std::sort(v.begin(), v.end());
    g.min_mld = v.front();
    g.max_mld = v.back();
    const std::size_t mid = v.size() / 2;
    g.median_mld = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  }
  return groups;
}

const GroupSummary& ExperimentReport::group(const std::string& variant) const {
  for (const auto& g : groups) {
    if (g.variant == variant) return g;
  }
  throw std::out_of_range("no experiment group '" + variant + "'");
}

double ExperimentReport::completion_rate() const {
  if (cells.empty()) return 1.0;
  const auto done = std::count_if(cells.begin(), cells.end(),
                                  [](const CellResult& c) { return c.completed; });
  return static_cast<double>(done) / static_cast<double>(cells.size());
}

std::vector<CellSpec> sigma_sweep_cells(std::size_t suite_size, std::span<const double> sigmas,
                                        const ExperimentOptions& options) {
  std::vector<CellSpec> cells;
  for (double sigma : sigmas) {
    for (std::size_t i = 0; i < suite_size; ++i) {
      for (int r = 0; r < options.seeds; ++r) {
        CellSpec c{i, sigma_label(sigma), sigma, cell_seed(options.seed, i, r), options.env};
        c.env.sigma = sigma;
        cells.push_back(std::move(c));
      }
    }
  }
  return cells;
}

ExperimentReport run_sigma_sweep(std::span<const Scenario> suite, std::span<const double> sigmas,
                                 const ExperimentOptions& options) {
  if (suite.empty()) throw std::invalid_argument("sigma sweep needs a non-empty suite");
  const auto cells = sigma_sweep_cells(suite.size(), sigmas, options);
  ExperimentReport report;
  report.name = "sigma_sweep";
  report.cells = run_cells(suite, cells, options.train, options.parallelism);
  report.groups = summarize(report.cells);
  return report;
}

namespace {

ExperimentReport run_variants(const std::string& name, std::span<const Scenario> suite,
                              const std::vector<std::pair<std::string, EnvConfig>>& variants,
                              const ExperimentOptions& options) {
  std::vector<CellSpec> cells;
  for (const auto& [label, env] : variants) {
    for (std::size_t i = 0; i < suite.size(); ++i) {
      for (int r = 0; r < options.seeds; ++r) {
        cells.push_back(CellSpec{i, label, env.sigma, cell_seed(options.seed, i, r), env});
      }
    }
  }
  ExperimentReport report;
  report.name = name;
  report.cells = run_cells(suite, cells, options.train, options.parallelism);
  report.groups = summarize(report.cells);
  return report;
}

}  // namespace

ExperimentReport run_hrsc_ablation(const ExperimentOptions& options,
                                   std::span<const Scenario> suite) {
  std::vector<Scenario> generated;
  if (suite.empty()) {
    generated = gen_hrsc_suite(options.seed);
    suite = generated;
  }
  EnvConfig ablated = options.env;
  ablated.slm.enable_hrsc = false;
  return run_variants("hrsc_ablation", suite, {{"full", options.env}, {"no_hrsc", ablated}},
                      options);
}

ExperimentReport run_hisc_cac_ablation(const ExperimentOptions& options,
                                       std::span<const Scenario> suite) {
  std::vector<Scenario> generated;
  if (suite.empty()) {
    generated = gen_hisc_cac_suite(options.seed);
    suite = generated;
  }
  EnvConfig no_hisc = options.env;
  no_hisc.slm.enable_hisc = false;
  EnvConfig no_cac = options.env;
  no_cac.slm.enable_cac = false;
  return run_variants("hisc_cac_ablation", suite,
                      {{"full", options.env}, {"no_hisc", no_hisc}, {"no_cac", no_cac}}, options);
}

void write_cells_csv(const ExperimentReport& report, std::ostream& out) {
  out << "scenario_id,variant,sigma,seed,completed,status,steps,mld_raw,mld_smoothed,path_length,"
         "straight_length,detour_ratio,front_pass,field_integral,error\n";
  char buf[512];
  for (const auto& c : report.cells) {
    const MetricReport& m = c.metrics;
    std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%llu,%d,%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%.9g,",
                  c.scenario_id.c_str(), c.variant.c_str(), c.sigma,
                  static_cast<unsigned long long>(c.seed), c.completed ? 1 : 0,
                  c.completed ? to_string(m.status) : "error", c.greedy.length(), m.mld_raw,
                  m.mld_smoothed, m.path_length, m.straight_length, m.detour_ratio,
                  m.front_pass ? 1 : 0, m.field_integral);
    out << buf << csv_safe(c.error) << '\n';
  }
}

void write_summary_csv(const ExperimentReport& report, std::ostream& out) {
  out << "variant,sigma,cells,completed,succeeded,mean_mld_smoothed,mean_mld_raw,min_mld,"
         "median_mld,max_mld,front_passes\n";
  char buf[512];
  for (const auto& g : report.groups) {
    std::snprintf(buf, sizeof(buf), "%s,%.9g,%d,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%d\n",
                  g.variant.c_str(), g.sigma, g.cells, g.completed, g.succeeded,
                  g.mean_mld_smoothed, g.mean_mld_raw, g.min_mld, g.median_mld, g.max_mld,
                  g.front_passes);
    out << buf;
  }
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
  char buf[256];
  out << report.name << '\n';
  std::snprintf(buf, sizeof(buf), "%-12s %6s %6s %6s %10s %10s %8s\n", "variant", "cells", "done",
                "ok", "MLD(smth)", "MLD(raw)", "front");
  out << buf;
  for (const auto& g : report.groups) {
    std::snprintf(buf, sizeof(buf), "%-12s %6d %6d %6d %10.3f %10.3f %8d\n", g.variant.c_str(),
                  g.cells, g.completed, g.succeeded, g.mean_mld_smoothed, g.mean_mld_raw,
                  g.front_passes);
    out << buf;
  }
}

void write_polylines_csv(const ExperimentReport& report, std::ostream& out, double kernel_sigma,
                         double truncate) {
  out << "scenario_id,variant,seed,kind,index,x,y\n";
  char buf[256];
  for (const auto& c : report.cells) {
    if (!c.completed) continue;
    const auto smooth = smooth_trajectory(c.greedy.positions, kernel_sigma, truncate);
    for (int pass = 0; pass < 2; ++pass) {
      const auto& pts = pass == 0 ? c.greedy.positions : smooth;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%llu,%s,%zu,%.9g,%.9g\n", c.scenario_id.c_str(),
                      c.variant.c_str(), static_cast<unsigned long long>(c.seed),
                      pass == 0 ? "raw" : "smoothed", i, pts[i].x, pts[i].y);
        out << buf;
      }
    }
  }
}

}  // namespace socnav
