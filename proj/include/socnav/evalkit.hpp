#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "socnav/a2c.hpp"
#include "socnav/env.hpp"
#include "socnav/scenarios.hpp"

namespace socnav {

// Per-coordinate discrete Gaussian smoothing. The sequence is extended past
// each end by point reflection through the endpoint, which keeps straight
// lines straight and pins both endpoints. kernel_sigma is in samples; values
// below 1e-12 return the input unchanged.
std::vector<Point> smooth_trajectory(std::span<const Point> positions, double kernel_sigma = 2.0,
                                     double truncate = 3.0);

// Largest perpendicular distance from any point to the infinite line through
// start and goal.
double compute_mld(std::span<const Point> positions, const Point& start, const Point& goal);

// True iff, at the point of closest approach (first one on ties), the vector
// human -> agent has a strictly positive component along the human's heading.
bool classify_front_pass(std::span<const Point> positions, const Pose& human);

struct MetricReport {
  std::string scenario_id;
  double mld_raw = 0.0;
  double mld_smoothed = 0.0;
  double path_length = 0.0;
  // Chord from the start to the final position; path_length can only exceed it.
  double straight_length = 0.0;
  double detour_ratio = 1.0;
  // Passed in front of at least one person.
  bool front_pass = false;
  // Sum of unweighted R_s over the raw trajectory.
  double field_integral = 0.0;
  EpisodeStatus status = EpisodeStatus::kRunning;
};

MetricReport compute_metrics(const EpisodeRecord& record, const Scenario& scenario,
                             const EnvConfig& env_config, double kernel_sigma = 2.0,
                             double truncate = 3.0);

// One (scenario, variant, seed) training-and-evaluation job.
struct CellSpec {
  std::size_t scenario_index = 0;
  std::string variant;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  EnvConfig env;
};

struct CellResult {
  std::string scenario_id;
  std::string variant;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  bool completed = false;
  std::string error;
  MetricReport metrics;
  EpisodeRecord greedy;
};

// Trains one policy per cell and rolls it out greedily. Exceptions inside a
// cell are recorded on that cell. Up to parallelism cells run at once; each
// cell is single-threaded and the output order follows the input order.
std::vector<CellResult> run_cells(std::span<const Scenario> suite, std::span<const CellSpec> cells,
                                  const TrainConfig& train_config, int parallelism = 1);

// Seed shared by every variant of a scenario, so variants differ only in the
// environment they were trained on.
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t scenario_index, int replicate);

struct GroupSummary {
  std::string variant;
  double sigma = 0.0;
  int cells = 0;
  int completed = 0;
  int succeeded = 0;
  double mean_mld_smoothed = 0.0;  // over succeeded cells
  double mean_mld_raw = 0.0;
  double min_mld = 0.0;
  double median_mld = 0.0;
  double max_mld = 0.0;
  int front_passes = 0;  // over succeeded cells
};

struct ExperimentReport {
  std::string name;
  std::vector<CellResult> cells;
  std::vector<GroupSummary> groups;

  const GroupSummary& group(const std::string& variant) const;
  double completion_rate() const;
};

// Groups are formed by variant label in order of first appearance.
std::vector<GroupSummary> summarize(std::span<const CellResult> cells);

struct ExperimentOptions {
  EnvConfig env;
  TrainConfig train;
  std::uint64_t seed = 0;
  int seeds = 1;
  int parallelism = 1;
};

std::vector<CellSpec> sigma_sweep_cells(std::size_t suite_size, std::span<const double> sigmas,
                                        const ExperimentOptions& options);
ExperimentReport run_sigma_sweep(std::span<const Scenario> suite, std::span<const double> sigmas,
                                 const ExperimentOptions& options);

// Variants "full" and "no_hrsc" on gen_hrsc_suite(options.seed) unless a
// suite is supplied.
ExperimentReport run_hrsc_ablation(const ExperimentOptions& options,
                                   std::span<const Scenario> suite = {});

// Variants "full", "no_hisc" and "no_cac" on gen_hisc_cac_suite(options.seed)
// unless a suite is supplied.
ExperimentReport run_hisc_cac_ablation(const ExperimentOptions& options,
                                       std::span<const Scenario> suite = {});

void write_cells_csv(const ExperimentReport& report, std::ostream& out);
void write_summary_csv(const ExperimentReport& report, std::ostream& out);
// Human-readable table for standard output.
void print_summary(const ExperimentReport& report, std::ostream& out);
// scenario_id,variant,seed,kind,index,x,y rows; kind is raw or smoothed.
void write_polylines_csv(const ExperimentReport& report, std::ostream& out,
                         double kernel_sigma = 2.0, double truncate = 3.0);

}  // namespace socnav
