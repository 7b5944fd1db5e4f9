// socnav: command-line entry point for scenario generation, training,
// evaluation rollouts, experiment sweeps and field dumps.
//
// Exit codes: 0 success, 1 other error, 2 usage / bad input, 3 training
// divergence, 4 checkpoint problem, 5 too many failed sweep cells.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "socnav/a2c.hpp"
#include "socnav/errors.hpp"
#include "socnav/evalkit.hpp"
#include "socnav/scenarios.hpp"
#include "socnav/slm.hpp"

namespace fs = std::filesystem;
using socnav::cli::Json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kOutRootVar = "SOCNAV_OUT_ROOT";

enum ExitCode { kOk = 0, kFailure = 1, kUsage = 2, kDivergence = 3, kCheckpoint = 4, kSweep = 5 };

// Everything a subcommand needs; also what the manifest records.
struct RunContext {
  std::string subcommand;
  Json args = Json::object();
  std::uint64_t seed = 0;
  socnav::EnvConfig env;
  socnav::TrainConfig train;
  fs::path out_dir;
  std::string out_root_env;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw socnav::Error("cannot write " + path.string());
  out << text;
  if (!out) throw socnav::Error("failed writing " + path.string());
}

template <typename Fn>
void write_file(const fs::path& path, Fn&& fill) {
  std::ostringstream buf;
  fill(buf);
  write_text(path, buf.str());
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw socnav::Error("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw socnav::ParseError(path.string(), e.what());
  }
}

Json manifest_json(const RunContext& ctx, const std::string& started, const std::string& finished,
                   int exit_code) {
  Json m;
  m["tool"] = "socnav";
  m["version"] = kVersion;
  m["subcommand"] = ctx.subcommand;
  m["args"] = ctx.args;
  m["seed"] = ctx.seed;
  m["out_dir"] = ctx.out_dir.string();
  m["out_root_env"] = ctx.out_root_env.empty() ? Json(nullptr) : Json(ctx.out_root_env);
  m["config"] = Json{{"env", socnav::cli::to_json(ctx.env)},
                     {"train", socnav::cli::to_json(ctx.train)}};
  m["started_at"] = started;
  m["finished_at"] = finished;
  m["exit_code"] = exit_code;
  return m;
}

fs::path resolve_output(const RunContext& ctx, const std::string& key, const std::string& fallback) {
  if (ctx.args.contains(key) && !ctx.args[key].get<std::string>().empty()) {
    return ctx.args[key].get<std::string>();
  }
  return ctx.out_dir / fallback;
}

socnav::ScenarioSuite load_input_suite(const RunContext& ctx) {
  return socnav::load_suite(ctx.args.at("scenarios").get<std::string>(), ctx.env.success_threshold);
}

int cmd_gen(const RunContext& ctx) {
  const std::string suite = ctx.args.at("suite").get<std::string>();
  const int count = ctx.args.at("count").get<int>();
  socnav::ScenarioSuite out;
  out.name = suite;
  if (suite == "single") {
    out.scenarios = socnav::gen_single_human(count, ctx.seed);
  } else if (suite == "multi") {
    out.scenarios = socnav::gen_multi_human(count, ctx.seed);
  } else if (suite == "hrsc") {
    out.scenarios = socnav::gen_hrsc_suite(ctx.seed);
  } else {
    out.scenarios = socnav::gen_hisc_cac_suite(ctx.seed);
  }
  const fs::path path = resolve_output(ctx, "out", suite + ".json");
  socnav::save_suite(out, path);
  std::cout << "wrote " << out.scenarios.size() << " scenarios to " << path.string() << '\n';
  return kOk;
}

int cmd_train(const RunContext& ctx) {
  const auto suite = load_input_suite(ctx);
  const auto& scenario = suite.find(ctx.args.at("scenario_id").get<std::string>());
  socnav::TrainConfig tc = ctx.train;
  tc.seed = ctx.seed;
  std::ostream* progress = tc.log_interval > 0 ? &std::cout : nullptr;
  const socnav::TrainResult result = socnav::train(scenario, ctx.env, tc, progress);
  socnav::save_policy(result.nets.actor, ctx.env, ctx.out_dir / "policy.ckpt");
  write_file(ctx.out_dir / "episodes.csv",
             [&](std::ostream& o) { socnav::write_episode_log_csv(result.log, o); });
  write_file(ctx.out_dir / "updates.csv",
             [&](std::ostream& o) { socnav::write_update_log_csv(result.log, o); });
  std::size_t successes = 0;
  for (const auto& e : result.log.episodes) successes += e.status == socnav::EpisodeStatus::kSuccess;
  std::cout << "trained " << scenario.id << ": " << result.env_steps << " env steps, "
            << result.log.episodes.size() << " episodes, " << successes << " successful\n"
            << "checkpoint " << (ctx.out_dir / "policy.ckpt").string() << '\n';
  return kOk;
}

int cmd_rollout(const RunContext& ctx) {
  const auto suite = load_input_suite(ctx);
  const auto& scenario = suite.find(ctx.args.at("scenario_id").get<std::string>());
  const auto policy = socnav::load_policy(ctx.args.at("checkpoint").get<std::string>());
  const socnav::EpisodeRecord record = socnav::rollout_greedy(policy.actor, scenario, ctx.env);
  const double kernel = ctx.args.at("kernel_sigma").get<double>();
  const double truncate = ctx.args.at("truncate").get<double>();
  const auto metrics = socnav::compute_metrics(record, scenario, ctx.env, kernel, truncate);

  write_file(ctx.out_dir / "trajectory.csv",
             [&](std::ostream& o) { socnav::write_episode_csv(record, o); });
  if (ctx.args.at("smooth").get<bool>()) {
    const auto smooth = socnav::smooth_trajectory(record.positions, kernel, truncate);
    write_file(ctx.out_dir / "smoothed.csv", [&](std::ostream& o) {
      o << "index,x,y\n";
      char buf[96];
      for (std::size_t i = 0; i < smooth.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g\n", i, smooth[i].x, smooth[i].y);
        o << buf;
      }
    });
  }
  write_file(ctx.out_dir / "metrics.csv", [&](std::ostream& o) {
    o << "scenario_id,status,steps,mld_raw,mld_smoothed,path_length,straight_length,"
         "detour_ratio,front_pass,field_integral\n";
    char buf[384];
    std::snprintf(buf, sizeof(buf), "%s,%s,%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%.9g\n",
                  metrics.scenario_id.c_str(), socnav::to_string(metrics.status), record.length(),
                  metrics.mld_raw, metrics.mld_smoothed, metrics.path_length,
                  metrics.straight_length, metrics.detour_ratio, metrics.front_pass ? 1 : 0,
                  metrics.field_integral);
    o << buf;
  });
  std::cout << scenario.id << ": " << socnav::to_string(record.status) << " in " << record.length()
            << " steps, MLD " << metrics.mld_smoothed << " m (smoothed), " << metrics.mld_raw
            << " m (raw)\n";
  return kOk;
}

socnav::ExperimentOptions experiment_options(const RunContext& ctx) {
  socnav::ExperimentOptions o;
  o.env = ctx.env;
  o.train = ctx.train;
  o.seed = ctx.seed;
  o.seeds = ctx.args.at("seeds").get<int>();
  o.parallelism = ctx.args.at("parallelism").get<int>();
  return o;
}

int finish_experiment(const RunContext& ctx, const socnav::ExperimentReport& report) {
  write_file(ctx.out_dir / "cells.csv", [&](std::ostream& o) { socnav::write_cells_csv(report, o); });
  write_file(ctx.out_dir / "summary.csv",
             [&](std::ostream& o) { socnav::write_summary_csv(report, o); });
  write_file(ctx.out_dir / "polylines.csv",
             [&](std::ostream& o) { socnav::write_polylines_csv(report, o); });
  socnav::print_summary(report, std::cout);
  const double rate = report.completion_rate();
  if (rate < 0.9) {
    std::cerr << "only " << rate * 100.0 << "% of cells completed\n";
    return kSweep;
  }
  return kOk;
}

std::vector<socnav::Scenario> experiment_suite(const RunContext& ctx,
                                               std::vector<socnav::Scenario> fallback) {
  const std::string path = ctx.args.at("scenarios").get<std::string>();
  if (path.empty()) return fallback;
  return load_input_suite(ctx).scenarios;
}

int cmd_sweep(const RunContext& ctx) {
  const auto suite = experiment_suite(ctx, socnav::gen_hisc_cac_suite(ctx.seed));
  const auto sigmas = ctx.args.at("sigmas").get<std::vector<double>>();
  const auto report = socnav::run_sigma_sweep(suite, sigmas, experiment_options(ctx));
  return finish_experiment(ctx, report);
}

int cmd_ablate(const RunContext& ctx) {
  const std::string kind = ctx.args.at("kind").get<std::string>();
  const auto options = experiment_options(ctx);
  if (kind == "hrsc") {
    const auto suite = experiment_suite(ctx, socnav::gen_hrsc_suite(ctx.seed));
    const auto report = socnav::run_hrsc_ablation(options, suite);
    const int code = finish_experiment(ctx, report);
    const auto& full = report.group("full");
    const auto& ablated = report.group("no_hrsc");
    std::cout << "front passes: full " << full.front_passes << '/' << full.succeeded
              << ", without HRSC " << ablated.front_passes << '/' << ablated.succeeded << '\n';
    return code;
  }
  const auto suite = experiment_suite(ctx, socnav::gen_hisc_cac_suite(ctx.seed));
  return finish_experiment(ctx, socnav::run_hisc_cac_ablation(options, suite));
}

int cmd_field_dump(const RunContext& ctx) {
  const auto suite = load_input_suite(ctx);
  const auto& scenario = suite.find(ctx.args.at("scenario_id").get<std::string>());
  const std::string probe_text = ctx.args.at("probe").get<std::string>();
  socnav::ProbeHeading probe = socnav::TowardNearest{};
  if (probe_text.starts_with("fixed:")) {
    probe = socnav::FixedHeading{std::stod(probe_text.substr(6)) * std::numbers::pi / 180.0};
  }
  const double side = scenario.arena_side;
  const auto grid = socnav::rasterize_field(scenario.human_poses(), probe, {0.0, 0.0, side, side},
                                            ctx.args.at("resolution").get<double>(), ctx.env.slm);
  const fs::path path = resolve_output(ctx, "out", "field.csv");
  write_file(path, [&](std::ostream& o) { socnav::write_grid_csv(grid, o); });
  std::cout << "wrote " << grid.ncols << 'x' << grid.nrows << " grid to " << path.string() << '\n';
  return kOk;
}

int dispatch(const RunContext& ctx) {
  if (ctx.subcommand == "gen") return cmd_gen(ctx);
  if (ctx.subcommand == "train") return cmd_train(ctx);
  if (ctx.subcommand == "rollout") return cmd_rollout(ctx);
  if (ctx.subcommand == "sweep") return cmd_sweep(ctx);
  if (ctx.subcommand == "ablate") return cmd_ablate(ctx);
  if (ctx.subcommand == "field-dump") return cmd_field_dump(ctx);
  throw socnav::ParseError("subcommand", "unknown subcommand '" + ctx.subcommand + "'");
}

// Runs the subcommand, maps errors to exit codes and writes the manifest.
int execute(RunContext ctx) {
  const std::string started = utc_now();
  int code = kOk;
  try {
    fs::create_directories(ctx.out_dir);
    code = dispatch(ctx);
  } catch (const socnav::TrainingDivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (!e.dump().empty()) {
      const fs::path dump = ctx.out_dir / "divergence_dump.csv";
      try {
        write_text(dump, e.dump());
        std::cerr << "batch dumped to " << dump.string() << '\n';
      } catch (const std::exception& io) {
        std::cerr << "could not write dump: " << io.what() << '\n';
      }
    }
    code = kDivergence;
  } catch (const socnav::CheckpointFormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kCheckpoint;
  } catch (const socnav::DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kCheckpoint;
  } catch (const socnav::InvalidScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kUsage;
  } catch (const socnav::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    code = kFailure;
  }
  try {
    fs::create_directories(ctx.out_dir);
    write_text(ctx.out_dir / "manifest.json",
               manifest_json(ctx, started, utc_now(), code).dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "error: could not write manifest: " << e.what() << '\n';
    if (code == kOk) code = kFailure;
  }
  return code;
}

RunContext context_from_manifest(const fs::path& path, const std::string& out_dir) {
  const Json m = read_json_file(path);
  RunContext ctx;
  try {
    ctx.subcommand = m.at("subcommand").get<std::string>();
    ctx.args = m.at("args");
    ctx.seed = m.at("seed").get<std::uint64_t>();
    socnav::cli::apply_json(m.at("config").at("env"), ctx.env);
    socnav::cli::apply_json(m.at("config").at("train"), ctx.train);
    ctx.out_dir = out_dir.empty() ? fs::path(m.at("out_dir").get<std::string>()) : fs::path(out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw socnav::ParseError(path.string(), e.what());
  }
  if (const char* root = std::getenv(kOutRootVar)) ctx.out_root_env = root;
  return ctx;
}

// Flag name (dashes) -> config key (underscores) for every config field.
struct ConfigFlag {
  std::string section;
  std::string key;
  std::string value;
};

std::string dashed(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

Json parse_flag_value(const ConfigFlag& f) {
  if (f.key == "hidden") {
    Json arr = Json::array();
    std::stringstream ss(f.value);
    std::string item;
    while (std::getline(ss, item, ',')) arr.push_back(std::stoi(item));
    return arr;
  }
  try {
    return Json::parse(f.value);
  } catch (const nlohmann::json::exception&) {
    throw socnav::ParseError("--" + dashed(f.key), "cannot parse value '" + f.value + "'");
  }
}

std::string absolute_or_empty(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).lexically_normal().string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socnav: socially-aware navigation lab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  std::uint64_t seed = 0;
  std::string out_dir;
  std::string config_path;
  app.add_option("--seed", seed, "Seed for every random choice in the run");
  app.add_option("--out-dir", out_dir, "Output directory (default $SOCNAV_OUT_ROOT/<subcommand>)");
  app.add_option("--config", config_path, "JSON overrides {env:{...},train:{...}} or a manifest");

  std::vector<ConfigFlag> flags;
  const Json env_defaults = socnav::cli::to_json(socnav::EnvConfig{});
  const Json train_defaults = socnav::cli::to_json(socnav::TrainConfig{});
  for (const auto& [key, _] : env_defaults.items()) flags.push_back({"env", key, ""});
  for (const auto& [key, _] : train_defaults.items()) flags.push_back({"train", key, ""});
  std::vector<CLI::Option*> flag_options;
  for (auto& f : flags) {
    flag_options.push_back(app.add_option("--" + dashed(f.key), f.value, f.section + "." + f.key)
                               ->group("Config overrides"));
  }

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a scenario suite");
  std::string gen_suite;
  int gen_count = 25;
  std::string gen_out;
  gen->add_option("suite", gen_suite, "single | multi | hrsc | hisc-cac")
      ->required()
      ->check(CLI::IsMember({"single", "multi", "hrsc", "hisc-cac"}));
  gen->add_option("--count", gen_count, "Scenario count for single/multi suites");
  gen->add_option("--out", gen_out, "Output scenario file");

  // train
  auto* trn = app.add_subcommand("train", "Train one policy on one scenario");
  std::string scenarios_path;
  std::string scenario_id;
  trn->add_option("--scenarios", scenarios_path, "Scenario file")->required();
  trn->add_option("--scenario-id", scenario_id, "Scenario id")->required();

  // rollout
  auto* rol = app.add_subcommand("rollout", "Greedy rollout of a trained policy");
  std::string checkpoint;
  bool smooth = false;
  double kernel_sigma = 2.0;
  double truncate = 3.0;
  rol->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required();
  rol->add_option("--scenarios", scenarios_path, "Scenario file")->required();
  rol->add_option("--scenario-id", scenario_id, "Scenario id")->required();
  rol->add_flag("--smooth", smooth, "Also write the smoothed polyline");
  rol->add_option("--kernel-sigma", kernel_sigma, "Smoothing kernel width in samples");
  rol->add_option("--truncate", truncate, "Kernel truncation in multiples of kernel sigma");

  // sweep / ablate
  std::string sigmas_text = "0,0.5,1,2";
  int seeds = 1;
  int parallelism = 1;
  auto* swp = app.add_subcommand("sweep", "Social-weight sweep over a suite");
  swp->add_option("--scenarios", scenarios_path, "Scenario file (default: generated 21-scenario suite)");
  swp->add_option("--sigmas", sigmas_text, "Comma-separated sigma values");
  swp->add_option("--seeds", seeds, "Training seeds per cell")->check(CLI::PositiveNumber);
  swp->add_option("--parallelism", parallelism, "Concurrent cells")->check(CLI::PositiveNumber);

  auto* abl = app.add_subcommand("ablate", "Social-component ablation");
  std::string ablate_kind;
  abl->add_option("kind", ablate_kind, "hrsc | hisc-cac")
      ->required()
      ->check(CLI::IsMember({"hrsc", "hisc-cac"}));
  abl->add_option("--scenarios", scenarios_path, "Scenario file (default: generated suite)");
  abl->add_option("--seeds", seeds, "Training seeds per cell")->check(CLI::PositiveNumber);
  abl->add_option("--parallelism", parallelism, "Concurrent cells")->check(CLI::PositiveNumber);

  // field-dump
  auto* fld = app.add_subcommand("field-dump", "Rasterize the social field of a scenario");
  double resolution = 0.15;
  std::string probe = "toward_nearest";
  std::string field_out;
  fld->add_option("--scenarios", scenarios_path, "Scenario file")->required();
  fld->add_option("--scenario-id", scenario_id, "Scenario id")->required();
  fld->add_option("--resolution", resolution, "Cell size in meters")->check(CLI::PositiveNumber);
  fld->add_option("--probe", probe, "toward_nearest | fixed:<degrees>");
  fld->add_option("--out", field_out, "Output CSV");

  // replay
  auto* rep = app.add_subcommand("replay", "Re-run a recorded manifest");
  std::string manifest_path;
  rep->add_option("manifest", manifest_path, "manifest.json of an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const char* root_env = std::getenv(kOutRootVar);
  try {
    if (rep->parsed()) return execute(context_from_manifest(manifest_path, out_dir));

    RunContext ctx;
    ctx.seed = seed;
    ctx.out_root_env = root_env ? root_env : "";
    if (!config_path.empty()) {
      const Json cfg = read_json_file(config_path);
      const Json& section = cfg.contains("config") ? cfg.at("config") : cfg;
      if (section.contains("env")) socnav::cli::apply_json(section.at("env"), ctx.env);
      if (section.contains("train")) socnav::cli::apply_json(section.at("train"), ctx.train);
    }
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (flag_options[i]->count() == 0) continue;
      const Json one{{flags[i].key, parse_flag_value(flags[i])}};
      if (flags[i].section == "env") {
        socnav::cli::apply_json(one, ctx.env);
      } else {
        socnav::cli::apply_json(one, ctx.train);
      }
    }
    ctx.env.validate();
    ctx.train.validate();

    for (auto* sub : app.get_subcommands()) ctx.subcommand = sub->get_name();
    const fs::path root = root_env ? fs::path(root_env) : fs::path("runs");
    ctx.out_dir = out_dir.empty() ? root / ctx.subcommand : fs::path(out_dir);

    if (gen->parsed()) {
      int count = gen_count;
      if (gen->get_option("--count")->count() == 0) count = gen_suite == "multi" ? 24 : 25;
      if (gen_suite == "hrsc") count = 42;
      if (gen_suite == "hisc-cac") count = 21;
      ctx.args = Json{{"suite", gen_suite}, {"count", count}, {"out", gen_out}};
    } else if (trn->parsed()) {
      ctx.args = Json{{"scenarios", absolute_or_empty(scenarios_path)}, {"scenario_id", scenario_id}};
    } else if (rol->parsed()) {
      ctx.args = Json{{"checkpoint", absolute_or_empty(checkpoint)},
                      {"scenarios", absolute_or_empty(scenarios_path)},
                      {"scenario_id", scenario_id},
                      {"smooth", smooth},
                      {"kernel_sigma", kernel_sigma},
                      {"truncate", truncate}};
    } else if (swp->parsed() || abl->parsed()) {
      ctx.args = Json{{"scenarios", absolute_or_empty(scenarios_path)},
                      {"seeds", seeds},
                      {"parallelism", parallelism}};
      if (swp->parsed()) {
        std::vector<double> sigmas;
        std::stringstream ss(sigmas_text);
        std::string item;
        while (std::getline(ss, item, ',')) sigmas.push_back(std::stod(item));
        if (sigmas.empty()) throw std::invalid_argument("--sigmas needs at least one value");
        ctx.args["sigmas"] = sigmas;
      } else {
        ctx.args["kind"] = ablate_kind;
      }
    } else if (fld->parsed()) {
      ctx.args = Json{{"scenarios", absolute_or_empty(scenarios_path)},
                      {"scenario_id", scenario_id},
                      {"resolution", resolution},
                      {"probe", probe},
                      {"out", field_out}};
    }
    return execute(std::move(ctx));
  } catch (const socnav::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
