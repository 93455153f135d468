// Command-line front end: closed-form throughput tables, single simulation
// runs, scenario sweeps and the randomized-occupancy experiment, all emitted
// as plot-ready CSV plus a JSON manifest per run.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "npca/bianchi.hpp"
#include "npca/io/config_file.hpp"
#include "npca/io/csv.hpp"
#include "npca/io/manifest.hpp"
#include "npca/scenarios.hpp"
#include "npca/sim/engine.hpp"
#include "npca/two_channel.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRuntime = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string default_out_dir() {
  if (const char* env = std::getenv("NPCA_OUT_DIR")) return env;
  return ".";
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw npca::config_error("output directory is not writable: " + dir);
  }
  const fs::path probe = fs::path(dir) / ".npca_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw npca::config_error("output directory is not writable: " + dir);
  }
  fs::remove(probe, ec);
}

struct Range {
  double lo = 0.0, hi = 0.0, step = 0.0;
};

Range parse_range(const std::string& text) {
  Range r;
  char sep1 = 0, sep2 = 0;
  std::istringstream in(text);
  if (!(in >> r.lo >> sep1 >> r.hi >> sep2 >> r.step) || sep1 != ':' ||
      sep2 != ':' || r.step <= 0.0 || r.hi < r.lo) {
    throw UsageError("range must be lo:hi:step, got '" + text + "'");
  }
  return r;
}

std::vector<double> expand(const Range& r) {
  std::vector<double> v;
  const int n = static_cast<int>(std::floor((r.hi - r.lo) / r.step + 0.5));
  for (int i = 0; i <= n; ++i) v.push_back(r.lo + i * r.step);
  return v;
}

void require_probability(const std::string& flag, double v, double hi_excl) {
  if (!(v >= 0.0 && v < hi_excl)) {
    throw UsageError(flag + " must lie in [0," + npca::io::format_number(hi_excl) +
                     "), got " + npca::io::format_number(v));
  }
}

npca::io::RunManifest make_manifest(const npca::sim::SimConfig& cfg,
                                    std::uint64_t seed) {
  npca::io::RunManifest m;
  m.config = cfg;
  m.seed = seed;
  return m;
}

// ---------------------------------------------------------------------------
// analytic

int cmd_analytic(double p1, double p2, double l,
                 const std::optional<std::string>& p1_range,
                 const std::optional<std::string>& p2_range,
                 const std::optional<std::string>& out_path) {
  require_probability("--p1", p1, 1.0);
  require_probability("--p2", p2, 1.0 + 1e-12);
  if (l < 1.0) throw UsageError("--l must be >= 1, got " + npca::io::format_number(l));

  std::vector<double> p1s{p1}, p2s{p2};
  if (p1_range) p1s = expand(parse_range(*p1_range));
  if (p2_range) p2s = expand(parse_range(*p2_range));
  for (double v : p1s) require_probability("--p1-range", v, 1.0);
  for (double v : p2s) require_probability("--p2-range", v, 1.0 + 1e-12);

  npca::io::CsvWriter csv(
      "p1,p2,l,s_leg_factor,s_npca_star_factor,s_npca_factor,ratio");
  for (double a : p1s) {
    for (double b : p2s) {
      const npca::OccupancyPair occ(a, b);
      const double leg = npca::legacy_throughput(1.0, occ).total_mbps;
      const double star = npca::npca_classic_throughput(1.0, occ).total_mbps;
      const double with_oh = npca::npca_overhead_throughput(1.0, occ, l).total_mbps;
      const double ratio = npca::throughput_ratio(occ, l);
      csv.row().add(a).add(b).add(l).add(leg).add(star).add(with_oh).add(ratio);
    }
  }

  if (out_path) {
    csv.write_file(*out_path);
    std::cout << "wrote " << *out_path << "\n";
  } else {
    std::cout << csv.str();
  }

  const auto crossover = npca::crossover_threshold(l);
  if (crossover) {
    std::cout << "crossover_p(l=" << npca::io::format_number(l)
              << ") = " << npca::io::format_number(*crossover) << "\n";
  } else {
    std::cout << "crossover_p(l=" << npca::io::format_number(l) << ") = none\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& config_path,
                 std::optional<std::uint64_t> seed,
                 const std::optional<std::string>& policy,
                 const std::string& out_dir) {
  npca::sim::SimConfig cfg = npca::io::parse_sim_config(config_path);
  if (seed) cfg.seed = *seed;
  if (policy) {
    if (*policy == "legacy") {
      cfg.policy.kind = npca::sim::PolicyKind::legacy;
    } else if (*policy == "npca") {
      cfg.policy.kind = npca::sim::PolicyKind::npca;
    } else if (*policy == "hybrid") {
      cfg.policy.kind = npca::sim::PolicyKind::hybrid;
    } else {
      throw UsageError("unknown policy '" + *policy + "' (legacy|npca|hybrid)");
    }
  }
  ensure_out_dir(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  const npca::sim::SimMetrics m = npca::sim::run_sim(cfg);
  const auto wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
  const auto tp = npca::sim::measured_throughput(m, cfg.sim_time_s);

  npca::io::CsvWriter csv(
      "policy,seed,p1,p2,l,sim_time_s,total_slots,measured_p1,measured_p2,"
      "switch_count,overhead_slots_ch1,overhead_slots_ch2,"
      "success_ch1,success_ch2,collisions_ch1,collisions_ch2,"
      "throughput_mbps_ch1,throughput_mbps_ch2,throughput_mbps_total");
  csv.row()
      .add(npca::sim::to_string(cfg.policy.kind))
      .add(static_cast<unsigned long long>(cfg.seed))
      .add(cfg.obss_p1)
      .add(cfg.obss_p2)
      .add(cfg.l)
      .add(cfg.sim_time_s)
      .add(static_cast<unsigned long long>(m.total_slots))
      .add(m.measured_p1)
      .add(m.measured_p2)
      .add(static_cast<unsigned long long>(m.switch_count))
      .add(static_cast<unsigned long long>(m.channel[0].overhead_slots))
      .add(static_cast<unsigned long long>(m.channel[1].overhead_slots))
      .add(static_cast<unsigned long long>(m.channel[0].success_count))
      .add(static_cast<unsigned long long>(m.channel[1].success_count))
      .add(static_cast<unsigned long long>(m.channel[0].collision_count))
      .add(static_cast<unsigned long long>(m.channel[1].collision_count))
      .add(tp.primary_mbps)
      .add(tp.secondary_mbps)
      .add(tp.total_mbps);

  const fs::path metrics_path = fs::path(out_dir) / "metrics.csv";
  csv.write_file(metrics_path.string());

  npca::io::RunManifest manifest = make_manifest(cfg, cfg.seed);
  manifest.wall_ms = wall.count();
  manifest.output_paths = {metrics_path.string()};
  npca::io::write_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);

  std::cout << npca::sim::to_string(cfg.policy.kind) << " seed " << cfg.seed
            << ": " << npca::io::format_number(tp.total_mbps) << " Mbit/s ("
            << npca::io::format_number(tp.primary_mbps) << " + "
            << npca::io::format_number(tp.secondary_mbps) << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// sweep

std::string l_tag(double l) {
  std::string tag = npca::io::format_number(l);
  for (auto& c : tag) {
    if (c == '.') c = 'p';
  }
  return tag;
}

int cmd_sweep(const std::string& scenario_name,
              const std::optional<std::string>& config_path, int replications,
              std::optional<double> sim_time, std::optional<double> step,
              std::optional<std::uint64_t> seed, std::vector<double> l_values,
              const std::string& out_dir) {
  npca::sim::SimConfig base;
  if (config_path) base = npca::io::parse_sim_config(*config_path);
  if (seed) base.seed = *seed;
  base.sim_time_s = sim_time.value_or(10.0);
  if (replications < 1) throw UsageError("--reps must be >= 1");
  if (l_values.empty()) l_values = {1.8, 2.0, 2.2};
  ensure_out_dir(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;

  if (scenario_name == "a" || scenario_name == "b" || scenario_name == "c") {
    npca::scenarios::SweepSpec spec;
    spec.scenario = scenario_name == "a"   ? npca::scenarios::Scenario::a
                    : scenario_name == "b" ? npca::scenarios::Scenario::b
                                           : npca::scenarios::Scenario::c;
    spec.grid_step = step.value_or(scenario_name == "c" ? 0.05 : 0.02);
    spec.replications = replications;
    spec.l_values = l_values;
    spec.base = base;
    const auto rows = npca::scenarios::run_sweep(spec);

    for (double l : l_values) {
      npca::io::CsvWriter csv(
          "p1,p2,l,analytic_ratio,sim_legacy_mbps,sim_npca_mbps,sim_ratio,"
          "ci_halfwidth");
      for (const auto& r : rows) {
        if (r.l != l) continue;
        csv.row()
            .add(r.p1)
            .add(r.p2)
            .add(r.l)
            .add(r.analytic_ratio)
            .add(r.sim_legacy_mbps)
            .add(r.sim_npca_mbps)
            .add(r.sim_ratio)
            .add(r.ci_halfwidth);
      }
      const fs::path path =
          fs::path(out_dir) / ("scenario_" + scenario_name + "_l" + l_tag(l) + ".csv");
      csv.write_file(path.string());
      outputs.push_back(path.string());
    }
  } else if (scenario_name == "validation") {
    const auto rows = npca::scenarios::validation_grid(base, replications);
    for (double l : {1.8, 2.0, 2.2}) {
      npca::io::CsvWriter csv("model,p1,p2,l,sim_mbps,analytic_mbps,rel_deviation");
      for (const auto& r : rows) {
        if (r.l != l) continue;
        csv.row()
            .add(r.model)
            .add(r.p1)
            .add(r.p2)
            .add(r.l)
            .add(r.sim_mbps)
            .add(r.analytic_mbps)
            .add(r.rel_deviation);
      }
      const fs::path path = fs::path(out_dir) / ("validation_l" + l_tag(l) + ".csv");
      csv.write_file(path.string());
      outputs.push_back(path.string());
    }
    const auto& worst = npca::scenarios::worst_deviation(rows);
    npca::io::CsvWriter csv("model,p1,p2,l,sim_mbps,analytic_mbps,rel_deviation");
    csv.row()
        .add(worst.model)
        .add(worst.p1)
        .add(worst.p2)
        .add(worst.l)
        .add(worst.sim_mbps)
        .add(worst.analytic_mbps)
        .add(worst.rel_deviation);
    const fs::path path = fs::path(out_dir) / "validation_worst.csv";
    csv.write_file(path.string());
    outputs.push_back(path.string());
    std::cout << "worst deviation: " << worst.model << " at (p1=" << worst.p1
              << ", p2=" << worst.p2 << ", l=" << worst.l
              << "): " << npca::io::format_number(100.0 * worst.rel_deviation)
              << "%\n";
  } else {
    throw UsageError("unknown scenario '" + scenario_name +
                     "' (a|b|c|validation)");
  }

  const auto wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
  npca::io::RunManifest manifest = make_manifest(base, base.seed);
  manifest.wall_ms = wall.count();
  manifest.output_paths = outputs;
  npca::io::write_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);
  for (const auto& o : outputs) std::cout << "wrote " << o << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// hybrid-experiment (randomized occupancy)

int cmd_hybrid_experiment(const std::optional<std::string>& config_path,
                          int periods, double period_s, double l, double thre1,
                          int k1, std::uint64_t seed, int n_seeds,
                          const std::string& out_dir) {
  npca::scenarios::RandomOccupancySpec spec;
  if (config_path) spec.base = npca::io::parse_sim_config(*config_path);
  if (periods < 1) throw UsageError("--periods must be >= 1");
  if (n_seeds < 1) throw UsageError("--seeds must be >= 1");
  if (!(period_s > 0.0)) throw UsageError("--period-s must be > 0");
  spec.n_periods = periods;
  spec.period_s = period_s;
  spec.l = l;
  spec.thre1 = thre1;
  spec.k1 = k1;
  ensure_out_dir(out_dir);

  const auto t0 = std::chrono::steady_clock::now();
  npca::io::CsvWriter runs("seed,legacy_mbps,npca_mbps,hybrid_mbps");
  double legacy = 0.0, npca_mean = 0.0, hybrid = 0.0;
  for (int s = 0; s < n_seeds; ++s) {
    spec.seed = seed + static_cast<std::uint64_t>(s);
    const auto out = npca::scenarios::run_random_occupancy(spec);
    runs.row()
        .add(static_cast<unsigned long long>(spec.seed))
        .add(out.legacy_mbps)
        .add(out.npca_mbps)
        .add(out.hybrid_mbps);
    legacy += out.legacy_mbps;
    npca_mean += out.npca_mbps;
    hybrid += out.hybrid_mbps;
  }
  legacy /= n_seeds;
  npca_mean /= n_seeds;
  hybrid /= n_seeds;

  npca::io::CsvWriter summary("model,throughput_mbps");
  summary.row().add(std::string("legacy")).add(legacy);
  summary.row().add(std::string("npca")).add(npca_mean);
  summary.row().add(std::string("hybrid")).add(hybrid);

  const fs::path runs_path = fs::path(out_dir) / "random_occupancy_runs.csv";
  const fs::path summary_path = fs::path(out_dir) / "random_occupancy_summary.csv";
  runs.write_file(runs_path.string());
  summary.write_file(summary_path.string());

  const auto wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0);
  npca::sim::SimConfig cfg = spec.base;
  cfg.l = spec.l;
  cfg.policy.kind = npca::sim::PolicyKind::hybrid;
  cfg.policy.thre1 = spec.thre1;
  cfg.policy.k1 = spec.k1;
  npca::io::RunManifest manifest = make_manifest(cfg, seed);
  manifest.wall_ms = wall.count();
  manifest.output_paths = {runs_path.string(), summary_path.string()};
  npca::io::write_manifest((fs::path(out_dir) / "manifest.json").string(), manifest);

  std::cout << "legacy " << npca::io::format_number(legacy) << " | npca "
            << npca::io::format_number(npca_mean) << " | hybrid "
            << npca::io::format_number(hybrid) << " Mbit/s over " << n_seeds
            << " seed(s)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-channel WLAN throughput: closed forms and slot-level simulation"};
  app.require_subcommand(1);

  // analytic
  auto* analytic = app.add_subcommand(
      "analytic", "Closed-form throughput factors and NPCA/legacy ratio");
  double p1 = 0.0, p2 = 0.0, l = 2.0;
  std::optional<std::string> p1_range, p2_range, analytic_out;
  analytic->add_option("--p1", p1, "primary-channel OBSS occupancy in [0,1)");
  analytic->add_option("--p2", p2, "non-primary OBSS occupancy in [0,1]");
  analytic->add_option("--l", l, "overhead factor (PPDU+overhead)/PPDU, >= 1");
  analytic->add_option("--p1-range", p1_range, "sweep p1 over lo:hi:step");
  analytic->add_option("--p2-range", p2_range, "sweep p2 over lo:hi:step");
  analytic->add_option("--out", analytic_out, "write CSV here instead of stdout");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "One slot-level simulation run");
  std::string sim_config;
  std::optional<std::uint64_t> sim_seed;
  std::optional<std::string> sim_policy;
  std::string sim_out = default_out_dir();
  simulate->add_option("--config", sim_config, "run configuration file")->required();
  simulate->add_option("--seed", sim_seed, "override the config seed");
  simulate->add_option("--policy", sim_policy, "legacy|npca|hybrid");
  simulate->add_option("--out", sim_out, "output directory");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Scenario sweeps and the validation grid");
  std::string scenario;
  std::optional<std::string> sweep_config;
  int reps = 5;
  std::optional<double> sweep_sim_time, sweep_step;
  std::optional<std::uint64_t> sweep_seed;
  std::vector<double> sweep_l;
  std::string sweep_out = default_out_dir();
  sweep->add_option("--scenario", scenario, "a|b|c|validation")->required();
  sweep->add_option("--config", sweep_config, "base configuration file");
  sweep->add_option("--reps", reps, "replications (seeds) per grid point");
  sweep->add_option("--sim-time", sweep_sim_time, "seconds simulated per run");
  sweep->add_option("--step", sweep_step, "grid step");
  sweep->add_option("--seed", sweep_seed, "base seed");
  sweep->add_option("--l", sweep_l, "overhead factors (repeatable)");
  sweep->add_option("--out", sweep_out, "output directory");

  // hybrid-experiment
  auto* hybrid = app.add_subcommand(
      "hybrid-experiment", "Randomized per-period occupancy, three policies");
  std::optional<std::string> hx_config;
  int hx_periods = 200;
  double hx_period_s = 1.0;
  double hx_l = 2.2;
  double hx_thre1 = 0.5;
  int hx_k1 = 2000;
  std::uint64_t hx_seed = 1;
  int hx_seeds = 5;
  std::string hx_out = default_out_dir();
  hybrid->add_option("--config", hx_config, "base configuration file");
  hybrid->add_option("--periods", hx_periods, "number of 1 s occupancy periods");
  hybrid->add_option("--period-s", hx_period_s, "period length in seconds");
  hybrid->add_option("--l", hx_l, "overhead factor");
  hybrid->add_option("--thre1", hx_thre1, "hybrid occupancy threshold");
  hybrid->add_option("--k1", hx_k1, "hybrid look-back window, slots");
  hybrid->add_option("--seed", hx_seed, "base seed");
  hybrid->add_option("--seeds", hx_seeds, "number of seeds");
  hybrid->add_option("--out", hx_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (analytic->parsed()) {
      return cmd_analytic(p1, p2, l, p1_range, p2_range, analytic_out);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_config, sim_seed, sim_policy, sim_out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(scenario, sweep_config, reps, sweep_sim_time, sweep_step,
                       sweep_seed, sweep_l, sweep_out);
    }
    if (hybrid->parsed()) {
      return cmd_hybrid_experiment(hx_config, hx_periods, hx_period_s, hx_l,
                                   hx_thre1, hx_k1, hx_seed, hx_seeds, hx_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const npca::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const npca::invalid_parameter& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
