#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "npca/bianchi.hpp"
#include "npca/rng.hpp"
#include "npca/sim/engine.hpp"
#include "npca/two_channel.hpp"

namespace npca::scenarios {

enum class Scenario { a, b, c };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::a: return "a";
    case Scenario::b: return "b";
    case Scenario::c: return "c";
  }
  return "?";
}

/// Occupancy grids of the three comparison scenarios: (a) busy primary,
/// lightly used secondary; (b) idle primary, busy secondary; (c) equal
/// occupancy on both channels.
inline std::vector<OccupancyPair> scenario_grid(Scenario s, double step) {
  const auto make_range = [&](double lo, double hi, auto to_pair) {
    std::vector<OccupancyPair> pts;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 0.5));
    for (int i = 0; i <= n; ++i) pts.push_back(to_pair(lo + i * step));
    return pts;
  };
  switch (s) {
    case Scenario::a:
      return make_range(0.60, 0.80, [](double p1) { return OccupancyPair(p1, 0.2); });
    case Scenario::b:
      return make_range(0.10, 0.30, [](double p1) { return OccupancyPair(p1, 0.8); });
    case Scenario::c:
      return make_range(0.10, 0.90, [](double p) { return OccupancyPair(p, p); });
  }
  return {};
}

struct SweepSpec {
  Scenario scenario = Scenario::a;
  std::vector<double> l_values = {1.8, 2.0, 2.2};
  double grid_step = 0.02;
  int replications = 5;
  sim::SimConfig base{};
};

/// One sweep row: the grid point, the closed-form ratio prediction, and the
/// replicated simulation results with a 95% band on the paired ratio.
struct ScenarioResult {
  double p1 = 0.0;
  double p2 = 0.0;
  double l = 1.0;
  double analytic_ratio = 0.0;
  double sim_legacy_mbps = 0.0;
  double sim_npca_mbps = 0.0;
  double sim_ratio = 0.0;
  double ci_halfwidth = 0.0;
};

namespace detail {

/// Two-sided 97.5% Student-t quantiles for small degrees of freedom.
inline double t_quantile_975(int df) {
  static constexpr std::array<double, 30> kT = {
      12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
  if (df < 1) return 0.0;
  if (df <= static_cast<int>(kT.size())) return kT[static_cast<std::size_t>(df - 1)];
  return 1.960;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double ci_halfwidth_95(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return t_quantile_975(static_cast<int>(n - 1)) * sd /
         std::sqrt(static_cast<double>(n));
}

/// Run fn(0..n-1) on a small pool of threads; results keyed by index so the
/// output order never depends on scheduling.
template <typename Fn>
void parallel_for(int n, Fn&& fn) {
  const int workers = std::max(1u, std::thread::hardware_concurrency());
  if (workers == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futures;
  std::atomic<int> next{0};
  for (int w = 0; w < std::min(workers, n); ++w) {
    futures.push_back(std::async(std::launch::async, [&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    }));
  }
  for (auto& f : futures) f.get();
}

}  // namespace detail

/// Sweep an explicit list of occupancy points: per point and overhead
/// factor, the analytic ratio plus replicated paired simulations of both
/// policies. Replication r reuses seed base+r for every policy (common
/// random numbers), so the legacy runs are shared across overhead factors.
inline std::vector<ScenarioResult> run_sweep_points(
    const SweepSpec& spec, const std::vector<OccupancyPair>& grid) {
  const int reps = spec.replications;
  const int nl = static_cast<int>(spec.l_values.size());
  const int npoints = static_cast<int>(grid.size());

  std::vector<std::vector<ScenarioResult>> rows(
      static_cast<std::size_t>(npoints));
  detail::parallel_for(npoints, [&](int pi) {
    const OccupancyPair occ = grid[static_cast<std::size_t>(pi)];
    std::vector<double> legacy_mbps(static_cast<std::size_t>(reps));
    std::vector<std::vector<double>> npca_mbps(
        static_cast<std::size_t>(nl),
        std::vector<double>(static_cast<std::size_t>(reps)));
    for (int r = 0; r < reps; ++r) {
      sim::SimConfig cfg = spec.base;
      cfg.obss_p1 = occ.p1;
      cfg.obss_p2 = occ.p2;
      cfg.seed = spec.base.seed + static_cast<std::uint64_t>(r);
      cfg.policy.kind = sim::PolicyKind::legacy;
      legacy_mbps[static_cast<std::size_t>(r)] =
          measured_throughput(sim::run_sim(cfg), cfg.sim_time_s).total_mbps;
      cfg.policy.kind = sim::PolicyKind::npca;
      for (int li = 0; li < nl; ++li) {
        cfg.l = spec.l_values[static_cast<std::size_t>(li)];
        npca_mbps[static_cast<std::size_t>(li)][static_cast<std::size_t>(r)] =
            measured_throughput(sim::run_sim(cfg), cfg.sim_time_s).total_mbps;
      }
    }
    auto& out = rows[static_cast<std::size_t>(pi)];
    for (int li = 0; li < nl; ++li) {
      const double l = spec.l_values[static_cast<std::size_t>(li)];
      ScenarioResult res;
      res.p1 = occ.p1;
      res.p2 = occ.p2;
      res.l = l;
      res.analytic_ratio = throughput_ratio(occ, l);
      res.sim_legacy_mbps = detail::mean(legacy_mbps);
      res.sim_npca_mbps =
          detail::mean(npca_mbps[static_cast<std::size_t>(li)]);
      res.sim_ratio = res.sim_npca_mbps / res.sim_legacy_mbps;
      std::vector<double> paired(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r) {
        paired[static_cast<std::size_t>(r)] =
            npca_mbps[static_cast<std::size_t>(li)][static_cast<std::size_t>(r)] /
            legacy_mbps[static_cast<std::size_t>(r)];
      }
      res.ci_halfwidth = detail::ci_halfwidth_95(paired);
      out.push_back(res);
    }
  });

  std::vector<ScenarioResult> flat;
  flat.reserve(static_cast<std::size_t>(npoints * nl));
  for (auto& group : rows) {
    for (auto& r : group) flat.push_back(r);
  }
  return flat;
}

inline std::vector<ScenarioResult> run_sweep(const SweepSpec& spec) {
  return run_sweep_points(spec, scenario_grid(spec.scenario, spec.grid_step));
}

/// Balanced-occupancy sweep over an explicit window [lo, hi]; used to pin
/// down where the simulated ratio crosses 1.
inline std::vector<ScenarioResult> run_sweep_window(const SweepSpec& spec,
                                                    double lo, double hi) {
  std::vector<OccupancyPair> pts;
  const int n = static_cast<int>(std::floor((hi - lo) / spec.grid_step + 0.5));
  for (int i = 0; i <= n; ++i) {
    const double p = lo + i * spec.grid_step;
    pts.emplace_back(p, p);
  }
  return run_sweep_points(spec, pts);
}

/// Randomized-occupancy experiment: every period both channels re-draw their
/// occupancy from one of three classes (idle / medium / busy), and the same
/// draw sequence drives all three policies.
struct RandomOccupancySpec {
  double period_s = 1.0;
  int n_periods = 200;
  std::array<std::pair<double, double>, 3> occupancy_classes = {
      {{0.10, 0.35}, {0.35, 0.60}, {0.60, 0.85}}};
  double l = 2.2;
  double thre1 = 0.62;
  int k1 = 12000;
  std::uint64_t seed = 1;
  sim::SimConfig base{};
};

/// Per-period (p1, p2) draws: class uniform over the three, value uniform
/// within the class, independently per channel.
inline std::vector<std::pair<double, double>> make_occupancy_schedule(
    const RandomOccupancySpec& spec) {
  Rng rng(spec.seed, 7);
  std::vector<std::pair<double, double>> schedule;
  schedule.reserve(static_cast<std::size_t>(spec.n_periods));
  const auto draw = [&]() {
    const auto& cls = spec.occupancy_classes[rng.uniform_int(3)];
    return cls.first + rng.uniform01() * (cls.second - cls.first);
  };
  for (int i = 0; i < spec.n_periods; ++i) {
    const double p1 = draw();
    const double p2 = draw();
    schedule.push_back({p1, p2});
  }
  return schedule;
}

struct RandomOccupancyResult {
  double legacy_mbps = 0.0;
  double npca_mbps = 0.0;
  double hybrid_mbps = 0.0;
};

inline double run_policy_over_schedule(
    const sim::SimConfig& base,
    const std::vector<std::pair<double, double>>& schedule,
    double period_s) {
  sim::SimConfig cfg = base;
  cfg.obss_p1 = schedule.empty() ? 0.0 : schedule.front().first;
  cfg.obss_p2 = schedule.empty() ? 0.0 : schedule.front().second;
  cfg.sim_time_s = period_s * static_cast<double>(schedule.size());
  sim::SimWorld world(cfg);
  const auto period_slots = static_cast<std::uint64_t>(
      period_s * 1e6 / cfg.mac.slot_us + 0.5);
  for (const auto& [p1, p2] : schedule) {
    world.set_occupancy(p1, p2);
    world.run_slots(period_slots);
  }
  world.finalize();
  return measured_throughput(world.metrics(), cfg.sim_time_s).total_mbps;
}

inline RandomOccupancyResult run_random_occupancy(const RandomOccupancySpec& spec) {
  const auto schedule = make_occupancy_schedule(spec);
  RandomOccupancyResult out;

  sim::SimConfig cfg = spec.base;
  cfg.l = spec.l;
  cfg.seed = spec.seed;
  cfg.policy.thre1 = spec.thre1;
  cfg.policy.k1 = spec.k1;

  cfg.policy.kind = sim::PolicyKind::legacy;
  out.legacy_mbps = run_policy_over_schedule(cfg, schedule, spec.period_s);
  cfg.policy.kind = sim::PolicyKind::npca;
  out.npca_mbps = run_policy_over_schedule(cfg, schedule, spec.period_s);
  cfg.policy.kind = sim::PolicyKind::hybrid;
  out.hybrid_mbps = run_policy_over_schedule(cfg, schedule, spec.period_s);
  return out;
}

/// One row of the simulator-versus-model validation grid.
struct ValidationRow {
  std::string model;  // "legacy" or "npca"
  double p1 = 0.0;
  double p2 = 0.0;
  double l = 1.0;
  double sim_mbps = 0.0;
  double analytic_mbps = 0.0;
  double rel_deviation = 0.0;
};

/// Compare simulated throughput against the closed forms over
/// (p1, p2) in {0.1..0.8}^2 for each overhead factor. Legacy does not
/// depend on l; its rows are repeated per l so the grid stays exhaustive.
inline std::vector<ValidationRow> validation_grid(const sim::SimConfig& base,
                                                  int replications = 5) {
  const std::vector<double> ps = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  const std::vector<double> ls = {1.8, 2.0, 2.2};

  sim::SimConfig resolved = base;
  resolved.resolve();
  const BianchiModel bianchi =
      BianchiModel::solve(resolved.n_stations, resolved.cw_min, resolved.cw_max,
                          resolved.ampdu_bits(), resolved.mac);

  struct PointOut {
    std::vector<ValidationRow> rows;
  };
  const int npoints = static_cast<int>(ps.size() * ps.size());
  std::vector<PointOut> outs(static_cast<std::size_t>(npoints));

  detail::parallel_for(npoints, [&](int pi) {
    const double p1 = ps[static_cast<std::size_t>(pi) / ps.size()];
    const double p2 = ps[static_cast<std::size_t>(pi) % ps.size()];
    const OccupancyPair occ(p1, p2);
    const double s_p1 = throughput_vs_occupancy(bianchi.s_mbps, p1);

    std::vector<double> legacy(static_cast<std::size_t>(replications));
    std::vector<std::vector<double>> npca(
        ls.size(), std::vector<double>(static_cast<std::size_t>(replications)));
    for (int r = 0; r < replications; ++r) {
      sim::SimConfig cfg = base;
      cfg.obss_p1 = p1;
      cfg.obss_p2 = p2;
      cfg.seed = base.seed + static_cast<std::uint64_t>(r);
      cfg.policy.kind = sim::PolicyKind::legacy;
      legacy[static_cast<std::size_t>(r)] =
          measured_throughput(sim::run_sim(cfg), cfg.sim_time_s).total_mbps;
      cfg.policy.kind = sim::PolicyKind::npca;
      for (std::size_t li = 0; li < ls.size(); ++li) {
        cfg.l = ls[li];
        npca[li][static_cast<std::size_t>(r)] =
            measured_throughput(sim::run_sim(cfg), cfg.sim_time_s).total_mbps;
      }
    }

    auto& rows = outs[static_cast<std::size_t>(pi)].rows;
    const double legacy_sim = detail::mean(legacy);
    const double legacy_model = legacy_throughput(s_p1, occ).total_mbps;
    for (std::size_t li = 0; li < ls.size(); ++li) {
      ValidationRow lr;
      lr.model = "legacy";
      lr.p1 = p1;
      lr.p2 = p2;
      lr.l = ls[li];
      lr.sim_mbps = legacy_sim;
      lr.analytic_mbps = legacy_model;
      lr.rel_deviation = std::abs(lr.sim_mbps - lr.analytic_mbps) / lr.analytic_mbps;
      rows.push_back(lr);

      ValidationRow nr;
      nr.model = "npca";
      nr.p1 = p1;
      nr.p2 = p2;
      nr.l = ls[li];
      nr.sim_mbps = detail::mean(npca[li]);
      nr.analytic_mbps = npca_overhead_throughput(s_p1, occ, ls[li]).total_mbps;
      nr.rel_deviation = std::abs(nr.sim_mbps - nr.analytic_mbps) / nr.analytic_mbps;
      rows.push_back(nr);
    }
  });

  std::vector<ValidationRow> flat;
  flat.reserve(static_cast<std::size_t>(npoints) * ls.size() * 2);
  for (auto& o : outs) {
    for (auto& r : o.rows) flat.push_back(r);
  }
  return flat;
}

inline const ValidationRow& worst_deviation(const std::vector<ValidationRow>& rows) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].rel_deviation > rows[worst].rel_deviation) worst = i;
  }
  return rows[worst];
}

}  // namespace npca::scenarios
