#pragma once

#include <cmath>
#include <cstdint>

#include "npca/errors.hpp"
#include "npca/mac_timing.hpp"

namespace npca {

/// Per-attempt transmission probability of a saturated station, from the
/// standard DCF fixed point
///
///   tau = 2(1-2p) / ((1-2p)(W+1) + p W (1-(2p)^m)),   p = 1-(1-tau)^(n-1).
///
/// Implemented via the equivalent singularity-free form
///   tau = 2 / ((W+1) + p W sum_{i=0}^{m-1} (2p)^i)
/// and solved by bisection; tau(p) is strictly decreasing in p, so the
/// residual is monotone and the root is unique.
inline double solve_tau(int n_stations, int cw_min, int max_stages) {
  if (n_stations < 1) throw invalid_parameter("solve_tau: n_stations must be >= 1");
  if (cw_min < 2) throw invalid_parameter("solve_tau: cw_min must be >= 2");
  if (max_stages < 0) throw invalid_parameter("solve_tau: max_stages must be >= 0");

  const double w = static_cast<double>(cw_min);
  const auto tau_of_p = [&](double p) {
    double geo = 0.0;  // sum_{i=0}^{m-1} (2p)^i
    double term = 1.0;
    for (int i = 0; i < max_stages; ++i) {
      geo += term;
      term *= 2.0 * p;
    }
    return 2.0 / ((w + 1.0) + p * w * geo);
  };
  const auto residual = [&](double tau) {
    const double p = 1.0 - std::pow(1.0 - tau, n_stations - 1);
    return tau - tau_of_p(p);
  };

  double lo = 0.0;
  double hi = 1.0;
  double mid = 0.5;
  constexpr int kMaxIter = 1000;
  int it = 0;
  for (; it < kMaxIter; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = residual(mid);
    if (std::abs(r) < 1e-14) break;
    if (r < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-16) break;
  }
  if (std::abs(residual(mid)) > 1e-10) {
    throw solver_failure("solve_tau: fixed point did not converge");
  }
  return mid;
}

/// Probability that at least one of n stations transmits in a slot.
inline double p_transmit(double tau, int n_stations) {
  if (n_stations < 1) throw invalid_parameter("p_transmit: n_stations must be >= 1");
  if (tau < 0.0 || tau > 1.0) throw invalid_parameter("p_transmit: tau out of [0,1]");
  return 1.0 - std::pow(1.0 - tau, n_stations);
}

/// Probability that a transmission slot carries exactly one transmitter,
/// conditioned on someone transmitting. Undefined at tau = 0.
inline double p_success(double tau, int n_stations) {
  if (n_stations < 1) throw invalid_parameter("p_success: n_stations must be >= 1");
  if (tau <= 0.0 || tau >= 1.0) {
    if (tau == 1.0 && n_stations == 1) return 1.0;
    throw invalid_parameter("p_success: conditioning event has probability zero");
  }
  const double ptr = 1.0 - std::pow(1.0 - tau, n_stations);
  return n_stations * tau * std::pow(1.0 - tau, n_stations - 1) / ptr;
}

/// Saturation throughput in Mbit/s (payload bits per microsecond of
/// expected slot time).
inline double saturation_throughput_mbps(double p_s, double p_tr,
                                         double payload_bits, double sigma_us,
                                         double t_s_us, double t_c_us) {
  const double denom = (1.0 - p_tr) * sigma_us + p_tr * p_s * t_s_us +
                       p_tr * (1.0 - p_s) * t_c_us;
  if (!(denom > 0.0)) {
    throw invalid_parameter("saturation_throughput: degenerate timing, zero expected slot");
  }
  return p_s * p_tr * payload_bits / denom;
}

/// A solved single-channel saturation model: contention inputs plus the
/// (tau, Ptr, Ps, Ts, Tc, S) chain.
struct BianchiModel {
  int n_stations = 0;
  int cw_min = 0;
  int cw_max = 0;
  int max_stages = 0;
  double payload_bits = 0.0;
  double tau = 0.0;
  double p_tr = 0.0;
  double p_s = 0.0;
  double t_s_us = 0.0;
  double t_c_us = 0.0;
  double s_mbps = 0.0;

  static int derive_max_stages(int cw_min, int cw_max) {
    if (cw_min < 2 || cw_max < cw_min) {
      throw invalid_parameter("BianchiModel: need 2 <= cw_min <= cw_max");
    }
    int m = 0;
    int w = cw_min;
    while (w < cw_max) {
      w *= 2;
      ++m;
    }
    if (w != cw_max) {
      throw invalid_parameter("BianchiModel: cw_max must be cw_min * 2^m");
    }
    return m;
  }

  static BianchiModel solve(int n_stations, int cw_min, int cw_max,
                            double payload_bits, const MacTiming& timing) {
    timing.validate();
    BianchiModel m;
    m.n_stations = n_stations;
    m.cw_min = cw_min;
    m.cw_max = cw_max;
    m.max_stages = derive_max_stages(cw_min, cw_max);
    m.payload_bits = payload_bits;
    m.tau = solve_tau(n_stations, cw_min, m.max_stages);
    m.p_tr = p_transmit(m.tau, n_stations);
    m.p_s = p_success(m.tau, n_stations);
    const SlotCosts costs = slot_costs(timing);
    m.t_s_us = costs.t_s_us;
    m.t_c_us = costs.t_c_us;
    m.s_mbps = saturation_throughput_mbps(m.p_s, m.p_tr, payload_bits,
                                          timing.slot_us, m.t_s_us, m.t_c_us);
    return m;
  }
};

inline double saturation_throughput(const BianchiModel& model,
                                    const MacTiming& timing) {
  return saturation_throughput_mbps(model.p_s, model.p_tr, model.payload_bits,
                                    timing.slot_us, model.t_s_us, model.t_c_us);
}

}  // namespace npca
