#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <tuple>
#include <utility>

#include "npca/errors.hpp"

namespace npca {

/// OBSS occupancy rates of the primary (p1) and non-primary (p2) channel.
/// p1 = 1 is rejected: a fully occupied primary makes the non-primary
/// throughput term p1/(1-p1) singular.
struct OccupancyPair {
  double p1 = 0.0;
  double p2 = 0.0;

  OccupancyPair() = default;
  OccupancyPair(double p1_, double p2_) : p1(p1_), p2(p2_) {
    if (!(p1 >= 0.0 && p1 < 1.0)) {
      throw invalid_parameter("OccupancyPair: p1 must lie in [0,1)");
    }
    if (!(p2 >= 0.0 && p2 <= 1.0)) {
      throw invalid_parameter("OccupancyPair: p2 must lie in [0,1]");
    }
  }
};

using Matrix2 = std::array<std::array<double, 2>, 2>;  // [row][col]

/// Probability that a transmission opportunity lands on channel 1 vs
/// channel 2: the device uses the primary whenever it is free and falls back
/// to an idle non-primary otherwise, renormalized over slots where it can
/// transmit at all.
inline std::pair<double, double> channel_access_probs(const OccupancyPair& occ) {
  const double denom = 1.0 - occ.p1 * occ.p2;
  if (!(denom > 0.0)) {
    throw invalid_parameter("channel_access_probs: both channels always busy");
  }
  const double tr1 = (1.0 - occ.p1) / denom;
  const double tr2 = (occ.p1 - occ.p1 * occ.p2) / denom;
  return {tr1, tr2};
}

/// Column-stochastic transition matrix of the transmission-channel chain.
/// Channel states across slots are independent, so both columns are the
/// same access-probability vector.
inline Matrix2 transition_matrix(const OccupancyPair& occ) {
  const auto [tr1, tr2] = channel_access_probs(occ);
  return Matrix2{{{tr1, tr1}, {tr2, tr2}}};
}

/// Steady state of a 2x2 column-stochastic chain, by power iteration from
/// (1,0) -- channel 1 is the primary -- cross-checked against the closed
/// form (the shared column vector).
inline std::pair<double, double> steady_state(const Matrix2& t) {
  for (int c = 0; c < 2; ++c) {
    if (std::abs(t[0][c] + t[1][c] - 1.0) > 1e-9) {
      throw invalid_parameter("steady_state: matrix is not column-stochastic");
    }
  }
  double v0 = 1.0, v1 = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double n0 = t[0][0] * v0 + t[0][1] * v1;
    const double n1 = t[1][0] * v0 + t[1][1] * v1;
    if (std::abs(n0 - v0) < 1e-15 && std::abs(n1 - v1) < 1e-15) {
      v0 = n0;
      v1 = n1;
      break;
    }
    v0 = n0;
    v1 = n1;
  }
  // closed form: columns are identical, so T*v = column for any distribution
  if (std::abs(v0 - t[0][0]) > 1e-10 || std::abs(v1 - t[1][0]) > 1e-10) {
    throw solver_failure("steady_state: iteration disagrees with closed form");
  }
  return {v0, v1};
}

/// Probability that a transmission on channel k follows one on the other
/// channel and therefore pays the switching cost.
inline std::pair<double, double> overhead_probs(double pb1, double pb2) {
  const double sum = pb1 + pb2;
  if (!(sum > 0.0)) {
    throw invalid_parameter("overhead_probs: degenerate steady state");
  }
  return {pb2 / sum, pb1 / sum};
}

/// Airtime discount per channel: a channel-k transmission is stretched to
/// l * T with probability po_k, so its throughput scales by
/// 1 / (l * po_k + (1 - po_k)).
inline std::pair<double, double> overhead_coefficients(double po1, double po2,
                                                       double l) {
  if (!(l >= 1.0)) {
    throw invalid_parameter("overhead_coefficients: overhead factor l must be >= 1");
  }
  const double c1 = 1.0 / (l * po1 + po2);
  const double c2 = 1.0 / (l * po2 + po1);
  return {c1, c2};
}

/// The assembled two-channel switching model for one (p1, p2, l) point.
struct TwoChannelModel {
  OccupancyPair occ;
  double l = 1.0;
  Matrix2 t{};
  double pb1 = 0.0, pb2 = 0.0;
  double po1 = 0.0, po2 = 0.0;
  double c1 = 1.0, c2 = 1.0;

  static TwoChannelModel build(const OccupancyPair& occ, double l) {
    TwoChannelModel m;
    m.occ = occ;
    m.l = l;
    m.t = transition_matrix(occ);
    std::tie(m.pb1, m.pb2) = steady_state(m.t);
    std::tie(m.po1, m.po2) = overhead_probs(m.pb1, m.pb2);
    std::tie(m.c1, m.c2) = overhead_coefficients(m.po1, m.po2, l);
    return m;
  }
};

enum class ModelTag { legacy, npca_classic, npca_overhead };

struct ThroughputReport {
  ModelTag model_tag = ModelTag::legacy;
  double th_primary_mbps = 0.0;
  double th_secondary_mbps = 0.0;
  double total_mbps = 0.0;
};

/// Single-channel throughput under OBSS occupancy p: occupancy linearly
/// removes usable airtime, S(p) = (1 - p) * S.
inline double throughput_vs_occupancy(double s_mbps, double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw invalid_parameter("throughput_vs_occupancy: p must lie in [0,1)");
  }
  return (1.0 - p) * s_mbps;
}

/// Legacy two-channel network: primary always used, the duplicate onto the
/// secondary only lands when that channel is idle.
inline ThroughputReport legacy_throughput(double s_p1, const OccupancyPair& occ) {
  ThroughputReport r;
  r.model_tag = ModelTag::legacy;
  r.th_primary_mbps = s_p1;
  r.th_secondary_mbps = s_p1 * (1.0 - occ.p2);
  r.total_mbps = r.th_primary_mbps + r.th_secondary_mbps;
  return r;
}

/// Classic NPCA without switching cost: legacy behaviour plus sole use of an
/// idle non-primary channel while the primary is occupied.
inline ThroughputReport npca_classic_throughput(double s_p1,
                                                const OccupancyPair& occ) {
  ThroughputReport r;
  r.model_tag = ModelTag::npca_classic;
  r.th_primary_mbps = s_p1 * (2.0 - occ.p2);
  r.th_secondary_mbps = s_p1 * (occ.p1 / (1.0 - occ.p1)) * (1.0 - occ.p2);
  r.total_mbps = r.th_primary_mbps + r.th_secondary_mbps;
  return r;
}

/// NPCA with switching overhead: the classic per-channel terms, each
/// discounted by its overhead coefficient.
inline ThroughputReport npca_overhead_throughput(double s_p1,
                                                 const OccupancyPair& occ,
                                                 double l) {
  const TwoChannelModel m = TwoChannelModel::build(occ, l);
  const ThroughputReport classic = npca_classic_throughput(s_p1, occ);
  ThroughputReport r;
  r.model_tag = ModelTag::npca_overhead;
  r.th_primary_mbps = m.c1 * classic.th_primary_mbps;
  r.th_secondary_mbps = m.c2 * classic.th_secondary_mbps;
  r.total_mbps = r.th_primary_mbps + r.th_secondary_mbps;
  return r;
}

/// NPCA-to-legacy throughput ratio; the single-channel factor S(p1) cancels,
/// so this depends only on (p1, p2, l).
inline double throughput_ratio(const OccupancyPair& occ, double l) {
  if (!(l >= 1.0)) {
    throw invalid_parameter("throughput_ratio: overhead factor l must be >= 1");
  }
  if (!(occ.p2 < 2.0)) {
    throw invalid_parameter("throughput_ratio: p2 out of range");
  }
  const double p1 = occ.p1, p2 = occ.p2;
  const double one_minus = 1.0 - p1 * p2;
  const double term1 = one_minus / (l * p1 * (1.0 - p2) + 1.0 - p1);
  const double term2 = one_minus / (p1 * (1.0 - p2) + l * (1.0 - p1)) *
                       (p1 / (1.0 - p1)) * ((1.0 - p2) / (2.0 - p2));
  return term1 + term2;
}

/// Ratio specialization for equal occupancy on both channels.
inline double balanced_ratio(double p, double l) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw invalid_parameter("balanced_ratio: p must lie in [0,1)");
  }
  if (!(l >= 1.0)) {
    throw invalid_parameter("balanced_ratio: overhead factor l must be >= 1");
  }
  return (p + 1.0) / (l * p + 1.0) +
         p * (p + 1.0) / ((l + p) * (2.0 - p));
}

/// Occupancy p* where the balanced ratio crosses 1 from below: above it NPCA
/// outperforms legacy despite the switching cost. Returns nullopt when the
/// ratio never dips below 1 on (0,1), e.g. at l = 1.
inline std::optional<double> crossover_threshold(double l) {
  if (!(l > 1.0)) {
    return std::nullopt;
  }
  const auto f = [&](double p) { return balanced_ratio(p, l) - 1.0; };
  // scan for a sign change from negative to positive
  constexpr double kLo = 1e-6;
  constexpr double kHi = 1.0 - 1e-9;
  constexpr int kSteps = 200;
  double a = kLo;
  double fa = f(a);
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool found = false;
  for (int i = 1; i <= kSteps; ++i) {
    const double b = kLo + (kHi - kLo) * i / kSteps;
    const double fb = f(b);
    if (fa < 0.0 && fb >= 0.0) {
      bracket_lo = a;
      bracket_hi = b;
      found = true;
      break;
    }
    a = b;
    fa = fb;
  }
  if (!found) return std::nullopt;
  for (int it = 0; it < 200 && bracket_hi - bracket_lo > 1e-8; ++it) {
    const double mid = 0.5 * (bracket_lo + bracket_hi);
    if (f(mid) < 0.0) {
      bracket_lo = mid;
    } else {
      bracket_hi = mid;
    }
  }
  return 0.5 * (bracket_lo + bracket_hi);
}

}  // namespace npca
