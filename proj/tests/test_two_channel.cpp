#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "npca/two_channel.hpp"

using Catch::Approx;
using npca::OccupancyPair;

namespace {

// Direct expansion of the overhead-aware NPCA total, written straight from
// the two-term closed form; the library computes it through the coefficient
// path instead.
double oracle_npca_overhead_total(double s, double p1, double p2, double l) {
  const double a = (1.0 - p1 * p2) * (2.0 - p2) / (l * p1 * (1.0 - p2) + 1.0 - p1);
  const double b = (1.0 - p1 * p2) * p1 * (1.0 - p2) /
                   ((p1 * (1.0 - p2) + l * (1.0 - p1)) * (1.0 - p1));
  return s * (a + b);
}

struct GridPoint {
  double p1, p2;
};

std::vector<GridPoint> grid_100() {
  std::vector<GridPoint> pts;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      pts.push_back({i * 0.95 / 9.0, j * 0.95 / 9.0});
    }
  }
  return pts;
}

}  // namespace

TEST_CASE("occupancy bounds") {
  CHECK_NOTHROW(OccupancyPair(0.0, 0.0));
  CHECK_NOTHROW(OccupancyPair(0.99, 1.0));
  CHECK_THROWS_AS(OccupancyPair(1.0, 0.5), npca::invalid_parameter);
  CHECK_THROWS_AS(OccupancyPair(-0.1, 0.5), npca::invalid_parameter);
  CHECK_THROWS_AS(OccupancyPair(0.5, 1.1), npca::invalid_parameter);
}

TEST_CASE("channel access probabilities") {
  const auto [a1, a2] = npca::channel_access_probs(OccupancyPair(0.0, 0.7));
  CHECK(a1 == Approx(1.0));
  CHECK(a2 == Approx(0.0).margin(1e-15));

  const auto [b1, b2] = npca::channel_access_probs(OccupancyPair(0.5, 0.5));
  CHECK(b1 == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(b2 == Approx(1.0 / 3.0).epsilon(1e-12));

  const auto [c1, c2] = npca::channel_access_probs(OccupancyPair(0.8, 0.2));
  CHECK(c1 == Approx(0.2 / 0.84).epsilon(1e-12));
  CHECK(c2 == Approx(0.64 / 0.84).epsilon(1e-12));
  CHECK(c1 + c2 == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("transition matrix is column-stochastic with equal columns") {
  const auto t0 = npca::transition_matrix(OccupancyPair(0.0, 0.3));
  CHECK(t0[0][0] == Approx(1.0));
  CHECK(t0[1][0] == Approx(0.0).margin(1e-15));

  for (const auto& pt : grid_100()) {
    const auto t = npca::transition_matrix(OccupancyPair(pt.p1, pt.p2));
    for (int c = 0; c < 2; ++c) {
      CHECK(std::abs(t[0][c] + t[1][c] - 1.0) < 1e-12);
    }
    CHECK(t[0][0] == t[0][1]);
    CHECK(t[1][0] == t[1][1]);
  }
}

TEST_CASE("steady state: closed form, fixed point and power iteration agree") {
  const auto s0 = npca::steady_state(npca::transition_matrix(OccupancyPair(0.0, 0.4)));
  CHECK(s0.first == Approx(1.0));
  CHECK(s0.second == Approx(0.0).margin(1e-15));

  const auto s1 = npca::steady_state(npca::transition_matrix(OccupancyPair(0.5, 0.5)));
  CHECK(s1.first == Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(s1.second == Approx(1.0 / 3.0).epsilon(1e-12));

  const auto s2 = npca::steady_state(npca::transition_matrix(OccupancyPair(0.8, 0.2)));
  CHECK(s2.first == Approx(0.23810).margin(1e-5));
  CHECK(s2.second == Approx(0.76190).margin(1e-5));

  for (const auto& pt : grid_100()) {
    const OccupancyPair occ(pt.p1, pt.p2);
    const auto t = npca::transition_matrix(occ);
    const auto [pb1, pb2] = npca::steady_state(t);
    CHECK(pb1 + pb2 == Approx(1.0).epsilon(1e-12));
    // fixed point of the chain
    CHECK(t[0][0] * pb1 + t[0][1] * pb2 == Approx(pb1).margin(1e-12));
    CHECK(t[1][0] * pb1 + t[1][1] * pb2 == Approx(pb2).margin(1e-12));
    // closed forms
    const double denom = 1.0 - occ.p1 * occ.p2;
    CHECK(pb1 == Approx((1.0 - occ.p1) / denom).margin(1e-12));
    CHECK(pb2 == Approx((occ.p1 - occ.p1 * occ.p2) / denom).margin(1e-12));
  }

  npca::Matrix2 bad{{{0.5, 0.6}, {0.4, 0.4}}};
  CHECK_THROWS_AS(npca::steady_state(bad), npca::invalid_parameter);
}

TEST_CASE("overhead probabilities") {
  const auto a = npca::overhead_probs(1.0, 0.0);
  CHECK(a.first == Approx(0.0).margin(1e-15));
  CHECK(a.second == Approx(1.0));
  const auto b = npca::overhead_probs(2.0 / 3.0, 1.0 / 3.0);
  CHECK(b.first == Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(b.second == Approx(2.0 / 3.0).epsilon(1e-12));
  const auto c = npca::overhead_probs(0.5, 0.5);
  CHECK(c.first == Approx(0.5));
  CHECK(c.second == Approx(0.5));
}

TEST_CASE("overhead coefficients") {
  const auto unity = npca::overhead_coefficients(0.3, 0.7, 1.0);
  CHECK(unity.first == Approx(1.0).epsilon(1e-15));
  CHECK(unity.second == Approx(1.0).epsilon(1e-15));

  // transmissions that never switch pay nothing
  const auto anchored = npca::overhead_coefficients(0.0, 1.0, 2.0);
  CHECK(anchored.first == Approx(1.0).epsilon(1e-15));

  const auto c = npca::overhead_coefficients(1.0 / 3.0, 2.0 / 3.0, 2.0);
  CHECK(c.first == Approx(0.75).epsilon(1e-12));
  CHECK(c.second == Approx(0.6).epsilon(1e-12));

  CHECK_THROWS_AS(npca::overhead_coefficients(0.5, 0.5, 0.9), npca::invalid_parameter);
}

TEST_CASE("throughput under occupancy") {
  CHECK(npca::throughput_vs_occupancy(10.0, 0.0) == Approx(10.0));
  CHECK(npca::throughput_vs_occupancy(10.0, 0.5) == Approx(5.0));
  CHECK(npca::throughput_vs_occupancy(10.0, 0.8) == Approx(2.0));
  CHECK_THROWS_AS(npca::throughput_vs_occupancy(10.0, 1.0), npca::invalid_parameter);
}

TEST_CASE("legacy throughput") {
  const auto r = npca::legacy_throughput(10.0, OccupancyPair(0.4, 0.2));
  CHECK(r.total_mbps == Approx(18.0).epsilon(1e-12));
  CHECK(r.total_mbps == Approx(r.th_primary_mbps + r.th_secondary_mbps));

  CHECK(npca::legacy_throughput(10.0, OccupancyPair(0.4, 1.0)).total_mbps ==
        Approx(10.0));
  CHECK(npca::legacy_throughput(0.0, OccupancyPair(0.4, 0.3)).total_mbps ==
        Approx(0.0).margin(1e-15));
}

TEST_CASE("classic NPCA throughput") {
  const auto r = npca::npca_classic_throughput(10.0, OccupancyPair(0.5, 0.5));
  CHECK(r.th_primary_mbps == Approx(15.0).epsilon(1e-12));
  CHECK(r.th_secondary_mbps == Approx(5.0).epsilon(1e-12));
  CHECK(r.total_mbps == Approx(20.0).epsilon(1e-12));

  // no primary occupancy, nothing to gain over legacy
  const auto base = npca::npca_classic_throughput(10.0, OccupancyPair(0.0, 0.2));
  CHECK(base.total_mbps == Approx(18.0).epsilon(1e-12));
}

TEST_CASE("classic NPCA strictly beats legacy whenever the primary sees OBSS") {
  for (const auto& pt : grid_100()) {
    const OccupancyPair occ(pt.p1, pt.p2);
    const double legacy = npca::legacy_throughput(1.0, occ).total_mbps;
    const double classic = npca::npca_classic_throughput(1.0, occ).total_mbps;
    if (occ.p1 == 0.0) {
      CHECK(classic == Approx(legacy).epsilon(1e-12));
    } else {
      CHECK(classic > legacy);
    }
  }
}

TEST_CASE("overhead NPCA matches the direct closed form and degenerates at l=1") {
  const double direct = oracle_npca_overhead_total(1.0, 0.8, 0.2, 2.0);
  CHECK(direct == Approx(3.6062).margin(5e-5));
  const auto r = npca::npca_overhead_throughput(1.0, OccupancyPair(0.8, 0.2), 2.0);
  CHECK(r.total_mbps == Approx(direct).margin(1e-12));
  CHECK(r.total_mbps == Approx(3.6062370062370062).margin(1e-12));

  for (const auto& pt : grid_100()) {
    const OccupancyPair occ(pt.p1, pt.p2);
    for (double l : {1.0, 1.8, 2.0, 2.2}) {
      const double via_coeffs = npca::npca_overhead_throughput(2.5, occ, l).total_mbps;
      const double via_direct = oracle_npca_overhead_total(2.5, occ.p1, occ.p2, l);
      CHECK(via_coeffs == Approx(via_direct).margin(1e-12));
    }
    const double classic = npca::npca_classic_throughput(2.5, occ).total_mbps;
    const double no_overhead = npca::npca_overhead_throughput(2.5, occ, 1.0).total_mbps;
    CHECK(no_overhead == Approx(classic).margin(1e-12));
  }

  // free switching on an idle primary reduces to legacy
  const auto idle = npca::npca_overhead_throughput(7.0, OccupancyPair(0.0, 0.3), 2.0);
  CHECK(idle.total_mbps ==
        Approx(npca::legacy_throughput(7.0, OccupancyPair(0.0, 0.3)).total_mbps)
            .epsilon(1e-12));
}

TEST_CASE("throughput ratio") {
  CHECK(npca::throughput_ratio(OccupancyPair(0.0, 0.6), 2.2) == Approx(1.0).epsilon(1e-12));
  CHECK(npca::throughput_ratio(OccupancyPair(0.8, 0.2), 2.0) ==
        Approx(2.0034650034650035).margin(1e-12));
  CHECK(npca::throughput_ratio(OccupancyPair(0.8, 0.2), 2.0) == Approx(2.0035).margin(1e-3));
  CHECK(npca::throughput_ratio(OccupancyPair(0.2, 0.8), 2.0) ==
        Approx(0.97588691796008869).margin(1e-12));

  // the single-channel factor cancels: ratio of totals reproduces it exactly
  const OccupancyPair occ(0.55, 0.35);
  for (double s : {0.5, 3.0, 42.0}) {
    const double ratio = npca::npca_overhead_throughput(s, occ, 2.0).total_mbps /
                         npca::legacy_throughput(s, occ).total_mbps;
    CHECK(ratio == Approx(npca::throughput_ratio(occ, 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("ratio decreases as switching gets more expensive") {
  for (const auto& pt : grid_100()) {
    if (pt.p1 == 0.0) continue;
    const OccupancyPair occ(pt.p1, pt.p2);
    double prev = npca::throughput_ratio(occ, 1.0);
    for (double l : {1.8, 2.0, 2.2}) {
      const double cur = npca::throughput_ratio(occ, l);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("balanced ratio agrees with the general ratio on the diagonal") {
  CHECK(npca::balanced_ratio(0.0, 2.0) == Approx(1.0).epsilon(1e-12));
  CHECK(npca::balanced_ratio(0.5, 2.0) == Approx(0.95).epsilon(1e-12));
  CHECK(npca::balanced_ratio(0.8, 2.0) == Approx(1.1208791208791209).margin(1e-12));
  CHECK(npca::balanced_ratio(0.8, 2.0) == Approx(1.1209).margin(1e-3));

  for (int i = 0; i < 20; ++i) {
    const double p = i * 0.95 / 19.0;
    for (double l : {1.0, 1.8, 2.0, 2.2}) {
      CHECK(npca::balanced_ratio(p, l) ==
            Approx(npca::throughput_ratio(OccupancyPair(p, p), l)).margin(1e-12));
    }
  }
}

TEST_CASE("crossover threshold") {
  CHECK(!npca::crossover_threshold(1.0).has_value());

  const auto p20 = npca::crossover_threshold(2.0);
  REQUIRE(p20.has_value());
  CHECK(*p20 == Approx(0.61803398874989485).margin(1e-6));
  CHECK(std::abs(*p20 - 0.617) < 0.005);
  CHECK(npca::balanced_ratio(*p20, 2.0) == Approx(1.0).margin(1e-7));

  const auto p18 = npca::crossover_threshold(1.8);
  const auto p22 = npca::crossover_threshold(2.2);
  REQUIRE(p18.has_value());
  REQUIRE(p22.has_value());
  CHECK(*p18 == Approx(0.48267550396498961).margin(1e-6));
  CHECK(*p22 == Approx(0.72486558405854312).margin(1e-6));
  CHECK(*p18 < *p20);
  CHECK(*p20 < *p22);
}

TEST_CASE("two-channel model invariants across the grid") {
  for (const auto& pt : grid_100()) {
    const OccupancyPair occ(pt.p1, pt.p2);
    for (double l : {1.0, 2.0}) {
      const auto m = npca::TwoChannelModel::build(occ, l);
      CHECK(m.pb1 + m.pb2 == Approx(1.0).epsilon(1e-12));
      CHECK(m.po1 + m.po2 == Approx(1.0).epsilon(1e-12));
      CHECK(m.pb1 >= 0.0);
      CHECK(m.pb2 >= 0.0);
      CHECK(m.po1 >= 0.0);
      CHECK(m.po2 >= 0.0);
      CHECK(m.c1 > 0.0);
      CHECK(m.c1 <= 1.0 + 1e-15);
      CHECK(m.c2 > 0.0);
      CHECK(m.c2 <= 1.0 + 1e-15);
      if (l == 1.0) {
        CHECK(m.c1 == Approx(1.0).epsilon(1e-15));
        CHECK(m.c2 == Approx(1.0).epsilon(1e-15));
      }
    }
  }
}
