#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "npca/errors.hpp"
#include "npca/mac_timing.hpp"

namespace npca::sim {

enum class PolicyKind { legacy, npca, hybrid };

inline std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::legacy: return "legacy";
    case PolicyKind::npca: return "npca";
    case PolicyKind::hybrid: return "hybrid";
  }
  return "?";
}

/// Channel-access policy. The hybrid controller estimates the primary
/// occupancy over the trailing k1 slots and runs NPCA while the estimate
/// exceeds thre1, legacy otherwise.
struct AccessPolicy {
  PolicyKind kind = PolicyKind::legacy;
  double thre1 = 0.62;
  int k1 = 12000;

  void validate() const {
    if (kind == PolicyKind::hybrid) {
      if (!(thre1 > 0.0 && thre1 < 1.0)) {
        throw config_error("AccessPolicy: thre1 must lie in (0,1)");
      }
      if (k1 < 1) throw config_error("AccessPolicy: k1 must be >= 1");
    }
  }

  bool operator==(const AccessPolicy&) const = default;
};

/// HE 20 MHz single-stream data rates (Mbit/s), indexed by MCS.
inline double mcs_rate_mbps(int mcs) {
  static constexpr std::array<double, 12> kRates = {
      8.6, 17.2, 25.8, 34.4, 51.6, 68.8, 77.4, 86.0, 103.2, 114.7, 129.0, 143.4};
  if (mcs < 0 || mcs >= static_cast<int>(kRates.size())) {
    throw config_error("mcs_rate_mbps: MCS index out of range");
  }
  return kRates[static_cast<std::size_t>(mcs)];
}

/// Full description of one simulation run. Defaults are the standard
/// saturated-BSS setup: 30 s, 10 stations, CW 16/1024, 9 us slots,
/// 18000-byte A-MPDUs of 1500-byte packets at MCS 3.
struct SimConfig {
  double sim_time_s = 30.0;
  int n_stations = 10;
  MacTiming mac{};
  int cw_min = 16;
  int cw_max = 1024;
  int packet_bytes = 1500;
  int ampdu_bytes = 18000;
  int mcs = 3;
  double phy_rate_mbps = 0.0;   // 0 = derive from mcs
  double l = 2.0;               // (PPDU + switching overhead) / PPDU
  double obss_p1 = 0.0;
  double obss_p2 = 0.0;
  // Burst length of the OBSS occupancy process (0 = ten slots). Short
  // bursts keep the occupancy fine-grained, which the closed forms assume;
  // set this to a full PPDU airtime to model coarse OBSS traffic instead.
  double obss_ppdu_us = 0.0;
  AccessPolicy policy{};
  std::uint64_t seed = 1;

  double ampdu_bits() const { return 8.0 * ampdu_bytes; }

  /// Fill the derived fields (PHY rate, payload airtime, OBSS burst length)
  /// and check every bound. Idempotent.
  void resolve() {
    if (phy_rate_mbps <= 0.0) phy_rate_mbps = mcs_rate_mbps(mcs);
    mac.payload_tx_us = ampdu_bits() / phy_rate_mbps;
    if (obss_ppdu_us <= 0.0) obss_ppdu_us = 10.0 * mac.slot_us;
    validate();
  }

  /// Airtime of one PPDU: preamble plus payload burst.
  double ppdu_us() const { return mac.phy_header_us + mac.payload_tx_us; }

  void validate() const {
    if (!(sim_time_s > 0.0)) throw config_error("SimConfig: sim_time_s must be > 0");
    if (n_stations < 1) throw config_error("SimConfig: n_stations must be >= 1");
    if (cw_min < 2) throw config_error("SimConfig: cw_min must be >= 2");
    int w = cw_min;
    while (w < cw_max) w *= 2;
    if (w != cw_max) throw config_error("SimConfig: cw_max must be cw_min * 2^m");
    if (packet_bytes < 1) throw config_error("SimConfig: packet_bytes must be >= 1");
    if (ampdu_bytes < packet_bytes) {
      throw config_error("SimConfig: ampdu_bytes must be >= packet_bytes");
    }
    if (!(phy_rate_mbps > 0.0)) throw config_error("SimConfig: phy_rate_mbps must be > 0");
    if (!(l >= 1.0)) throw config_error("SimConfig: l must be >= 1");
    if (!(obss_p1 >= 0.0 && obss_p1 < 1.0)) {
      throw config_error("SimConfig: obss_p1 must lie in [0,1)");
    }
    if (!(obss_p2 >= 0.0 && obss_p2 < 1.0)) {
      throw config_error("SimConfig: obss_p2 must lie in [0,1)");
    }
    if (!(obss_ppdu_us > 0.0)) throw config_error("SimConfig: obss_ppdu_us must be > 0");
    try {
      mac.validate();
    } catch (const invalid_parameter& e) {
      throw config_error(e.what());
    }
    policy.validate();
  }

  bool operator==(const SimConfig&) const = default;
};

inline int round_to_slots(double duration_us, double slot_us) {
  return static_cast<int>(std::floor(duration_us / slot_us + 0.5));
}

/// All durations quantized to whole slots (round half up); the single place
/// where quantization error against the closed forms enters.
struct SlotQuantized {
  int ts_slots = 0;
  int tc_slots = 0;
  int obss_ppdu_slots = 0;
  int switch_overhead_slots = 0;
  int difs_slots = 0;

  static SlotQuantized from(const SimConfig& cfg) {
    const SlotCosts costs = slot_costs(cfg.mac);
    SlotQuantized q;
    q.ts_slots = round_to_slots(costs.t_s_us, cfg.mac.slot_us);
    q.tc_slots = round_to_slots(costs.t_c_us, cfg.mac.slot_us);
    q.obss_ppdu_slots = round_to_slots(cfg.obss_ppdu_us, cfg.mac.slot_us);
    q.switch_overhead_slots = switch_overhead(cfg.l, cfg.ppdu_us(), cfg.mac.slot_us);
    q.difs_slots = round_to_slots(cfg.mac.difs_us, cfg.mac.slot_us);
    if (q.ts_slots < 1 || q.tc_slots < 1 || q.obss_ppdu_slots < 1) {
      throw config_error("SlotQuantized: transmission and OBSS bursts must span >= 1 slot");
    }
    return q;
  }

  /// Dead time charged on the destination channel when the transmission
  /// channel changes: the extra (l - 1) PPDU-lengths of the overhead factor.
  static int switch_overhead(double l, double ppdu_us, double slot_us) {
    return round_to_slots((l - 1.0) * ppdu_us, slot_us);
  }
};

}  // namespace npca::sim
