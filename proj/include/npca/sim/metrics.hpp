#pragma once

#include <cstdint>

namespace npca::sim {

struct ChannelMetrics {
  std::uint64_t successful_payload_bits = 0;
  std::uint64_t success_count = 0;
  std::uint64_t collision_count = 0;
  std::uint64_t obss_busy_slots = 0;
  std::uint64_t overhead_slots = 0;
  std::uint64_t bss_airtime_slots = 0;

  bool operator==(const ChannelMetrics&) const = default;
};

struct SimMetrics {
  ChannelMetrics channel[2];
  std::uint64_t switch_count = 0;
  std::uint64_t total_slots = 0;
  double measured_p1 = 0.0;
  double measured_p2 = 0.0;
  // slots where the secondary carried BSS airtime with the primary silent;
  // must stay 0 under the legacy policy
  std::uint64_t secondary_solo_airtime_slots = 0;

  bool operator==(const SimMetrics& o) const {
    return channel[0] == o.channel[0] && channel[1] == o.channel[1] &&
           switch_count == o.switch_count && total_slots == o.total_slots &&
           measured_p1 == o.measured_p1 && measured_p2 == o.measured_p2 &&
           secondary_solo_airtime_slots == o.secondary_solo_airtime_slots;
  }
};

struct ThroughputSummary {
  double primary_mbps = 0.0;
  double secondary_mbps = 0.0;
  double total_mbps = 0.0;
};

/// Payload bits over wall time, per channel and total, in Mbit/s.
inline ThroughputSummary measured_throughput(const SimMetrics& m, double sim_time_s) {
  ThroughputSummary t;
  const double us = sim_time_s * 1e6;
  if (us > 0.0) {
    t.primary_mbps = static_cast<double>(m.channel[0].successful_payload_bits) / us;
    t.secondary_mbps = static_cast<double>(m.channel[1].successful_payload_bits) / us;
    t.total_mbps = t.primary_mbps + t.secondary_mbps;
  }
  return t;
}

}  // namespace npca::sim
