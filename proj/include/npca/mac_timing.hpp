#pragma once

#include <cmath>

#include "npca/errors.hpp"

namespace npca {

/// Per-frame and per-slot time constants of the MAC, all in microseconds.
/// Defaults follow the usual 802.11 OFDM numbers: 9 us slots, SIFS 16,
/// DIFS = SIFS + 2*slot, EIFS = SIFS + NACK + DIFS.
struct MacTiming {
  double slot_us = 9.0;
  double sifs_us = 16.0;
  double difs_us = 34.0;
  double eifs_us = 82.0;
  double phy_header_us = 20.0;
  double mac_header_us = 0.0;
  double ack_us = 32.0;
  double nack_us = 32.0;
  double prop_delay_us = 0.0;
  // Airtime of the payload burst (one A-MPDU) at the PHY rate.
  double payload_tx_us = 0.0;

  static double derive_difs(double sifs_us, double slot_us) {
    return sifs_us + 2.0 * slot_us;
  }
  static double derive_eifs(double sifs_us, double nack_us, double difs_us) {
    return sifs_us + nack_us + difs_us;
  }

  void validate() const {
    const double fields[] = {slot_us,       sifs_us,     difs_us,
                             eifs_us,       phy_header_us, mac_header_us,
                             ack_us,        nack_us,     prop_delay_us,
                             payload_tx_us};
    for (double f : fields) {
      if (!(f >= 0.0) || !std::isfinite(f)) {
        throw invalid_parameter("MacTiming: all durations must be finite and >= 0");
      }
    }
    if (slot_us <= 0.0) {
      throw invalid_parameter("MacTiming: slot_us must be > 0");
    }
  }

  bool operator==(const MacTiming&) const = default;
};

struct SlotCosts {
  double t_s_us = 0.0;  // channel busy time of a successful transmission
  double t_c_us = 0.0;  // channel busy time of a collision
};

/// Busy times seen by the channel around one transmission attempt.
/// Success carries header + payload + SIFS + ACK + DIFS (+ propagation both
/// ways); a collision is abandoned after the frame and an EIFS.
inline SlotCosts slot_costs(const MacTiming& t) {
  const double header = t.phy_header_us + t.mac_header_us;
  SlotCosts c;
  c.t_s_us = header + t.payload_tx_us + t.sifs_us + t.prop_delay_us + t.ack_us +
             t.difs_us + t.prop_delay_us;
  c.t_c_us = header + t.payload_tx_us + t.prop_delay_us + t.eifs_us;
  return c;
}

}  // namespace npca
