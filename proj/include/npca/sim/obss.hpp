#pragma once

#include "npca/errors.hpp"
#include "npca/rng.hpp"

namespace npca::sim {

/// Per-idle-slot start probability q that makes a renewal process of
/// fixed d-slot busy bursts occupy the channel a long-run fraction p:
/// one cycle is Geometric(q)-many idle slots followed by d busy ones,
/// so p = d q / (d q + 1 - q)  =>  q = p / (d (1 - p) + p).
inline double calibrate_obss(double p, int d) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw invalid_parameter("calibrate_obss: p must lie in [0,1)");
  }
  if (d < 1) throw invalid_parameter("calibrate_obss: d must be >= 1");
  return p / (d * (1.0 - p) + p);
}

/// Renewal occupancy process for one channel. The process is autonomous:
/// it ticks every slot whether or not the BSS holds the channel, so its
/// busy fraction stays at the calibrated target.
class ObssProcess {
 public:
  ObssProcess() = default;
  ObssProcess(double p, int d) : d_(d) { set_target(p); }

  void set_target(double p) {
    p_ = p;
    q_ = calibrate_obss(p, d_);
  }

  /// Start mid-stream: busy with probability p, with the residual burst
  /// length uniform over {1..d} (length-biased residual of a fixed burst).
  void init_stationary(Rng& rng) {
    if (rng.bernoulli(p_)) {
      remaining_ = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(d_)));
    } else {
      remaining_ = 0;
    }
  }

  /// Advance one slot; returns whether this slot is OBSS-busy.
  bool tick(Rng& rng) {
    if (remaining_ > 0) {
      --remaining_;
      return true;
    }
    if (q_ > 0.0 && rng.bernoulli(q_)) {
      remaining_ = d_ - 1;  // this slot is the first busy one
      return true;
    }
    return false;
  }

  int burst_slots() const { return d_; }
  double target() const { return p_; }

 private:
  double p_ = 0.0;
  double q_ = 0.0;
  int d_ = 1;
  int remaining_ = 0;
};

}  // namespace npca::sim
