#pragma once

#include <algorithm>
#include <cstdint>
#include <utility>
#include <vector>

#include "npca/rng.hpp"
#include "npca/sim/config.hpp"
#include "npca/sim/metrics.hpp"
#include "npca/sim/obss.hpp"

namespace npca::sim {

struct StationState {
  int counter = 0;  // backoff counter, in [0, cw)
  int stage = 0;    // retransmission stage, cw = min(cw_min * 2^stage, cw_max)
};

/// NPCA channel-switch rule: go to (or stay on) the primary whenever it is
/// free of OBSS traffic, use an idle secondary while the primary is occupied,
/// and hold position when both are busy. Backoff counters are untouched.
inline int npca_switch_decision(bool primary_obss_busy, bool secondary_obss_busy,
                                int current_channel) {
  if (!primary_obss_busy) return 0;
  if (!secondary_obss_busy) return 1;
  return current_channel;
}

/// Trailing-window occupancy estimator driving the hybrid policy: keeps the
/// busy/idle history of the last k1 slots and compares the busy fraction
/// against thre1. Before the window fills, missing slots count as idle.
class HybridEstimator {
 public:
  HybridEstimator() = default;
  HybridEstimator(int k1, double thre1)
      : k1_(k1), thre1_(thre1), window_(static_cast<std::size_t>(k1), 0) {}

  bool push_and_decide(bool busy) {
    sum_ -= window_[head_];
    window_[head_] = busy ? 1 : 0;
    sum_ += window_[head_];
    head_ = (head_ + 1) % window_.size();
    return prefer_npca();
  }

  /// True when the estimated occupancy busy-count / max(1, k1) exceeds thre1.
  bool prefer_npca() const {
    return static_cast<double>(sum_) > thre1_ * std::max(1, k1_);
  }

  double estimate() const { return static_cast<double>(sum_) / std::max(1, k1_); }

 private:
  int k1_ = 1;
  double thre1_ = 0.5;
  std::vector<std::uint8_t> window_ = {0};
  std::size_t head_ = 0;
  long sum_ = 0;
};

enum class ChannelStatus { idle, obss_busy, bss_tx, switch_overhead };

struct LaunchEvent {
  std::uint64_t slot = 0;
  int channel = 0;
  bool success = false;
};

/// Slot-level simulator of one saturated BSS on two channels.
///
/// The autonomous OBSS renewal processes advance every slot. On top of them
/// the BSS runs a single transmission pipeline on the slots it can use at
/// all: primary-idle slots (operating on the primary) and, under NPCA,
/// primary-busy/secondary-idle slots (operating on the secondary). On such a
/// slot an in-flight transmission progresses, pending switch synchronization
/// burns down, or backoff counters decrement and stations that reached zero
/// transmit on the channel operated in that slot. Slots where the BSS can
/// use neither channel freeze everything, exactly like a paused backoff.
///
/// Changing transmission channel is a committed synchronization: the device
/// freezes for the switching cost, then transmits on the target channel at
/// its next OBSS-free slot. A transmission launched from the primary also
/// occupies an idle secondary with the same payload (the duplicate), decided
/// at launch.
class SimWorld {
 public:
  explicit SimWorld(SimConfig cfg)
      : cfg_(std::move(cfg)),
        rng_obss_{Rng(0, 0), Rng(0, 0)},
        rng_station_(0, 0) {
    cfg_.resolve();
    quant_ = SlotQuantized::from(cfg_);
    rng_obss_[0] = Rng(cfg_.seed, 1);
    rng_obss_[1] = Rng(cfg_.seed, 2);
    rng_station_ = Rng(cfg_.seed, 3);
    obss_[0] = ObssProcess(cfg_.obss_p1, quant_.obss_ppdu_slots);
    obss_[1] = ObssProcess(cfg_.obss_p2, quant_.obss_ppdu_slots);
    obss_[0].init_stationary(rng_obss_[0]);
    obss_[1].init_stationary(rng_obss_[1]);
    stations_.resize(static_cast<std::size_t>(cfg_.n_stations));
    locked_.assign(stations_.size(), 0);
    for (auto& st : stations_) {
      st.counter = static_cast<int>(rng_station_.uniform_int(
          static_cast<std::uint32_t>(cfg_.cw_min)));
    }
    max_stage_ = stage_cap();
    if (cfg_.policy.kind == PolicyKind::hybrid) {
      hybrid_ = HybridEstimator(cfg_.policy.k1, cfg_.policy.thre1);
    }
  }

  void step() {
    const bool busy0 = obss_[0].tick(rng_obss_[0]);
    const bool busy1 = obss_[1].tick(rng_obss_[1]);
    obss_busy_[0] = busy0;
    obss_busy_[1] = busy1;
    if (busy0) ++metrics_.channel[0].obss_busy_slots;
    if (busy1) ++metrics_.channel[1].obss_busy_slots;

    if (cfg_.policy.kind == PolicyKind::hybrid) {
      hybrid_npca_ = hybrid_.push_and_decide(busy0);
    }

    // channel the BSS operates in this slot, if any
    int ctx = -1;
    if (!busy0) {
      ctx = 0;
    } else if (secondary_allowed() && !busy1) {
      ctx = 1;
    }

    if (pending_launch_) {
      // switch synchronization done; transmit on the target channel at its
      // first OBSS-free slot
      if (oh_remaining_ > 0) {
        if (ctx >= 0) tick_overhead();
      } else if (!obss_busy_[oh_target_]) {
        launch(oh_target_);
      }
    } else if (ctx >= 0) {
      if (tx_remaining_ > 0) {
        progress_tx();
      } else {
        backoff_step(ctx);
      }
    }

    ++metrics_.total_slots;
    ++slot_;
  }

  void run() {
    const auto slots = static_cast<std::uint64_t>(
        cfg_.sim_time_s * 1e6 / cfg_.mac.slot_us + 0.5);
    run_slots(slots);
    finalize();
  }

  void run_slots(std::uint64_t n) {
    for (std::uint64_t i = 0; i < n; ++i) step();
  }

  /// Re-target the OBSS processes (takes effect at the next slot; a burst
  /// already in flight completes).
  void set_occupancy(double p1, double p2) {
    obss_[0].set_target(p1);
    obss_[1].set_target(p2);
  }

  void finalize() {
    if (metrics_.total_slots > 0) {
      metrics_.measured_p1 =
          static_cast<double>(metrics_.channel[0].obss_busy_slots) /
          static_cast<double>(metrics_.total_slots);
      metrics_.measured_p2 =
          static_cast<double>(metrics_.channel[1].obss_busy_slots) /
          static_cast<double>(metrics_.total_slots);
    }
  }

  const SimMetrics& metrics() const { return metrics_; }
  const SimConfig& config() const { return cfg_; }
  const SlotQuantized& quantized() const { return quant_; }
  const std::vector<StationState>& stations() const { return stations_; }
  bool station_locked(int i) const { return locked_[static_cast<std::size_t>(i)] != 0; }
  bool obss_busy(int k) const { return obss_busy_[k]; }
  bool tx_active(int k) const { return tx_remaining_ > 0 && tx_channel_ == k; }
  int overhead_pending_slots() const { return oh_remaining_; }
  int overhead_channel() const { return oh_target_; }
  bool switch_pending() const { return pending_launch_; }
  int last_tx_channel() const { return last_tx_channel_; }

  ChannelStatus channel_status(int k) const {
    if (obss_busy_[k]) return ChannelStatus::obss_busy;
    if (tx_remaining_ > 0 && tx_channel_ == k) return ChannelStatus::bss_tx;
    if (pending_launch_ && oh_remaining_ > 0 && oh_target_ == k) {
      return ChannelStatus::switch_overhead;
    }
    return ChannelStatus::idle;
  }

  void set_record_launches(bool on) { record_launches_ = on; }
  const std::vector<LaunchEvent>& launches() const { return launch_log_; }

 private:
  int stage_cap() const {
    int m = 0;
    int w = cfg_.cw_min;
    while (w < cfg_.cw_max) {
      w *= 2;
      ++m;
    }
    return m;
  }

  int cw_of(int stage) const {
    const long long w = static_cast<long long>(cfg_.cw_min) << stage;
    return static_cast<int>(std::min<long long>(w, cfg_.cw_max));
  }

  bool secondary_allowed() const {
    switch (cfg_.policy.kind) {
      case PolicyKind::legacy: return false;
      case PolicyKind::npca: return true;
      case PolicyKind::hybrid: return hybrid_npca_;
    }
    return false;
  }

  void tick_overhead() {
    --oh_remaining_;
    ++metrics_.channel[oh_target_].overhead_slots;
  }

  void progress_tx() {
    const int k = tx_channel_;
    ++metrics_.channel[k].bss_airtime_slots;
    if (k == 0 && tx_dup_) ++metrics_.channel[1].bss_airtime_slots;
    if (k == 1) ++metrics_.secondary_solo_airtime_slots;
    --tx_remaining_;
    if (tx_remaining_ == 0) complete_tx();
  }

  void complete_tx() {
    const int k = tx_channel_;
    const auto bits = static_cast<std::uint64_t>(cfg_.ampdu_bits());
    if (tx_success_) {
      ++metrics_.channel[k].success_count;
      metrics_.channel[k].successful_payload_bits += bits;
      if (k == 0 && tx_dup_) metrics_.channel[1].successful_payload_bits += bits;
    } else {
      ++metrics_.channel[k].collision_count;
    }
    for (int i : participants_) {
      StationState& st = stations_[static_cast<std::size_t>(i)];
      st.stage = tx_success_ ? 0 : std::min(st.stage + 1, max_stage_);
      st.counter = static_cast<int>(rng_station_.uniform_int(
          static_cast<std::uint32_t>(cw_of(st.stage))));
      locked_[static_cast<std::size_t>(i)] = 0;
    }
    participants_.clear();
    tx_success_ = false;
    tx_dup_ = false;
  }

  void backoff_step(int k) {
    transmit_set_.clear();
    for (std::size_t i = 0; i < stations_.size(); ++i) {
      if (!locked_[i] && stations_[i].counter == 0) {
        transmit_set_.push_back(static_cast<int>(i));
      }
    }
    if (transmit_set_.empty()) {
      for (std::size_t i = 0; i < stations_.size(); ++i) {
        if (!locked_[i]) --stations_[i].counter;
      }
      return;
    }
    if (last_tx_channel_ >= 0 && last_tx_channel_ != k &&
        quant_.switch_overhead_slots > 0) {
      // commit to the channel change: freeze for the synchronization cost,
      // then transmit over there
      pending_launch_ = true;
      oh_target_ = k;
      oh_remaining_ = quant_.switch_overhead_slots;
      tick_overhead();  // the arming slot is the first overhead slot
      return;
    }
    launch(k);
  }

  void launch(int k) {
    pending_launch_ = false;
    oh_remaining_ = 0;
    const bool success = transmit_set_.size() == 1;
    tx_channel_ = k;
    tx_remaining_ = success ? quant_.ts_slots : quant_.tc_slots;
    tx_success_ = success;
    tx_dup_ = (k == 0) && !obss_busy_[1];
    participants_ = transmit_set_;
    for (int i : participants_) locked_[static_cast<std::size_t>(i)] = 1;
    if (last_tx_channel_ >= 0 && last_tx_channel_ != k) ++metrics_.switch_count;
    last_tx_channel_ = k;
    if (record_launches_) launch_log_.push_back({slot_, k, success});
    progress_tx();  // the launch slot is the first busy slot
  }

  SimConfig cfg_;
  SlotQuantized quant_{};
  Rng rng_obss_[2];
  Rng rng_station_;
  ObssProcess obss_[2];
  std::vector<StationState> stations_;
  std::vector<std::uint8_t> locked_;
  std::vector<int> transmit_set_;
  std::vector<int> participants_;
  HybridEstimator hybrid_{};
  bool hybrid_npca_ = false;
  bool obss_busy_[2] = {false, false};
  int tx_channel_ = 0;
  int tx_remaining_ = 0;
  bool tx_success_ = false;
  bool tx_dup_ = false;
  bool pending_launch_ = false;
  int oh_target_ = 0;
  int oh_remaining_ = 0;
  int last_tx_channel_ = -1;
  int max_stage_ = 0;
  std::uint64_t slot_ = 0;
  SimMetrics metrics_{};
  bool record_launches_ = false;
  std::vector<LaunchEvent> launch_log_;
};

inline SimMetrics run_sim(const SimConfig& cfg) {
  SimWorld world(cfg);
  world.run();
  return world.metrics();
}

}  // namespace npca::sim
