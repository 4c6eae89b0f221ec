#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/sensors.hpp"
#include "gprloc/fusion/ekf.hpp"
#include "gprloc/fusion/measurements.hpp"

namespace gprloc {

// One radar-derived displacement step: distance traveled over the interval
// ending at `timestamp`, meters.
struct GprStep {
  double timestamp = 0.0;
  double displacement = 0.0;
};

struct SensorLog {
  std::vector<EncoderSample> encoders;
  std::vector<ImuSample> imu;
  std::vector<GprStep> gpr_steps;
};

struct RunResult {
  std::vector<Pose> trajectory;  // fixed-rate filter output
  std::size_t dropped_events = 0;
  EkfState final_state;
};

namespace detail {

enum class EventKind : int { kEncoder = 0, kImu = 1, kGpr = 2 };

struct Event {
  double time;
  EventKind kind;
  std::size_t index;  // position in the source stream
};

// Ordering inside the reorder buffer: by time, then by a fixed sensor
// priority, then by stream position, so replay order is deterministic even
// with coincident timestamps.
struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return static_cast<int>(a.kind) > static_cast<int>(b.kind);
    return a.index > b.index;
  }
};

// Runs one fusion pass over a sensor log. Events are pushed in arrival
// order into a small time-sorted buffer that absorbs out-of-order arrivals
// up to `reorder_window_s`; anything later than that is dropped.
class FilterRunner {
 public:
  FilterRunner(const SensorLog& log, const EkfConfig& cfg, bool use_gpr)
      : log_(log), cfg_(cfg), use_gpr_(use_gpr) {
    st_.x[kStX] = cfg.init_x;
    st_.x[kStY] = cfg.init_y;
    st_.x[kStYaw] = cfg.init_yaw;
    if (cfg.init_yaw_from_imu && !log.imu.empty()) st_.x[kStYaw] = wrap_angle(log.imu.front().yaw);
    st_.P = cfg.init_cov_diag.asDiagonal();
  }

  RunResult run() {
    std::vector<Event> arrivals = merge_arrivals();
    if (arrivals.empty()) throw InputError("run_filter: empty sensor log");

    st_.time = arrivals.front().time;
    next_emit_ = arrivals.front().time;
    double frontier = arrivals.front().time;

    std::priority_queue<Event, std::vector<Event>, EventAfter> pending;
    for (const Event& ev : arrivals) {
      frontier = std::max(frontier, ev.time);
      pending.push(ev);
      while (!pending.empty() && frontier - pending.top().time >= cfg_.reorder_window_s) {
        deliver(pending.top());
        pending.pop();
      }
    }
    while (!pending.empty()) {
      deliver(pending.top());
      pending.pop();
    }
    emit_until(frontier);

    RunResult out;
    out.trajectory = std::move(trajectory_);
    out.dropped_events = dropped_;
    out.final_state = st_;
    return out;
  }

 private:
  // Interleaves the per-sensor streams into a single arrival sequence.
  // Streams are consumed in their stored order; heads are compared by
  // timestamp, so a time-sorted log replays in time order while a disordered
  // one reproduces its disorder for the reorder buffer to deal with.
  std::vector<Event> merge_arrivals() const {
    std::vector<Event> out;
    out.reserve(log_.encoders.size() + log_.imu.size() + (use_gpr_ ? log_.gpr_steps.size() : 0));
    std::size_t ie = 0, ii = 0, ig = 0;
    const std::size_t ng = use_gpr_ ? log_.gpr_steps.size() : 0;
    while (ie < log_.encoders.size() || ii < log_.imu.size() || ig < ng) {
      const double te =
          ie < log_.encoders.size() ? log_.encoders[ie].timestamp : std::numeric_limits<double>::infinity();
      const double ti = ii < log_.imu.size() ? log_.imu[ii].timestamp : std::numeric_limits<double>::infinity();
      const double tg = ig < ng ? log_.gpr_steps[ig].timestamp : std::numeric_limits<double>::infinity();
      if (te <= ti && te <= tg) {
        out.push_back({te, EventKind::kEncoder, ie++});
      } else if (ti <= tg) {
        out.push_back({ti, EventKind::kImu, ii++});
      } else {
        out.push_back({tg, EventKind::kGpr, ig++});
      }
    }
    return out;
  }

  void emit_until(double t) {
    while (next_emit_ <= t) {
      advance(next_emit_);
      trajectory_.push_back({next_emit_, st_.x[kStX], st_.x[kStY], st_.x[kStYaw]});
      next_emit_ += 1.0 / cfg_.output_rate_hz;
    }
  }

  void advance(double t) {
    const double dt = t - st_.time;
    if (dt > 0.0) ekf_predict(st_, dt, cfg_.process_noise_diag);
  }

  void deliver(const Event& ev) {
    if (ev.time < st_.time) {
      ++dropped_;
      return;
    }
    // Scheduled outputs strictly before this event come first; an output at
    // exactly the event time is held back until the update has been applied.
    while (next_emit_ < ev.time) {
      advance(next_emit_);
      trajectory_.push_back({next_emit_, st_.x[kStX], st_.x[kStY], st_.x[kStYaw]});
      next_emit_ += 1.0 / cfg_.output_rate_hz;
    }
    advance(ev.time);
    switch (ev.kind) {
      case EventKind::kEncoder:
        handle_encoder(log_.encoders[ev.index]);
        break;
      case EventKind::kImu:
        ekf_update(st_, imu_measurement(log_.imu[ev.index], cfg_));
        break;
      case EventKind::kGpr:
        handle_gpr(log_.gpr_steps[ev.index]);
        break;
    }
  }

  void handle_encoder(const EncoderSample& sample) {
    if (have_prev_encoder_ && sample.timestamp > prev_encoder_.timestamp) {
      const WheelOdometry odo =
          wheel_odometry(prev_encoder_, sample, cfg_.ticks_per_meter, cfg_.wheel_separation_m);
      ekf_update(st_, wheel_measurement(odo, cfg_));
    }
    prev_encoder_ = sample;
    have_prev_encoder_ = true;
  }

  // Relative radar displacements are chained into a pseudo-position track.
  // The chain is anchored at the filter pose when the first step arrives;
  // each step extends it along the current heading estimate and the result
  // is fused as a position fix, de-weighted while the rover is turning.
  void handle_gpr(const GprStep& step) {
    if (!gpr_anchored_) {
      gpr_x_ = st_.x[kStX];
      gpr_y_ = st_.x[kStY];
      gpr_anchored_ = true;
      return;
    }
    gpr_x_ += step.displacement * std::cos(st_.x[kStYaw]);
    gpr_y_ += step.displacement * std::sin(st_.x[kStYaw]);
    const double var = gpr_position_variance(st_.x[kStYawRate], cfg_);
    ekf_update(st_, gpr_measurement(gpr_x_, gpr_y_, var));
  }

  const SensorLog& log_;
  EkfConfig cfg_;
  bool use_gpr_;
  EkfState st_;
  std::vector<Pose> trajectory_;
  double next_emit_ = 0.0;
  std::size_t dropped_ = 0;
  EncoderSample prev_encoder_{};
  bool have_prev_encoder_ = false;
  double gpr_x_ = 0.0, gpr_y_ = 0.0;
  bool gpr_anchored_ = false;
};

}  // namespace detail

inline RunResult run_filter(const SensorLog& log, const EkfConfig& cfg, bool use_gpr = true) {
  cfg.validate();
  detail::FilterRunner runner(log, cfg, use_gpr);
  return runner.run();
}

}  // namespace gprloc
