#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "gprloc/core/rng.hpp"
#include "gprloc/core/sensors.hpp"
#include "gprloc/core/trace.hpp"
#include "gprloc/sim/radargram.hpp"
#include "gprloc/sim/scene.hpp"

namespace gprloc {

struct SimSequence {
  std::vector<Trace> traces;
  std::vector<Pose> truth;          // at trace timestamps
  std::vector<double> truth_step;   // arc length between consecutive traces
  std::vector<EncoderSample> encoders;
  std::vector<ImuSample> imu;
};

namespace detail {

// Reported (slipping) wheel travel, accumulated over the piecewise-constant
// segments. Slip inflates spin: reported = true / (1 - slip). With slip
// jitter enabled, each segment is integrated on a sub-grid whose cells redraw
// the slip around the commanded value; the jitter stream is part of the
// sequence seed, so reruns stay bit-identical.
class WheelIntegrator {
 public:
  WheelIntegrator(const MotionProfile& profile, const PathSampler& path, std::uint64_t seed)
      : profile_(&profile), path_(&path) {
    const auto& wp = profile.waypoints;
    GaussianStream jitter(hash_mix(seed, 0x736c6970ull));
    knots_.push_back(wp.front().time);
    cum_l_.push_back(0.0);
    cum_r_.push_back(0.0);
    const double half_track = 0.5 * profile.wheel_separation_m;
    for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
      const double seg_dt = wp[i + 1].time - wp[i].time;
      const int cells = profile.slip_jitter_sigma > 0.0
                            ? std::max(1, static_cast<int>(std::ceil(
                                              seg_dt / profile.slip_jitter_period_s)))
                            : 1;
      const double cell_dt = seg_dt / cells;
      for (int c = 0; c < cells; ++c) {
        const double mid = wp[i].time + (c + 0.5) * cell_dt;
        const double v = path.speed_at(mid);
        const double w = path.yaw_rate_at(mid);
        double slip = path.slip_at(mid);
        if (profile.slip_jitter_sigma > 0.0)
          slip = std::min(slip + profile.slip_jitter_sigma * jitter.next(), 0.95);
        const double gain = 1.0 / (1.0 - slip);
        knots_.push_back(wp[i].time + (c + 1) * cell_dt);
        cum_l_.push_back(cum_l_.back() + (v - w * half_track) * gain * cell_dt);
        cum_r_.push_back(cum_r_.back() + (v + w * half_track) * gain * cell_dt);
      }
    }
  }

  double left_at(double t) const { return interp(cum_l_, t); }
  double right_at(double t) const { return interp(cum_r_, t); }

 private:
  double interp(const std::vector<double>& cum, double t) const {
    if (t <= knots_.front()) return cum.front();
    if (t >= knots_.back()) return cum.back();
    std::size_t i = 0;
    while (i + 2 < knots_.size() && t >= knots_[i + 1]) ++i;
    const double u = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
    return cum[i] + u * (cum[i + 1] - cum[i]);
  }

  const MotionProfile* profile_;
  const PathSampler* path_;
  std::vector<double> knots_;
  std::vector<double> cum_l_, cum_r_;
};

}  // namespace detail

// Simulates one drive: radargram traces along the path plus encoder and IMU
// streams. All randomness comes from the seed; reruns are bit-identical.
inline SimSequence generate_sequence(const ScatterScene& scene, const MotionProfile& profile,
                                     std::uint64_t seed) {
  scene.validate();
  PathSampler path(profile);
  SimSequence seq;

  GaussianStream trace_noise(hash_mix(seed, 0x7261646172ull));
  GaussianStream imu_noise(hash_mix(seed, 0x696d75ull));

  // GPR traces, one per tick of the radar clock.
  const double gpr_dt = 1.0 / profile.gpr_rate_hz;
  for (double t = path.t_begin(); t <= path.t_end() + 1e-9; t += gpr_dt) {
    Trace tr;
    tr.timestamp = t;
    tr.samples = trace_response(scene, path.arc_length_at(t), &trace_noise);
    seq.traces.push_back(std::move(tr));
    seq.truth.push_back(path.pose_at(t));
  }
  if (seq.traces.size() < 2) throw ConfigError("motion profile too short for the radar rate");
  seq.truth_step.resize(seq.traces.size() - 1);
  for (std::size_t i = 0; i + 1 < seq.traces.size(); ++i)
    seq.truth_step[i] = path.arc_length_at(seq.traces[i + 1].timestamp) -
                        path.arc_length_at(seq.traces[i].timestamp);

  // Encoders: cumulative tick counts of the reported wheel travel. Front
  // and rear wheels share a track, so the pairs match.
  detail::WheelIntegrator wheels(profile, path, seed);
  const double enc_dt = 1.0 / profile.encoder_rate_hz;
  for (double t = path.t_begin(); t <= path.t_end() + 1e-9; t += enc_dt) {
    EncoderSample e;
    e.timestamp = t;
    e.front_left = e.rear_left =
        static_cast<std::int64_t>(std::floor(wheels.left_at(t) * profile.encoder_ticks_per_meter));
    e.front_right = e.rear_right =
        static_cast<std::int64_t>(std::floor(wheels.right_at(t) * profile.encoder_ticks_per_meter));
    seq.encoders.push_back(e);
  }

  // IMU: heading from the path, acceleration by double-differencing the
  // position, rotated into the body frame. The heading channel optionally
  // random-walks, like gyro-integrated yaw without an absolute reference.
  const double imu_dt = 1.0 / profile.imu_rate_hz;
  double yaw_drift = 0.0;
  const double drift_step = profile.imu_yaw_drift_sigma * std::sqrt(imu_dt);
  for (double t = path.t_begin(); t <= path.t_end() + 1e-9; t += imu_dt) {
    ImuSample s;
    s.timestamp = t;
    const Pose p = path.pose_at(t);
    const double h = imu_dt;
    const double t_m = std::max(t - h, path.t_begin());
    const double t_p = std::min(t + h, path.t_end());
    const Pose pm = path.pose_at(t_m);
    const Pose pp = path.pose_at(t_p);
    const double span = t_p - t_m;
    double ax_world = 0.0, ay_world = 0.0;
    if (span > 0.0) {
      const double half = 0.5 * span;
      ax_world = (pp.x - 2.0 * path.pose_at(t_m + half).x + pm.x) / (half * half);
      ay_world = (pp.y - 2.0 * path.pose_at(t_m + half).y + pm.y) / (half * half);
    }
    const double c = std::cos(p.yaw), sn = std::sin(p.yaw);
    if (drift_step > 0.0) yaw_drift += drift_step * imu_noise.next();
    s.yaw = wrap_angle(p.yaw + yaw_drift + profile.imu_yaw_sigma * imu_noise.next());
    s.yaw_rate = path.yaw_rate_at(t) + profile.imu_yaw_rate_sigma * imu_noise.next();
    s.accel_x = c * ax_world + sn * ay_world + profile.imu_accel_sigma * imu_noise.next();
    s.accel_y = -sn * ax_world + c * ay_world + profile.imu_accel_sigma * imu_noise.next();
    seq.imu.push_back(s);
  }

  return seq;
}

}  // namespace gprloc
