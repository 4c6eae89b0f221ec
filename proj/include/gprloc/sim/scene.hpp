#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/sensors.hpp"
#include "gprloc/io/keyval.hpp"

namespace gprloc {

// Point reflector in the subsurface half-space. Positions are along-track
// meters; scenes are 2D slices under the path of travel.
struct Scatterer {
  double x = 0.0;
  double depth = 0.5;
  double permittivity = 9.0;       // inside the reflector
  double permittivity_host = 0.0;  // 0 means "use the scene host value"
};

struct ScatterScene {
  std::vector<Scatterer> scatterers;
  double host_permittivity = 4.0;
  double source_amplitude = 20.0;      // mV at 1 m range
  double direct_wave_amplitude = 10.0; // mV
  double center_frequency_ghz = 0.5;
  std::vector<double> wow_coefficients = {0.0, 0.0, 0.0, 0.0};  // mV per index^p
  double noise_sigma = 0.0;            // mV
  double sample_dt_ns = 0.1334;
  int trace_samples = 200;

  void validate() const {
    if (host_permittivity < 1.0) throw ConfigError("host_permittivity must be >= 1");
    if (trace_samples < 16) throw ConfigError("trace_samples must be >= 16");
    if (sample_dt_ns <= 0.0) throw ConfigError("sample_dt_ns must be positive");
    if (center_frequency_ghz <= 0.0) throw ConfigError("center_frequency_ghz must be positive");
    if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
    if (wow_coefficients.size() > 4) throw ConfigError("wow polynomial is cubic at most");
    for (const auto& s : scatterers) {
      if (s.depth <= 0.0) throw ConfigError("scatterer depth must be positive");
      if (s.permittivity < 1.0) throw ConfigError("scatterer permittivity must be >= 1");
      if (s.permittivity_host != 0.0 && s.permittivity_host < 1.0)
        throw ConfigError("scatterer host permittivity must be >= 1");
    }
  }
};

struct Waypoint {
  double time = 0.0;
  double x = 0.0;
  double y = 0.0;
  double yaw = 0.0;
  bool yaw_given = false;
  double slip = -1.0;  // negative means "use the profile default"
};

struct MotionProfile {
  std::vector<Waypoint> waypoints;
  double gpr_rate_hz = 1.67;
  double slip_ratio = 0.0;  // fraction of wheel travel that is spin, not motion
  double encoder_ticks_per_meter = 78000.0;
  double wheel_separation_m = 0.165;
  double wheel_radius_m = 0.5455;
  double encoder_rate_hz = 15.0;
  double imu_rate_hz = 15.0;
  double imu_yaw_sigma = 0.0;
  double imu_yaw_rate_sigma = 0.0;
  double imu_accel_sigma = 0.0;
  // Heading-reference drift: the IMU yaw channel random-walks at this rate
  // (rad per sqrt(s)), the way gyro-integrated heading does without an
  // absolute reference. Zero keeps the channel drift-free.
  double imu_yaw_drift_sigma = 0.0;
  // Micro-slip: the slip ratio fluctuates around the commanded value with
  // this sigma, redrawn every slip_jitter_period_s of drive time. Models
  // grain-scale traction variation; affects the encoders only.
  double slip_jitter_sigma = 0.0;
  double slip_jitter_period_s = 5.0;

  void validate() const {
    if (waypoints.size() < 2) throw ConfigError("motion profile needs at least 2 waypoints");
    for (std::size_t i = 1; i < waypoints.size(); ++i)
      if (!(waypoints[i].time > waypoints[i - 1].time))
        throw ConfigError("waypoint times must be strictly increasing");
    if (gpr_rate_hz <= 0 || encoder_rate_hz <= 0 || imu_rate_hz <= 0)
      throw ConfigError("sensor rates must be positive");
    if (slip_ratio < 0.0 || slip_ratio >= 1.0) throw ConfigError("slip_ratio must be in [0, 1)");
    for (const auto& w : waypoints)
      if (w.slip >= 1.0) throw ConfigError("waypoint slip must be below 1");
    if (encoder_ticks_per_meter <= 0) throw ConfigError("encoder_ticks_per_meter must be positive");
    if (wheel_separation_m <= 0) throw ConfigError("wheel_separation_m must be positive");
    if (wheel_radius_m <= 0) throw ConfigError("wheel_radius_m must be positive");
    if (imu_yaw_sigma < 0 || imu_yaw_rate_sigma < 0 || imu_accel_sigma < 0)
      throw ConfigError("imu noise sigmas must be >= 0");
    if (imu_yaw_drift_sigma < 0) throw ConfigError("imu_yaw_drift_sigma must be >= 0");
    if (slip_jitter_sigma < 0) throw ConfigError("slip_jitter_sigma must be >= 0");
    if (slip_jitter_period_s <= 0) throw ConfigError("slip_jitter_period_s must be positive");
  }
};

inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  if (a > std::numbers::pi) a -= 2.0 * std::numbers::pi;
  if (a <= -std::numbers::pi) a += 2.0 * std::numbers::pi;
  return a;
}

// Piecewise-linear path through the waypoints: constant velocity and yaw
// rate inside each segment. Yaw interpolates along the shortest arc.
class PathSampler {
 public:
  explicit PathSampler(const MotionProfile& profile) : profile_(&profile) {
    profile.validate();
    const auto& wp = profile.waypoints;
    cum_.resize(wp.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 1; i < wp.size(); ++i) {
      total += std::hypot(wp[i].x - wp[i - 1].x, wp[i].y - wp[i - 1].y);
      cum_[i] = total;
    }
    if (total <= 0.0) throw ConfigError("motion path has zero length");
    fill_missing_yaw();
  }

  double t_begin() const { return profile_->waypoints.front().time; }
  double t_end() const { return profile_->waypoints.back().time; }
  double total_length() const { return cum_.back(); }

  Pose pose_at(double t) const {
    const auto [i, u] = locate(t);
    const auto& a = profile_->waypoints[i];
    const auto& b = profile_->waypoints[i + 1];
    Pose p;
    p.timestamp = t;
    p.x = a.x + u * (b.x - a.x);
    p.y = a.y + u * (b.y - a.y);
    p.yaw = wrap_angle(yaw_[i] + u * wrap_angle(yaw_[i + 1] - yaw_[i]));
    return p;
  }

  double arc_length_at(double t) const {
    const auto [i, u] = locate(t);
    return cum_[i] + u * (cum_[i + 1] - cum_[i]);
  }

  double speed_at(double t) const {
    const auto [i, u] = locate(t);
    (void)u;
    return (cum_[i + 1] - cum_[i]) / segment_dt(i);
  }

  double yaw_rate_at(double t) const {
    const auto [i, u] = locate(t);
    (void)u;
    return wrap_angle(yaw_[i + 1] - yaw_[i]) / segment_dt(i);
  }

  double slip_at(double t) const {
    const auto [i, u] = locate(t);
    (void)u;
    const double s = profile_->waypoints[i].slip;
    return s < 0.0 ? profile_->slip_ratio : s;
  }

 private:
  std::pair<std::size_t, double> locate(double t) const {
    const auto& wp = profile_->waypoints;
    t = std::clamp(t, wp.front().time, wp.back().time);
    std::size_t i = 0;
    while (i + 2 < wp.size() && t >= wp[i + 1].time) ++i;
    const double u = (t - wp[i].time) / segment_dt(i);
    return {i, std::clamp(u, 0.0, 1.0)};
  }

  double segment_dt(std::size_t i) const {
    return profile_->waypoints[i + 1].time - profile_->waypoints[i].time;
  }

  // Waypoints without an explicit heading take the tangent of the adjacent
  // segment, so default truth yaw and simulated IMU yaw agree.
  void fill_missing_yaw() {
    const auto& wp = profile_->waypoints;
    yaw_.resize(wp.size());
    std::vector<double> tangent(wp.size() - 1, 0.0);
    double last = 0.0;
    for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
      const double dx = wp[i + 1].x - wp[i].x;
      const double dy = wp[i + 1].y - wp[i].y;
      if (dx != 0.0 || dy != 0.0) last = std::atan2(dy, dx);
      tangent[i] = last;
    }
    for (std::size_t i = 0; i < wp.size(); ++i) {
      if (wp[i].yaw_given)
        yaw_[i] = wp[i].yaw;
      else
        yaw_[i] = tangent[std::min(i, tangent.size() - 1)];
    }
  }

  const MotionProfile* profile_;
  std::vector<double> cum_;
  std::vector<double> yaw_;
};

inline ScatterScene load_scene(const std::string& path) {
  auto doc = KeyValDoc::load(path);
  ScatterScene s;
  s.host_permittivity = kv_get(doc.root, "host_permittivity", s.host_permittivity);
  s.source_amplitude = kv_get(doc.root, "source_amplitude", s.source_amplitude);
  s.direct_wave_amplitude = kv_get(doc.root, "direct_wave_amplitude", s.direct_wave_amplitude);
  s.center_frequency_ghz = kv_get(doc.root, "center_frequency_ghz", s.center_frequency_ghz);
  s.wow_coefficients = kv_get_list(doc.root, "wow_coefficients", s.wow_coefficients);
  s.noise_sigma = kv_get(doc.root, "noise_sigma", s.noise_sigma);
  s.sample_dt_ns = kv_get(doc.root, "sample_dt_ns", s.sample_dt_ns);
  s.trace_samples = kv_get(doc.root, "trace_samples", s.trace_samples);
  for (const auto& sec : doc.sections) {
    if (sec.name != "scatterer") throw ConfigError(path + ": unknown section [" + sec.name + "]");
    Scatterer sc;
    sc.x = kv_require(sec.values, "x");
    sc.depth = kv_require(sec.values, "depth");
    sc.permittivity = kv_require(sec.values, "permittivity");
    sc.permittivity_host = kv_get(sec.values, "permittivity_host", 0.0);
    s.scatterers.push_back(sc);
  }
  s.validate();
  return s;
}

inline MotionProfile load_motion(const std::string& path) {
  auto doc = KeyValDoc::load(path);
  MotionProfile m;
  m.gpr_rate_hz = kv_get(doc.root, "gpr_rate_hz", m.gpr_rate_hz);
  m.slip_ratio = kv_get(doc.root, "slip_ratio", m.slip_ratio);
  m.encoder_ticks_per_meter = kv_get(doc.root, "encoder_ticks_per_meter", m.encoder_ticks_per_meter);
  m.wheel_separation_m = kv_get(doc.root, "wheel_separation_m", m.wheel_separation_m);
  m.wheel_radius_m = kv_get(doc.root, "wheel_radius_m", m.wheel_radius_m);
  m.encoder_rate_hz = kv_get(doc.root, "encoder_rate_hz", m.encoder_rate_hz);
  m.imu_rate_hz = kv_get(doc.root, "imu_rate_hz", m.imu_rate_hz);
  m.imu_yaw_sigma = kv_get(doc.root, "imu_yaw_sigma", m.imu_yaw_sigma);
  m.imu_yaw_rate_sigma = kv_get(doc.root, "imu_yaw_rate_sigma", m.imu_yaw_rate_sigma);
  m.imu_accel_sigma = kv_get(doc.root, "imu_accel_sigma", m.imu_accel_sigma);
  m.imu_yaw_drift_sigma = kv_get(doc.root, "imu_yaw_drift_sigma", m.imu_yaw_drift_sigma);
  m.slip_jitter_sigma = kv_get(doc.root, "slip_jitter_sigma", m.slip_jitter_sigma);
  m.slip_jitter_period_s = kv_get(doc.root, "slip_jitter_period_s", m.slip_jitter_period_s);
  for (const auto& sec : doc.sections) {
    if (sec.name != "waypoint") throw ConfigError(path + ": unknown section [" + sec.name + "]");
    Waypoint w;
    w.time = kv_require(sec.values, "time");
    w.x = kv_require(sec.values, "x");
    w.y = kv_require(sec.values, "y");
    if (kv_has(sec.values, "yaw")) {
      w.yaw = kv_require(sec.values, "yaw");
      w.yaw_given = true;
    }
    w.slip = kv_get(sec.values, "slip", -1.0);
    m.waypoints.push_back(w);
  }
  m.validate();
  return m;
}

}  // namespace gprloc
