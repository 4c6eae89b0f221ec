#pragma once

#include <cmath>

#include "gprloc/core/error.hpp"
#include "gprloc/core/sensors.hpp"
#include "gprloc/fusion/ekf.hpp"

namespace gprloc {

struct WheelOdometry {
  double timestamp = 0.0;
  double speed = 0.0;     // forward body speed, m/s
  double yaw_rate = 0.0;  // rad/s
};

// Differential odometry from consecutive encoder samples. Front and rear
// ticks on a side are averaged before differencing.
inline WheelOdometry wheel_odometry(const EncoderSample& prev, const EncoderSample& cur,
                                    double ticks_per_meter, double wheel_separation_m) {
  const double dt = cur.timestamp - prev.timestamp;
  if (dt <= 0.0) throw InputError("wheel_odometry: non-increasing encoder timestamps");
  const double left = 0.5 * (static_cast<double>(cur.front_left - prev.front_left) +
                             static_cast<double>(cur.rear_left - prev.rear_left));
  const double right = 0.5 * (static_cast<double>(cur.front_right - prev.front_right) +
                              static_cast<double>(cur.rear_right - prev.rear_right));
  const double v_l = left / ticks_per_meter / dt;
  const double v_r = right / ticks_per_meter / dt;
  WheelOdometry out;
  out.timestamp = cur.timestamp;
  out.speed = 0.5 * (v_l + v_r);
  out.yaw_rate = (v_r - v_l) / wheel_separation_m;
  return out;
}

inline LinearMeasurement wheel_measurement(const WheelOdometry& odo, const EkfConfig& cfg) {
  LinearMeasurement m;
  // Third row is the rolling constraint: zero sideways velocity in the body
  // frame. An infinite sigma turns it into a no-op row.
  m.indices = {kStVx, kStYawRate, kStVy};
  m.z = Eigen::Vector3d(odo.speed, odo.yaw_rate, 0.0);
  m.cov = Eigen::Vector3d(cfg.encoder_speed_sigma * cfg.encoder_speed_sigma,
                          cfg.encoder_yaw_rate_sigma * cfg.encoder_yaw_rate_sigma,
                          cfg.lateral_velocity_sigma * cfg.lateral_velocity_sigma)
              .asDiagonal();
  m.is_angle = {false, false, false};
  return m;
}

inline LinearMeasurement imu_measurement(const ImuSample& imu, const EkfConfig& cfg) {
  LinearMeasurement m;
  m.indices = {kStYaw, kStYawRate, kStAx, kStAy};
  m.z = Eigen::Vector4d(imu.yaw, imu.yaw_rate, imu.accel_x, imu.accel_y);
  m.cov = Eigen::Vector4d(cfg.imu_yaw_sigma * cfg.imu_yaw_sigma,
                          cfg.imu_yaw_rate_sigma * cfg.imu_yaw_rate_sigma,
                          cfg.imu_accel_sigma * cfg.imu_accel_sigma,
                          cfg.imu_accel_sigma * cfg.imu_accel_sigma)
              .asDiagonal();
  m.is_angle = {true, false, false, false};
  return m;
}

// Radar displacement is reliable when driving straight; while turning the
// antenna sweeps across the ground texture and the estimate degrades, so its
// variance is inflated above a yaw-rate threshold.
inline double gpr_position_variance(double yaw_rate_est, const EkfConfig& cfg) {
  double var = cfg.gpr_position_sigma * cfg.gpr_position_sigma;
  if (std::abs(yaw_rate_est) > cfg.gpr_turn_threshold) var *= cfg.gpr_turn_factor;
  return var;
}

inline LinearMeasurement gpr_measurement(double x, double y, double variance) {
  LinearMeasurement m;
  m.indices = {kStX, kStY};
  m.z = Eigen::Vector2d(x, y);
  m.cov = Eigen::Vector2d(variance, variance).asDiagonal();
  m.is_angle = {false, false};
  return m;
}

}  // namespace gprloc
