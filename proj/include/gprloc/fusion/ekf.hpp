#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/keyval.hpp"
#include "gprloc/sim/scene.hpp"  // wrap_angle

namespace gprloc {

// State layout: [x, y, yaw, vx, vy, yaw_rate, ax, ay]. Velocities and
// accelerations are body-frame; position is world-frame.
enum StateIndex : int {
  kStX = 0,
  kStY = 1,
  kStYaw = 2,
  kStVx = 3,
  kStVy = 4,
  kStYawRate = 5,
  kStAx = 6,
  kStAy = 7,
};
inline constexpr int kStateDim = 8;

using Vector8d = Eigen::Matrix<double, kStateDim, 1>;
using Matrix8d = Eigen::Matrix<double, kStateDim, kStateDim>;

struct EkfState {
  Vector8d x = Vector8d::Zero();
  Matrix8d P = Matrix8d::Identity();
  double time = 0.0;
};

// Discrete constant-acceleration motion over dt, heading rotated into the
// world frame for the position integral.
inline Vector8d ekf_predict_mean(const Vector8d& x, double dt) {
  const double c = std::cos(x[kStYaw]);
  const double s = std::sin(x[kStYaw]);
  Vector8d out = x;
  out[kStX] += (c * x[kStVx] - s * x[kStVy]) * dt;
  out[kStY] += (s * x[kStVx] + c * x[kStVy]) * dt;
  out[kStYaw] = wrap_angle(x[kStYaw] + x[kStYawRate] * dt);
  out[kStVx] += x[kStAx] * dt;
  out[kStVy] += x[kStAy] * dt;
  return out;
}

inline Matrix8d ekf_predict_jacobian(const Vector8d& x, double dt) {
  const double c = std::cos(x[kStYaw]);
  const double s = std::sin(x[kStYaw]);
  Matrix8d f = Matrix8d::Identity();
  f(kStX, kStYaw) = (-s * x[kStVx] - c * x[kStVy]) * dt;
  f(kStX, kStVx) = c * dt;
  f(kStX, kStVy) = -s * dt;
  f(kStY, kStYaw) = (c * x[kStVx] - s * x[kStVy]) * dt;
  f(kStY, kStVx) = s * dt;
  f(kStY, kStVy) = c * dt;
  f(kStYaw, kStYawRate) = dt;
  f(kStVx, kStAx) = dt;
  f(kStVy, kStAy) = dt;
  return f;
}

namespace detail {

// Covariances must stay symmetric positive semidefinite. Numerical noise
// slightly below zero is repaired; anything worse is treated as divergence.
inline void enforce_psd(Matrix8d& p) {
  p = 0.5 * (p + p.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix8d> eig(p);
  const double min_eig = eig.eigenvalues().minCoeff();
  if (min_eig < -1e-9) throw NumericalError("covariance lost positive semidefiniteness");
  if (min_eig < 0.0) {
    Vector8d d = eig.eigenvalues().cwiseMax(0.0);
    p = eig.eigenvectors() * d.asDiagonal() * eig.eigenvectors().transpose();
    p = 0.5 * (p + p.transpose()).eval();
  }
}

}  // namespace detail

inline void ekf_predict(EkfState& st, double dt, const Vector8d& process_noise_diag) {
  if (dt < 0.0) throw InputError("ekf_predict: negative dt");
  if (dt == 0.0) return;
  const Matrix8d f = ekf_predict_jacobian(st.x, dt);
  st.x = ekf_predict_mean(st.x, dt);
  st.P = f * st.P * f.transpose() + Matrix8d(process_noise_diag.asDiagonal()) * dt;
  detail::enforce_psd(st.P);
  st.time += dt;
}

// Direct observation of a subset of state components. Rows flagged as
// angles get their innovation wrapped; rows with non-finite variance are
// dropped before the update.
struct LinearMeasurement {
  std::vector<int> indices;
  Eigen::VectorXd z;
  Eigen::MatrixXd cov;
  std::vector<bool> is_angle;
};

inline void ekf_update(EkfState& st, const LinearMeasurement& meas) {
  const auto m_all = static_cast<Eigen::Index>(meas.indices.size());
  if (meas.z.size() != m_all || meas.cov.rows() != m_all || meas.cov.cols() != m_all ||
      static_cast<Eigen::Index>(meas.is_angle.size()) != m_all)
    throw InputError("ekf_update: inconsistent measurement shape");

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < m_all; ++i)
    if (std::isfinite(meas.cov(i, i))) keep.push_back(i);
  if (keep.empty()) return;
  const auto m = static_cast<Eigen::Index>(keep.size());

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, kStateDim);
  Eigen::VectorXd innov(m);
  Eigen::MatrixXd r(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto src = keep[static_cast<std::size_t>(i)];
    const int idx = meas.indices[static_cast<std::size_t>(src)];
    if (idx < 0 || idx >= kStateDim) throw InputError("ekf_update: state index out of range");
    h(i, idx) = 1.0;
    const double diff = meas.z[src] - st.x[idx];
    innov[i] = meas.is_angle[static_cast<std::size_t>(src)] ? wrap_angle(diff) : diff;
    for (Eigen::Index j = 0; j < m; ++j) r(i, j) = meas.cov(src, keep[static_cast<std::size_t>(j)]);
  }

  const Eigen::MatrixXd pht = st.P * h.transpose();
  const Eigen::MatrixXd s_mat = h * pht + r;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(s_mat);
  if (ldlt.info() != Eigen::Success)
    throw NumericalError("ekf_update: innovation covariance not factorizable");
  const Eigen::MatrixXd k = ldlt.solve(pht.transpose()).transpose();

  st.x += k * innov;
  st.x[kStYaw] = wrap_angle(st.x[kStYaw]);

  // Joseph form keeps the update stable for small or zero gains.
  const Matrix8d ikh = Matrix8d::Identity() - k * h;
  st.P = ikh * st.P * ikh.transpose() + k * r * k.transpose();
  detail::enforce_psd(st.P);
}

struct EkfConfig {
  Vector8d process_noise_diag = (Vector8d() << 1e-6, 1e-6, 1e-6, 1e-3, 1e-4, 1e-3, 1e-2, 1e-3).finished();
  Vector8d init_cov_diag = (Vector8d() << 1e-4, 1e-4, 1e-4, 1e-2, 1e-4, 1e-3, 1e-2, 1e-3).finished();
  double init_x = 0.0;
  double init_y = 0.0;
  double init_yaw = 0.0;
  bool init_yaw_from_imu = true;

  double encoder_speed_sigma = 0.05;      // m/s
  double encoder_yaw_rate_sigma = 0.05;   // rad/s
  // Rolling constraint: wheels cannot slide sideways, so each encoder update
  // also measures zero body-lateral velocity. Without it that state is
  // unobservable and integrates accelerometer noise without bound. Infinity
  // disables the row.
  double lateral_velocity_sigma = 0.05;   // m/s
  double imu_yaw_sigma = 0.02;            // rad
  double imu_yaw_rate_sigma = 0.02;       // rad/s
  double imu_accel_sigma = 0.1;           // m/s^2

  double gpr_position_sigma = 0.03;       // m
  double gpr_turn_threshold = 0.1;        // rad/s
  double gpr_turn_factor = 25.0;          // variance inflation when turning

  double ticks_per_meter = 78000.0;
  double wheel_separation_m = 0.165;

  double output_rate_hz = 15.0;
  double reorder_window_s = 0.1;

  void validate() const {
    if ((process_noise_diag.array() < 0.0).any()) throw ConfigError("process noise must be >= 0");
    if ((init_cov_diag.array() < 0.0).any()) throw ConfigError("initial covariance must be >= 0");
    if (encoder_speed_sigma <= 0 || encoder_yaw_rate_sigma <= 0 || imu_yaw_sigma <= 0 ||
        imu_yaw_rate_sigma <= 0 || imu_accel_sigma <= 0 || gpr_position_sigma <= 0 ||
        lateral_velocity_sigma <= 0)
      throw ConfigError("measurement sigmas must be positive");
    if (gpr_turn_threshold < 0 || gpr_turn_factor < 1)
      throw ConfigError("turn inflation: threshold >= 0 and factor >= 1 required");
    if (ticks_per_meter <= 0 || wheel_separation_m <= 0)
      throw ConfigError("wheel geometry must be positive");
    if (output_rate_hz <= 0) throw ConfigError("output_rate_hz must be positive");
    if (reorder_window_s < 0) throw ConfigError("reorder_window_s must be >= 0");
  }
};

inline EkfConfig ekf_config_from_keyval(const std::map<std::string, std::string>& m) {
  EkfConfig c;
  auto vec8 = [&](const std::string& key, Vector8d fallback) {
    std::vector<double> def(fallback.data(), fallback.data() + kStateDim);
    auto v = kv_get_list(m, key, def);
    if (v.size() != kStateDim) throw ConfigError(key + " needs 8 entries");
    Vector8d out;
    for (int i = 0; i < kStateDim; ++i) out[i] = v[static_cast<std::size_t>(i)];
    return out;
  };
  c.process_noise_diag = vec8("process_noise_diag", c.process_noise_diag);
  c.init_cov_diag = vec8("init_cov_diag", c.init_cov_diag);
  c.init_x = kv_get(m, "init_x", c.init_x);
  c.init_y = kv_get(m, "init_y", c.init_y);
  c.init_yaw = kv_get(m, "init_yaw", c.init_yaw);
  c.init_yaw_from_imu = kv_get(m, "init_yaw_from_imu", c.init_yaw_from_imu);
  c.encoder_speed_sigma = kv_get(m, "encoder_speed_sigma", c.encoder_speed_sigma);
  c.encoder_yaw_rate_sigma = kv_get(m, "encoder_yaw_rate_sigma", c.encoder_yaw_rate_sigma);
  c.lateral_velocity_sigma = kv_get(m, "lateral_velocity_sigma", c.lateral_velocity_sigma);
  c.imu_yaw_sigma = kv_get(m, "imu_yaw_sigma", c.imu_yaw_sigma);
  c.imu_yaw_rate_sigma = kv_get(m, "imu_yaw_rate_sigma", c.imu_yaw_rate_sigma);
  c.imu_accel_sigma = kv_get(m, "imu_accel_sigma", c.imu_accel_sigma);
  c.gpr_position_sigma = kv_get(m, "gpr_position_sigma", c.gpr_position_sigma);
  c.gpr_turn_threshold = kv_get(m, "gpr_turn_threshold", c.gpr_turn_threshold);
  c.gpr_turn_factor = kv_get(m, "gpr_turn_factor", c.gpr_turn_factor);
  c.ticks_per_meter = kv_get(m, "ticks_per_meter", c.ticks_per_meter);
  c.wheel_separation_m = kv_get(m, "wheel_separation_m", c.wheel_separation_m);
  c.output_rate_hz = kv_get(m, "output_rate_hz", c.output_rate_hz);
  c.reorder_window_s = kv_get(m, "reorder_window_s", c.reorder_window_s);
  c.validate();
  return c;
}

inline EkfConfig load_ekf_config(const std::string& path) {
  return ekf_config_from_keyval(KeyValDoc::load(path).root);
}

}  // namespace gprloc
