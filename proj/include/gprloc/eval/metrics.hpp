#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/sensors.hpp"
#include "gprloc/sim/scene.hpp"

namespace gprloc {

// One window regression: `value` is the displacement over `span` motion
// steps starting at step `start`.
struct WindowPrediction {
  int start = 0;
  int span = 1;
  double value = 0.0;
};

struct StepEstimates {
  std::vector<double> value;
  std::vector<std::uint8_t> covered;
};

// Spreads each window uniformly over the steps it covers and averages the
// contributions per step. Steps no window touches stay uncovered.
inline StepEstimates overlap_add(std::span<const WindowPrediction> windows, int n_steps) {
  if (n_steps < 0) throw InputError("overlap_add: negative step count");
  StepEstimates out;
  out.value.assign(static_cast<std::size_t>(n_steps), 0.0);
  out.covered.assign(static_cast<std::size_t>(n_steps), 0);
  std::vector<std::uint32_t> count(static_cast<std::size_t>(n_steps), 0);
  for (const auto& w : windows) {
    if (w.span < 1) throw InputError("overlap_add: window span must be >= 1");
    if (w.start < 0 || w.start + w.span > n_steps)
      throw InputError("overlap_add: window outside step range");
    const double share = w.value / static_cast<double>(w.span);
    for (int s = w.start; s < w.start + w.span; ++s) {
      out.value[static_cast<std::size_t>(s)] += share;
      ++count[static_cast<std::size_t>(s)];
    }
  }
  for (std::size_t s = 0; s < out.value.size(); ++s) {
    if (count[s] > 0) {
      out.value[s] /= static_cast<double>(count[s]);
      out.covered[s] = 1;
    }
  }
  return out;
}

inline double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("rmse: length mismatch");
  if (a.empty()) throw InputError("rmse: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(a.size()));
}

// Per-step displacement error in millimeters, over covered steps only.
inline double rmse_mm(std::span<const double> truth_m, const StepEstimates& est) {
  if (truth_m.size() != est.value.size()) throw InputError("rmse_mm: length mismatch");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < truth_m.size(); ++i) {
    if (!est.covered[i]) continue;
    const double d = est.value[i] - truth_m[i];
    acc += d * d;
    ++n;
  }
  if (n == 0) throw NumericalError("rmse_mm: no covered steps");
  return 1000.0 * std::sqrt(acc / static_cast<double>(n));
}

enum class AteAlignment { yaw_about_start, none };

namespace detail {

inline Pose interp_pose(const std::vector<Pose>& traj, double t) {
  std::size_t i = 0;
  while (i + 2 < traj.size() && traj[i + 1].timestamp <= t) ++i;
  const Pose& a = traj[i];
  const Pose& b = traj[i + 1];
  const double span = b.timestamp - a.timestamp;
  const double u = span > 0.0 ? (t - a.timestamp) / span : 0.0;
  Pose p;
  p.timestamp = t;
  p.x = a.x + u * (b.x - a.x);
  p.y = a.y + u * (b.y - a.y);
  p.yaw = wrap_angle(a.yaw + u * wrap_angle(b.yaw - a.yaw));
  return p;
}

}  // namespace detail

// Absolute trajectory error in meters. The estimate is resampled at the
// truth timestamps inside the common time span. With yaw alignment the
// estimate is anchored at the truth's start position and rotated about it
// by the single angle that best fits the truth (closed form).
inline double rmse_ate(const std::vector<Pose>& truth, const std::vector<Pose>& est,
                       AteAlignment align = AteAlignment::yaw_about_start) {
  if (truth.size() < 2 || est.size() < 2) throw InputError("rmse_ate: need at least 2 poses");
  const double t_lo = std::max(truth.front().timestamp, est.front().timestamp);
  const double t_hi = std::min(truth.back().timestamp, est.back().timestamp);
  if (!(t_hi > t_lo)) throw InputError("rmse_ate: trajectories do not overlap in time");

  std::vector<Pose> t_pts, e_pts;
  for (const auto& p : truth) {
    if (p.timestamp < t_lo || p.timestamp > t_hi) continue;
    t_pts.push_back(p);
    e_pts.push_back(detail::interp_pose(est, p.timestamp));
  }
  if (t_pts.size() < 2) throw InputError("rmse_ate: fewer than 2 common samples");

  if (align == AteAlignment::none) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t_pts.size(); ++i) {
      const double dx = e_pts[i].x - t_pts[i].x;
      const double dy = e_pts[i].y - t_pts[i].y;
      acc += dx * dx + dy * dy;
    }
    return std::sqrt(acc / static_cast<double>(t_pts.size()));
  }

  const double ex0 = e_pts.front().x, ey0 = e_pts.front().y;
  const double tx0 = t_pts.front().x, ty0 = t_pts.front().y;
  double sin_acc = 0.0, cos_acc = 0.0;
  for (std::size_t i = 0; i < t_pts.size(); ++i) {
    const double wx = e_pts[i].x - ex0, wy = e_pts[i].y - ey0;
    const double ux = t_pts[i].x - tx0, uy = t_pts[i].y - ty0;
    sin_acc += wx * uy - wy * ux;
    cos_acc += wx * ux + wy * uy;
  }
  const double theta = (sin_acc == 0.0 && cos_acc == 0.0) ? 0.0 : std::atan2(sin_acc, cos_acc);
  const double c = std::cos(theta), s = std::sin(theta);
  double acc = 0.0;
  for (std::size_t i = 0; i < t_pts.size(); ++i) {
    const double wx = e_pts[i].x - ex0, wy = e_pts[i].y - ey0;
    const double dx = c * wx - s * wy - (t_pts[i].x - tx0);
    const double dy = s * wx + c * wy - (t_pts[i].y - ty0);
    acc += dx * dx + dy * dy;
  }
  return std::sqrt(acc / static_cast<double>(t_pts.size()));
}

}  // namespace gprloc
