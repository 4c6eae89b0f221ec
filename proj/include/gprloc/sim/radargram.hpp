#pragma once

#include <Eigen/Core>
#include <cmath>
#include <numbers>

#include "gprloc/core/rng.hpp"
#include "gprloc/sim/scene.hpp"

namespace gprloc {

inline constexpr double kSpeedOfLightMPerNs = 0.299792458;
inline constexpr int kDirectWaveIndex = 8;     // fixed shallow arrival
inline constexpr double kSpreadingFloorM = 0.05;

// Normal-incidence amplitude reflection between two permittivities.
inline double reflection_coeff(double k1, double k2) {
  const double a = std::sqrt(k1);
  const double b = std::sqrt(k2);
  return (a - b) / (a + b);
}

inline double ricker(double t_ns, double f_ghz) {
  const double u = std::numbers::pi * f_ghz * t_ns;
  const double u2 = u * u;
  return (1.0 - 2.0 * u2) * std::exp(-u2);
}

// Adds a Ricker pulse centered at a fractional sample index. The support is
// clipped where the envelope falls below ~1e-16, so untouched samples stay
// exactly zero.
inline void add_ricker(Eigen::VectorXd& out, double center_index, double amplitude, double f_ghz,
                       double dt_ns) {
  const double half_width = 6.0 / (std::numbers::pi * f_ghz * dt_ns);
  const auto lo = static_cast<Eigen::Index>(std::ceil(center_index - half_width));
  const auto hi = static_cast<Eigen::Index>(std::floor(center_index + half_width));
  for (Eigen::Index i = std::max<Eigen::Index>(lo, 0); i <= std::min(hi, out.size() - 1); ++i) {
    const double t = (static_cast<double>(i) - center_index) * dt_ns;
    out[i] += amplitude * ricker(t, f_ghz);
  }
}

// One clean A-scan at the given along-track antenna position: scatterer
// echoes by two-way travel time, the direct wave, low-frequency wow, and
// optional receiver noise.
inline Eigen::VectorXd trace_response(const ScatterScene& scene, double along_track_m,
                                      GaussianStream* noise = nullptr) {
  scene.validate();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(scene.trace_samples);
  const double v_host = kSpeedOfLightMPerNs / std::sqrt(scene.host_permittivity);
  for (const auto& sc : scene.scatterers) {
    const double dx = along_track_m - sc.x;
    const double range = std::sqrt(sc.depth * sc.depth + dx * dx);
    const double tau_ns = 2.0 * range / v_host;
    const double host_k = sc.permittivity_host > 0.0 ? sc.permittivity_host : scene.host_permittivity;
    const double amp = scene.source_amplitude * reflection_coeff(host_k, sc.permittivity) /
                       std::max(range, kSpreadingFloorM);
    add_ricker(out, tau_ns / scene.sample_dt_ns, amp, scene.center_frequency_ghz, scene.sample_dt_ns);
  }
  if (scene.direct_wave_amplitude != 0.0)
    add_ricker(out, kDirectWaveIndex, scene.direct_wave_amplitude, scene.center_frequency_ghz,
               scene.sample_dt_ns);
  if (!scene.wow_coefficients.empty()) {
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      double p = 1.0, wow = 0.0;
      for (double c : scene.wow_coefficients) {
        wow += c * p;
        p *= static_cast<double>(i);
      }
      out[i] += wow;
    }
  }
  if (noise && scene.noise_sigma > 0.0)
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += scene.noise_sigma * noise->next();
  return out;
}

}  // namespace gprloc
