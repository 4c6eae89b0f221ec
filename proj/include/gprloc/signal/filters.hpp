#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/trace.hpp"
#include "gprloc/signal/filter_config.hpp"
#include "gprloc/signal/wavelet.hpp"

namespace gprloc {

// Drops traces whose peak magnitude exceeds the receiver's trusted range.
inline std::vector<Trace> screen_anomalies(std::span<const Trace> traces, double limit_mv) {
  std::vector<Trace> out;
  out.reserve(traces.size());
  for (const auto& t : traces) {
    if (t.samples.size() == 0) continue;
    if (t.samples.cwiseAbs().maxCoeff() <= limit_mv) out.push_back(t);
  }
  return out;
}

// Mean of consecutive groups of `n`; a trailing partial group is dropped.
// The stacked timestamp is the group mean.
inline std::vector<Trace> stack_traces(std::span<const Trace> traces, int n) {
  if (n < 1) throw ConfigError("stack size must be >= 1");
  std::vector<Trace> out;
  const std::size_t groups = traces.size() / static_cast<std::size_t>(n);
  out.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    Trace acc;
    acc.samples = traces[g * n].samples;
    acc.timestamp = traces[g * n].timestamp;
    for (int j = 1; j < n; ++j) {
      const auto& t = traces[g * n + static_cast<std::size_t>(j)];
      if (t.samples.size() != acc.samples.size())
        throw InputError("stack: traces differ in sample count");
      acc.samples += t.samples;
      acc.timestamp += t.timestamp;
    }
    acc.samples /= n;
    acc.timestamp /= n;
    out.push_back(std::move(acc));
  }
  return out;
}

inline std::vector<Trace> preprocess_traces(std::span<const Trace> traces, const FilterConfig& cfg) {
  auto screened = screen_anomalies(traces, cfg.anomaly_limit);
  return stack_traces(screened, cfg.stack_size);
}

// Subtracts the across-trace mean from every depth row, suppressing
// features that do not move with the antenna (direct wave, ringing).
inline Eigen::MatrixXd background_removal(const Eigen::MatrixXd& scan) {
  return scan.colwise() - scan.rowwise().mean();
}

// Least-squares fit of a low-degree polynomial in the sample index,
// subtracted per trace. Removes the slow inductive drift.
inline Eigen::VectorXd dewow(const Eigen::VectorXd& x, int degree) {
  if (degree < 0) throw ConfigError("dewow degree must be >= 0");
  const Eigen::Index n = x.size();
  if (n <= degree) throw InputError("dewow: trace shorter than fit degree");
  Eigen::MatrixXd v(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      v(i, d) = p;
      p *= static_cast<double>(i);
    }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
  if (qr.rank() < degree + 1) throw NumericalError("dewow: rank-deficient fit");
  return x - v * qr.solve(x);
}

inline Eigen::MatrixXd dewow(const Eigen::MatrixXd& scan, int degree) {
  Eigen::MatrixXd out(scan.rows(), scan.cols());
  for (Eigen::Index j = 0; j < scan.cols(); ++j) out.col(j) = dewow(Eigen::VectorXd(scan.col(j)), degree);
  return out;
}

// Spreading/exponential-compensation gain per sample index, clamped past
// the threshold index so late noise is not amplified without bound.
inline Eigen::VectorXd sec_gain_profile(Eigen::Index n, double a, double b, int threshold) {
  if (a < 0) throw ConfigError("sec gain: a must be >= 0");
  Eigen::VectorXd gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double idx = static_cast<double>(std::min<Eigen::Index>(i, threshold));
    // pow(0, 0) is 1 here: the gain at the surface sample is unity when b = 0.
    gamma[i] = std::pow(idx, b) * std::exp(a * idx);
  }
  return gamma;
}

inline Eigen::MatrixXd sec_gain(const Eigen::MatrixXd& scan, double a, double b, int threshold) {
  return sec_gain_profile(scan.rows(), a, b, threshold).asDiagonal() * scan;
}

inline Eigen::MatrixXd wavelet_denoise(const Eigen::MatrixXd& scan, const FilterConfig& cfg) {
  Eigen::MatrixXd out(scan.rows(), scan.cols());
  for (Eigen::Index j = 0; j < scan.cols(); ++j)
    out.col(j) = wavelet_denoise(Eigen::VectorXd(scan.col(j)), cfg);
  return out;
}

inline Eigen::MatrixXd apply_filter_stage(const Eigen::MatrixXd& scan, FilterStage stage,
                                          const FilterConfig& cfg) {
  switch (stage) {
    case FilterStage::background: return background_removal(scan);
    case FilterStage::dewow: return dewow(scan, cfg.dewow_degree);
    case FilterStage::sec: return sec_gain(scan, cfg.sec_a, cfg.sec_b, cfg.sec_threshold);
    case FilterStage::wavelet: return wavelet_denoise(scan, cfg);
  }
  throw ConfigError("unknown filter stage");
}

inline Eigen::MatrixXd filter_pipeline(const Eigen::MatrixXd& scan, const FilterConfig& cfg) {
  for (auto stage : cfg.order)
    if (stage == FilterStage::sec && cfg.sec_threshold >= scan.rows())
      throw ConfigError("sec_threshold must be below the trace sample count");
  Eigen::MatrixXd out = scan;
  for (auto stage : cfg.order) out = apply_filter_stage(out, stage, cfg);
  return out;
}

inline BScan filter_pipeline(const BScan& scan, const FilterConfig& cfg) {
  BScan out = scan;
  out.set_matrix(filter_pipeline(scan.matrix(), cfg));
  return out;
}

}  // namespace gprloc
