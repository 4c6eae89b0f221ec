#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/sensors.hpp"
#include "gprloc/eval/metrics.hpp"
#include "gprloc/fusion/runner.hpp"
#include "gprloc/io/sequence_dir.hpp"
#include "gprloc/model/train.hpp"
#include "gprloc/signal/filters.hpp"

namespace gprloc {

// A sequence after conditioning: filtered traces plus the cumulative truth
// path length sampled at each (possibly stacked) trace timestamp.
struct PreparedSequence {
  BScan scan;
  std::vector<double> times;
  std::vector<double> distance;  // meters along the truth path, empty if no truth
};

namespace detail {

// Path length along the piecewise-linear truth polyline at time t, with the
// ends clamped. Distance to an interpolated point equals the prefix length
// plus the partial segment, so this is exact for the polyline.
inline std::vector<double> path_length_at(const std::vector<Pose>& truth,
                                          const std::vector<double>& times) {
  if (truth.size() < 2) throw InputError("truth trajectory needs at least 2 poses");
  std::vector<double> prefix(truth.size(), 0.0);
  for (std::size_t i = 1; i < truth.size(); ++i)
    prefix[i] = prefix[i - 1] + std::hypot(truth[i].x - truth[i - 1].x,
                                           truth[i].y - truth[i - 1].y);
  std::vector<double> out(times.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t <= truth.front().timestamp) {
      out[i] = 0.0;
      continue;
    }
    if (t >= truth.back().timestamp) {
      out[i] = prefix.back();
      continue;
    }
    while (truth[seg + 1].timestamp < t) ++seg;
    const double dt = truth[seg + 1].timestamp - truth[seg].timestamp;
    const double f = dt > 0.0 ? (t - truth[seg].timestamp) / dt : 0.0;
    out[i] = prefix[seg] + f * (prefix[seg + 1] - prefix[seg]);
  }
  return out;
}

}  // namespace detail

// Conditioning that leaves the traces untouched (for ablating the filter
// chain or re-reading already-filtered data).
inline FilterConfig passthrough_filter() {
  FilterConfig cfg;
  cfg.anomaly_limit = 1e300;
  cfg.stack_size = 1;
  cfg.order.clear();
  return cfg;
}

inline PreparedSequence prepare_sequence(const SequenceData& seq, const FilterConfig& fcfg) {
  PreparedSequence out;
  out.scan = filter_pipeline(BScan(preprocess_traces(seq.traces, fcfg)), fcfg);
  out.times.reserve(static_cast<std::size_t>(out.scan.cols()));
  for (int i = 0; i < out.scan.cols(); ++i) out.times.push_back(out.scan.trace(i).timestamp);
  if (!seq.truth.empty()) out.distance = detail::path_length_at(seq.truth, out.times);
  return out;
}

struct WindowRecord {
  std::size_t start = 0;  // first trace of the window; also the first step covered
  double t_start = 0.0;
  double t_end = 0.0;
  double label = 0.0;  // truth displacement across the window, meters (0 without truth)
};

struct WindowSet {
  int k = 0;
  std::vector<Eigen::MatrixXd> inputs;  // input_dim x k each
  std::vector<WindowRecord> records;
};

// Slides a k-trace window at the given stride. A window starting at trace s
// covers steps s .. s+k-2 and is labeled with distance[s+k-1] - distance[s].
inline WindowSet build_windows(const PreparedSequence& ps, int k, int stride = 1) {
  if (k < 2) throw ConfigError("window size must be at least 2 traces");
  if (stride < 1) throw ConfigError("stride must be >= 1");
  const auto n = static_cast<std::size_t>(ps.scan.cols());
  if (n < static_cast<std::size_t>(k))
    throw InputError("sequence has " + std::to_string(n) + " traces after filtering, need >= " +
                     std::to_string(k));
  WindowSet set;
  set.k = k;
  const Eigen::MatrixXd full = ps.scan.matrix();
  for (std::size_t s = 0; s + static_cast<std::size_t>(k) <= n;
       s += static_cast<std::size_t>(stride)) {
    WindowRecord rec;
    rec.start = s;
    rec.t_start = ps.times[s];
    rec.t_end = ps.times[s + static_cast<std::size_t>(k) - 1];
    if (!ps.distance.empty())
      rec.label = ps.distance[s + static_cast<std::size_t>(k) - 1] - ps.distance[s];
    set.records.push_back(rec);
    set.inputs.push_back(full.middleCols(static_cast<Eigen::Index>(s), k));
  }
  return set;
}

inline TrainSet to_train_set(const WindowSet& ws) {
  TrainSet out;
  out.reserve(ws.inputs.size());
  for (std::size_t i = 0; i < ws.inputs.size(); ++i)
    out.push_back({ws.inputs[i], ws.records[i].label});
  return out;
}

inline std::vector<WindowPrediction> to_window_predictions(const WindowSet& ws,
                                                           const std::vector<double>& values) {
  if (values.size() != ws.records.size())
    throw InputError("prediction count does not match window count");
  std::vector<WindowPrediction> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out.push_back({static_cast<int>(ws.records[i].start), ws.k - 1, values[i]});
  return out;
}

// Batched inference over a window set, chunked to bound tape memory.
inline std::vector<double> predict_window_set(const ModelParams& p, const WindowSet& ws,
                                              int chunk = 256) {
  if (chunk < 1) throw ConfigError("chunk must be >= 1");
  if (ws.k != p.config.window_k)
    throw InputError("window set built for k=" + std::to_string(ws.k) +
                     ", checkpoint expects k=" + std::to_string(p.config.window_k));
  std::vector<double> out;
  out.reserve(ws.inputs.size());
  Predictor pred(p);
  for (std::size_t base = 0; base < ws.inputs.size(); base += static_cast<std::size_t>(chunk)) {
    const auto b = std::min(static_cast<std::size_t>(chunk), ws.inputs.size() - base);
    Eigen::MatrixXd x(p.config.input_dim, static_cast<Eigen::Index>(b) * ws.k);
    for (std::size_t j = 0; j < b; ++j) {
      const Eigen::MatrixXd& w = ws.inputs[base + j];
      if (w.rows() != p.config.input_dim)
        throw InputError("windows have " + std::to_string(w.rows()) +
                         " samples per trace, checkpoint expects " +
                         std::to_string(p.config.input_dim));
      x.middleCols(static_cast<Eigen::Index>(j) * ws.k, ws.k) = w;
    }
    const Eigen::RowVectorXd y = pred.batch(x);
    for (std::size_t j = 0; j < b; ++j) out.push_back(y[static_cast<Eigen::Index>(j)]);
  }
  return out;
}

// Cumulative distance implied by the wheel encoders (mean of all four
// wheels), linearly interpolated at the requested times.
inline std::vector<double> encoder_distance_at(const std::vector<EncoderSample>& enc,
                                               const std::vector<double>& times,
                                               double ticks_per_meter) {
  if (enc.size() < 2) throw InputError("need at least 2 encoder samples");
  if (ticks_per_meter <= 0.0) throw ConfigError("ticks_per_meter must be positive");
  std::vector<double> dist(enc.size());
  for (std::size_t i = 0; i < enc.size(); ++i) {
    const double mean_ticks =
        0.25 * (static_cast<double>(enc[i].front_left - enc[0].front_left) +
                static_cast<double>(enc[i].front_right - enc[0].front_right) +
                static_cast<double>(enc[i].rear_left - enc[0].rear_left) +
                static_cast<double>(enc[i].rear_right - enc[0].rear_right));
    dist[i] = mean_ticks / ticks_per_meter;
  }
  std::vector<double> out(times.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t <= enc.front().timestamp) {
      out[i] = dist.front();
      continue;
    }
    if (t >= enc.back().timestamp) {
      out[i] = dist.back();
      continue;
    }
    while (enc[seg + 1].timestamp < t) ++seg;
    const double dt = enc[seg + 1].timestamp - enc[seg].timestamp;
    const double f = dt > 0.0 ? (t - enc[seg].timestamp) / dt : 0.0;
    out[i] = dist[seg] + f * (dist[seg + 1] - dist[seg]);
  }
  return out;
}

// Per-step wheel displacement between consecutive trace timestamps: the
// baseline the learned estimator competes against.
inline std::vector<double> encoder_step_estimates(const std::vector<EncoderSample>& enc,
                                                  const std::vector<double>& times,
                                                  double ticks_per_meter) {
  if (times.size() < 2) throw InputError("need at least 2 trace timestamps");
  const std::vector<double> d = encoder_distance_at(enc, times, ticks_per_meter);
  std::vector<double> steps(times.size() - 1);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) steps[i] = d[i + 1] - d[i];
  return steps;
}

// Differential-drive dead reckoning from raw encoder ticks alone.
inline std::vector<Pose> encoder_dead_reckoning(const std::vector<EncoderSample>& enc,
                                                double ticks_per_meter,
                                                double wheel_separation_m,
                                                double initial_yaw = 0.0) {
  if (enc.size() < 2) throw InputError("need at least 2 encoder samples");
  std::vector<Pose> out;
  out.reserve(enc.size());
  Pose pose{enc.front().timestamp, 0.0, 0.0, initial_yaw};
  out.push_back(pose);
  for (std::size_t i = 1; i < enc.size(); ++i) {
    const WheelOdometry odo =
        wheel_odometry(enc[i - 1], enc[i], ticks_per_meter, wheel_separation_m);
    const double dt = enc[i].timestamp - enc[i - 1].timestamp;
    pose.x += odo.speed * std::cos(pose.yaw) * dt;
    pose.y += odo.speed * std::sin(pose.yaw) * dt;
    pose.yaw = wrap_angle(pose.yaw + odo.yaw_rate * dt);
    pose.timestamp = enc[i].timestamp;
    out.push_back(pose);
  }
  return out;
}

// Converts per-step displacement estimates into the event stream the fusion
// filter consumes; steps without coverage are skipped.
inline std::vector<GprStep> gpr_steps_from_estimates(const StepEstimates& est,
                                                     const std::vector<double>& times) {
  if (est.value.size() + 1 != times.size())
    throw InputError("step estimate count does not match trace timestamps");
  std::vector<GprStep> out;
  for (std::size_t s = 0; s < est.value.size(); ++s)
    if (est.covered[s]) out.push_back({times[s + 1], est.value[s]});
  return out;
}

}  // namespace gprloc
