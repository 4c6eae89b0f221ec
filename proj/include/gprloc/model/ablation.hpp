#pragma once

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/io/text.hpp"
#include "gprloc/model/config.hpp"
#include "gprloc/model/train.hpp"

namespace gprloc {

// One sweep retrains the model per value along a single axis. Axes that
// change the window shape or the preprocessing force a dataset rebuild,
// which the data provider callback handles.
enum class AblationAxis {
  kWindow,     // window length k
  kAlpha,      // blend weight, frozen per run
  kLayers,     // encoder depth (1 also drops to a single head)
  kDropout,    // dropout probability
  kPooling,    // 0 = post-transformer pooling only, 1 = dual
  kEncoder,    // 0 = raw traces as tokens, 1 = linear encoder
  kFiltering,  // 0 = raw windows, 1 = filtered windows
};

inline std::string to_string(AblationAxis a) {
  switch (a) {
    case AblationAxis::kWindow: return "k";
    case AblationAxis::kAlpha: return "alpha";
    case AblationAxis::kLayers: return "layers";
    case AblationAxis::kDropout: return "dropout";
    case AblationAxis::kPooling: return "pooling";
    case AblationAxis::kEncoder: return "encoder";
    case AblationAxis::kFiltering: return "filtering";
  }
  return "?";
}

inline AblationAxis parse_ablation_axis(const std::string& s) {
  if (s == "k") return AblationAxis::kWindow;
  if (s == "alpha") return AblationAxis::kAlpha;
  if (s == "layers") return AblationAxis::kLayers;
  if (s == "dropout") return AblationAxis::kDropout;
  if (s == "pooling") return AblationAxis::kPooling;
  if (s == "encoder") return AblationAxis::kEncoder;
  if (s == "filtering") return AblationAxis::kFiltering;
  throw ConfigError("unknown ablation axis '" + s +
                    "' (k, alpha, layers, dropout, pooling, encoder, filtering)");
}

namespace detail {

inline int sweep_int(AblationAxis axis, double v) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 1.0)
    throw ConfigError("ablation axis " + to_string(axis) + ": value " + format_double(v) +
                      " must be a positive integer");
  return static_cast<int>(r);
}

inline bool sweep_flag(AblationAxis axis, double v) {
  if (v == 0.0) return false;
  if (v == 1.0) return true;
  throw ConfigError("ablation axis " + to_string(axis) + ": value must be 0 or 1");
}

}  // namespace detail

// Applies one sweep value to the model config. `filtered` reports whether
// the dataset should be built from filtered scans (only the filtering axis
// turns it off). Returns true when windows must be rebuilt for this value.
inline bool apply_ablation(AblationAxis axis, double value, ModelConfig& cfg, bool& filtered) {
  filtered = true;
  switch (axis) {
    case AblationAxis::kWindow:
      cfg.window_k = detail::sweep_int(axis, value);
      return true;
    case AblationAxis::kAlpha:
      if (value < 0.0 || value > 1.0)
        throw ConfigError("ablation axis alpha: value must be in [0, 1]");
      cfg.alpha_init = value;
      cfg.alpha_frozen = true;
      return false;
    case AblationAxis::kLayers:
      cfg.layers = detail::sweep_int(axis, value);
      if (cfg.layers == 1) cfg.heads = 1;
      return false;
    case AblationAxis::kDropout:
      if (value < 0.0 || value >= 1.0)
        throw ConfigError("ablation axis dropout: value must be in [0, 1)");
      cfg.dropout_p = value;
      return false;
    case AblationAxis::kPooling:
      cfg.pooling = detail::sweep_flag(axis, value) ? Pooling::kDualAttention : Pooling::kPostOnly;
      return false;
    case AblationAxis::kEncoder:
      cfg.use_encoder = detail::sweep_flag(axis, value);
      if (!cfg.use_encoder) cfg.token_dim = cfg.input_dim;
      return false;
    case AblationAxis::kFiltering:
      filtered = detail::sweep_flag(axis, value);
      return true;
  }
  throw ConfigError("unhandled ablation axis");
}

struct SweepRow {
  double value = 0.0;
  double rmse_mm = 0.0;
};

struct SweepData {
  TrainSet train;
  TrainSet val;
};

// Provider builds datasets for a mutated config; evaluator scores the
// trained model (convention: per-step displacement RMSE in millimeters).
using SweepDataProvider = std::function<SweepData(const ModelConfig&, bool filtered)>;
using SweepEvaluator = std::function<double(const ModelParams&, bool filtered)>;

// Sweep points are independent retrains, so they parallelize cleanly; rows
// come back in value order regardless of jobs. Per-epoch training logs are
// only forwarded when running serially, keeping the stream readable.
inline std::vector<SweepRow> ablation_sweep(AblationAxis axis, const std::vector<double>& values,
                                            const ModelConfig& base_model,
                                            const TrainConfig& train_cfg,
                                            const SweepDataProvider& provider,
                                            const SweepEvaluator& evaluate,
                                            std::ostream* log = nullptr, int jobs = 1) {
  if (values.empty()) throw InputError("ablation sweep needs at least one value");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  std::vector<SweepRow> rows(values.size());

  std::mutex log_mu;
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto run_points = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= values.size()) return;
      const double v = values[i];
      ModelConfig cfg = base_model;
      bool filtered = true;
      apply_ablation(axis, v, cfg, filtered);
      cfg.validate();
      const SweepData data = provider(cfg, filtered);
      const TrainResult res = train(data.train, data.val, cfg, train_cfg, jobs == 1 ? log : nullptr);
      const double rmse = evaluate(res.best, filtered);
      rows[i] = {v, rmse};
      if (log) {
        const std::scoped_lock lock(log_mu);
        *log << "[ablate] " << to_string(axis) << " = " << format_double(v)
             << "  rmse_mm = " << format_double(rmse) << "\n";
      }
    }
  };

  const int workers = static_cast<int>(std::min<std::size_t>(
      static_cast<std::size_t>(jobs), values.size()));
  if (workers <= 1) {
    run_points();
  } else {
    auto guarded = [&] {
      try {
        run_points();
      } catch (...) {
        const std::scoped_lock lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        cursor.store(values.size());  // stop other workers at the next point
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(guarded);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return rows;
}

inline std::size_t best_sweep_row(const std::vector<SweepRow>& rows) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].rmse_mm < rows[best].rmse_mm) best = i;
  return best;
}

}  // namespace gprloc
