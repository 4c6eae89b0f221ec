#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/rng.hpp"
#include "gprloc/io/csv.hpp"
#include "gprloc/io/text.hpp"
#include "gprloc/model/gprformer.hpp"

namespace gprloc {

struct TrainSample {
  Eigen::MatrixXd window;  // input_dim x window_k
  double label = 0.0;      // displacement over the window, meters
};
using TrainSet = std::vector<TrainSample>;

struct EpochLog {
  int epoch = 0;
  double train_mse = 0.0;
  double val_mse = 0.0;
  double alpha = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  ModelParams best;
  int best_epoch = 0;
  std::vector<EpochLog> history;
};

namespace detail {

inline void check_set(const TrainSet& set, const ModelConfig& cfg, const char* which) {
  if (set.empty()) throw InputError(std::string("train: empty ") + which + " set");
  for (const auto& s : set)
    if (s.window.rows() != cfg.input_dim || s.window.cols() != cfg.window_k)
      throw InputError(std::string("train: ") + which + " window shape mismatch");
}

inline void pack_batch(const TrainSet& set, const std::vector<std::size_t>& idx,
                       std::size_t begin, std::size_t end, int k, Eigen::MatrixXd& x,
                       Eigen::RowVectorXd& y) {
  const auto bsz = static_cast<Eigen::Index>(end - begin);
  x.resize(set[idx[begin]].window.rows(), bsz * k);
  y.resize(bsz);
  for (Eigen::Index b = 0; b < bsz; ++b) {
    const TrainSample& s = set[idx[begin + static_cast<std::size_t>(b)]];
    x.middleCols(b * k, k) = s.window;
    y[b] = s.label;
  }
}

}  // namespace detail

// Mean squared error over a set, dropout disabled; pure in (params, set).
inline double eval_mse(const ModelParams& p, const TrainSet& set, int batch_size = 128) {
  if (set.empty()) throw InputError("eval_mse: empty set");
  std::vector<std::size_t> idx(set.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  double sq = 0.0;
  Eigen::MatrixXd x;
  Eigen::RowVectorXd y;
  for (std::size_t begin = 0; begin < set.size(); begin += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(set.size(), begin + static_cast<std::size_t>(batch_size));
    detail::pack_batch(set, idx, begin, end, p.config.window_k, x, y);
    sq += (predict_batch(p, x) - y).squaredNorm();
  }
  return sq / static_cast<double>(set.size());
}

// Adam with linear learning-rate decay across epochs. Returns the
// parameters of the epoch with the lowest validation MSE (earliest on
// ties). Gradients and losses are checked for finiteness every step.
inline TrainResult train(const TrainSet& train_set, const TrainSet& val_set,
                         const ModelConfig& mcfg, const TrainConfig& tcfg,
                         std::ostream* log = nullptr) {
  mcfg.validate();
  tcfg.validate();
  detail::check_set(train_set, mcfg, "train");
  detail::check_set(val_set, mcfg, "validation");

  ModelParams params = init_params(mcfg);
  const bool freeze_alpha = mcfg.alpha_frozen;

  std::vector<Eigen::MatrixXd*> tensors;
  std::vector<std::string> names;
  for_each_param(params.t, [&](const std::string& n, Eigen::MatrixXd& m) {
    tensors.push_back(&m);
    names.push_back(n);
  });
  std::vector<Eigen::MatrixXd> adam_m(tensors.size()), adam_v(tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    adam_m[i] = Eigen::MatrixXd::Zero(tensors[i]->rows(), tensors[i]->cols());
    adam_v[i] = adam_m[i];
  }

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  result.best = params;
  double best_val = std::numeric_limits<double>::infinity();
  std::uint64_t step = 0;
  Eigen::MatrixXd x;
  Eigen::RowVectorXd y;

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    const double frac = tcfg.epochs > 1 ? static_cast<double>(epoch) / (tcfg.epochs - 1) : 0.0;
    const double lr = tcfg.lr_start + (tcfg.lr_end - tcfg.lr_start) * frac;

    SplitMix64 shuffle(hash_mix(mcfg.seed, 0x73687566ull + static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[shuffle.next() % i]);

    double train_sq = 0.0;
    for (std::size_t begin = 0; begin < order.size();
         begin += static_cast<std::size_t>(tcfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), begin + static_cast<std::size_t>(tcfg.batch_size));
      detail::pack_batch(train_set, order, begin, end, mcfg.window_k, x, y);

      Tape tape;
      const ParamSet<int> bound = bind_params(tape, params);
      ForwardPlan plan;
      plan.train = true;
      plan.seed = mcfg.seed;
      plan.step = step;
      const int pred = gprformer_forward(tape, bound, mcfg, x, plan);
      const int loss = tape.mse_loss(pred, y);
      const double loss_val = tape.val(loss)(0, 0);
      if (!std::isfinite(loss_val))
        throw NumericalError("training diverged: non-finite loss at epoch " +
                             std::to_string(epoch) + " step " + std::to_string(step));
      train_sq += loss_val * static_cast<double>(end - begin);
      tape.backward(loss);

      std::vector<int> ids;
      for_each_param(bound, [&](const std::string&, const int& id) { ids.push_back(id); });
      ++step;
      const double t = static_cast<double>(step);
      const double bc1 = 1.0 - std::pow(tcfg.beta1, t);
      const double bc2 = 1.0 - std::pow(tcfg.beta2, t);
      for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (freeze_alpha && names[i] == "alpha") continue;
        const Eigen::MatrixXd& g = tape.grad(ids[i]);
        if (!g.allFinite())
          throw NumericalError("training diverged: non-finite gradient for " + names[i] +
                               " at step " + std::to_string(step - 1));
        adam_m[i] = tcfg.beta1 * adam_m[i] + (1.0 - tcfg.beta1) * g;
        adam_v[i] = tcfg.beta2 * adam_v[i] + (1.0 - tcfg.beta2) * g.cwiseProduct(g);
        tensors[i]->array() -= lr * (adam_m[i].array() / bc1) /
                               ((adam_v[i].array() / bc2).sqrt() + tcfg.adam_eps);
      }
    }

    EpochLog entry;
    entry.epoch = epoch;
    entry.train_mse = train_sq / static_cast<double>(train_set.size());
    entry.val_mse = eval_mse(params, val_set, tcfg.batch_size);
    entry.alpha = params.t.alpha(0, 0);
    entry.lr = lr;
    result.history.push_back(entry);
    if (entry.val_mse < best_val) {
      best_val = entry.val_mse;
      result.best = params;
      result.best_epoch = epoch;
    }
    if (log)
      (*log) << "epoch " << epoch << " train_mse " << format_double(entry.train_mse)
             << " val_mse " << format_double(entry.val_mse) << " alpha "
             << format_double(entry.alpha) << " lr " << format_double(lr) << "\n";
  }
  return result;
}

inline void write_history(const std::vector<EpochLog>& history, const std::string& path) {
  CsvWriter w(path, {"epoch", "train_mse", "val_mse", "alpha"});
  for (const auto& e : history)
    w.raw_row({format_int(e.epoch), format_double(e.train_mse), format_double(e.val_mse),
               format_double(e.alpha)});
}

}  // namespace gprloc
