#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/rng.hpp"
#include "gprloc/model/autodiff.hpp"
#include "gprloc/model/config.hpp"

namespace gprloc {

// The parameter tree is templated on the tensor handle so the same traversal
// serves concrete matrices (storage, optimizer state) and tape node ids.
template <class T>
struct ParamSet {
  struct Layer {
    T ln1_g, ln1_b;
    T wq, bq, wk, bk, wv, bv, wo, bo;
    T ln2_g, ln2_b;
    T ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  };
  T enc_w, enc_b;
  T pos;
  std::vector<Layer> layers;
  T final_ln_g, final_ln_b;
  T pool_post_w, pool_post_b;  // scores from post-transformer tokens
  T pool_pre_w, pool_pre_b;    // scores from pre-transformer tokens
  T alpha;                     // 1x1 blend between the two pooled features
  T head_w1, head_b1, head_w2, head_b2;
};

// Visits every tensor in a fixed order; this order defines the checkpoint
// layout and the optimizer state pairing, so it must stay stable.
template <class P, class F>
void for_each_param(P&& set, F&& fn) {
  fn("enc_w", set.enc_w);
  fn("enc_b", set.enc_b);
  fn("pos", set.pos);
  for (std::size_t i = 0; i < set.layers.size(); ++i) {
    auto& l = set.layers[i];
    const std::string p = "layer" + std::to_string(i) + ".";
    fn(p + "ln1_g", l.ln1_g);
    fn(p + "ln1_b", l.ln1_b);
    fn(p + "wq", l.wq);
    fn(p + "bq", l.bq);
    fn(p + "wk", l.wk);
    fn(p + "bk", l.bk);
    fn(p + "wv", l.wv);
    fn(p + "bv", l.bv);
    fn(p + "wo", l.wo);
    fn(p + "bo", l.bo);
    fn(p + "ln2_g", l.ln2_g);
    fn(p + "ln2_b", l.ln2_b);
    fn(p + "ffn_w1", l.ffn_w1);
    fn(p + "ffn_b1", l.ffn_b1);
    fn(p + "ffn_w2", l.ffn_w2);
    fn(p + "ffn_b2", l.ffn_b2);
  }
  fn("final_ln_g", set.final_ln_g);
  fn("final_ln_b", set.final_ln_b);
  fn("pool_post_w", set.pool_post_w);
  fn("pool_post_b", set.pool_post_b);
  fn("pool_pre_w", set.pool_pre_w);
  fn("pool_pre_b", set.pool_pre_b);
  fn("alpha", set.alpha);
  fn("head_w1", set.head_w1);
  fn("head_b1", set.head_b1);
  fn("head_w2", set.head_w2);
  fn("head_b2", set.head_b2);
}

struct ModelParams {
  ModelConfig config;
  ParamSet<Eigen::MatrixXd> t;
};

namespace detail {

inline void shape_params(const ModelConfig& cfg, ParamSet<Eigen::MatrixXd>& t) {
  const int d = cfg.token_dim, f = cfg.ffn_dim();
  auto z = [](int r, int c) { return Eigen::MatrixXd::Zero(r, c); };
  // The no-encoder ablation keeps the slots so the tensor roster is stable.
  t.enc_w = z(cfg.use_encoder ? d : 0, cfg.use_encoder ? cfg.input_dim : 0);
  t.enc_b = z(cfg.use_encoder ? d : 0, cfg.use_encoder ? 1 : 0);
  t.pos = z(d, cfg.window_k);
  t.layers.resize(static_cast<std::size_t>(cfg.layers));
  for (auto& l : t.layers) {
    l.ln1_g = z(d, 1);
    l.ln1_b = z(d, 1);
    l.wq = z(d, d);
    l.bq = z(d, 1);
    l.wk = z(d, d);
    l.bk = z(d, 1);
    l.wv = z(d, d);
    l.bv = z(d, 1);
    l.wo = z(d, d);
    l.bo = z(d, 1);
    l.ln2_g = z(d, 1);
    l.ln2_b = z(d, 1);
    l.ffn_w1 = z(f, d);
    l.ffn_b1 = z(f, 1);
    l.ffn_w2 = z(d, f);
    l.ffn_b2 = z(d, 1);
  }
  t.final_ln_g = z(d, 1);
  t.final_ln_b = z(d, 1);
  t.pool_post_w = z(1, d);
  t.pool_post_b = z(1, 1);
  t.pool_pre_w = z(1, d);
  t.pool_pre_b = z(1, 1);
  t.alpha = z(1, 1);
  t.head_w1 = z(cfg.head_hidden, d);
  t.head_b1 = z(cfg.head_hidden, 1);
  t.head_w2 = z(1, cfg.head_hidden);
  t.head_b2 = z(1, 1);
}

inline bool is_norm_scale(const std::string& name) {
  return name.size() >= 2 && name.compare(name.size() - 2, 2, "_g") == 0;
}

inline bool is_norm_shift(const std::string& name) {
  return name.size() >= 2 && name.compare(name.size() - 2, 2, "_b") == 0 &&
         name.find("ln") != std::string::npos;
}

}  // namespace detail

// Affine layers: uniform +-1/sqrt(fan_in) for weights and biases, fan_in
// taken from the paired weight. Positional embeddings: normal, sigma 0.02.
// Norm scales 1, shifts 0. Each tensor draws from its own seeded stream so
// the result does not depend on traversal bookkeeping.
inline ModelParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.config = cfg;
  detail::shape_params(cfg, p.t);

  // Bias fan-in follows the weight listed immediately before it.
  double last_fan_in = 1.0;
  std::uint64_t index = 0;
  for_each_param(p.t, [&](const std::string& name, Eigen::MatrixXd& m) {
    const std::uint64_t stream = hash_mix(cfg.seed, 0x70617261ull + index++);
    if (name == "alpha") {
      m(0, 0) = cfg.alpha_init;
      return;
    }
    if (name == "pos") {
      GaussianStream g(stream);
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = 0.02 * g.next();
      return;
    }
    if (detail::is_norm_scale(name)) {
      m.setOnes();
      return;
    }
    if (detail::is_norm_shift(name)) {
      m.setZero();
      return;
    }
    if (m.cols() > 1) last_fan_in = static_cast<double>(m.cols());
    const double bound = 1.0 / std::sqrt(last_fan_in);
    SplitMix64 rng(stream);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        m(r, c) = bound * (2.0 * u01(rng.next()) - 1.0);
  });
  return p;
}

inline std::size_t param_count(const ModelConfig& cfg) {
  ParamSet<Eigen::MatrixXd> t;
  detail::shape_params(cfg, t);
  std::size_t n = 0;
  for_each_param(t, [&](const std::string&, const Eigen::MatrixXd& m) {
    n += static_cast<std::size_t>(m.size());
  });
  return n;
}

// Copies every tensor onto the tape, returning the node ids in the same
// tree shape. Gradients land on these leaves after backward().
inline ParamSet<int> bind_params(Tape& tape, const ModelParams& p) {
  ParamSet<int> b;
  b.layers.resize(p.t.layers.size());
  std::vector<const Eigen::MatrixXd*> src;
  for_each_param(p.t, [&](const std::string&, const Eigen::MatrixXd& m) { src.push_back(&m); });
  std::size_t i = 0;
  for_each_param(b, [&](const std::string&, int& id) { id = tape.leaf(*src[i++]); });
  return b;
}

struct ForwardPlan {
  bool train = false;
  std::uint64_t seed = 0;  // dropout stream root
  std::uint64_t step = 0;  // training step counter, part of the stream key
};

// Builds the network on the tape. x packs B windows as input_dim x (k*B),
// window-major columns. Returns the node id of the 1 x B prediction row.
inline int gprformer_forward(Tape& tape, const ParamSet<int>& b, const ModelConfig& cfg,
                             const Eigen::MatrixXd& x, const ForwardPlan& plan = {}) {
  if (x.rows() != cfg.input_dim)
    throw InputError("gprformer_forward: expected " + std::to_string(cfg.input_dim) +
                     " samples per trace, got " + std::to_string(x.rows()));
  if (x.cols() == 0 || x.cols() % cfg.window_k != 0)
    throw InputError("gprformer_forward: columns must be a positive multiple of window_k");

  std::uint64_t site = 0;
  auto drop = [&](int node) {
    const std::uint64_t s = hash_mix(hash_mix(plan.seed, plan.step), 0x64726f70ull + site++);
    return plan.train && cfg.dropout_p > 0.0 ? tape.dropout(node, cfg.dropout_p, s) : node;
  };

  const int input = tape.leaf(x);
  int tokens = cfg.use_encoder ? tape.add_bias(tape.matmul(b.enc_w, input), b.enc_b) : input;
  tokens = tape.add_window_bias(tokens, b.pos, cfg.window_k);
  const int pre_tokens = tokens;

  for (const auto& l : b.layers) {
    const int a = tape.layer_norm(tokens, l.ln1_g, l.ln1_b);
    const int q = tape.add_bias(tape.matmul(l.wq, a), l.bq);
    const int k = tape.add_bias(tape.matmul(l.wk, a), l.bk);
    const int v = tape.add_bias(tape.matmul(l.wv, a), l.bv);
    const int att = tape.self_attention(q, k, v, cfg.heads, cfg.window_k);
    const int o = drop(tape.add_bias(tape.matmul(l.wo, att), l.bo));
    tokens = tape.add(tokens, o);

    const int f0 = tape.layer_norm(tokens, l.ln2_g, l.ln2_b);
    const int f1 = tape.gelu(tape.add_bias(tape.matmul(l.ffn_w1, f0), l.ffn_b1));
    const int f2 = drop(tape.add_bias(tape.matmul(l.ffn_w2, f1), l.ffn_b2));
    tokens = tape.add(tokens, f2);
  }

  const int post = tape.layer_norm(tokens, b.final_ln_g, b.final_ln_b);
  const int x1 = tape.attention_pool(post, post, b.pool_post_w, b.pool_post_b, cfg.window_k);
  int pooled;
  if (cfg.pooling == Pooling::kDualAttention) {
    const int x2 = tape.attention_pool(pre_tokens, post, b.pool_pre_w, b.pool_pre_b, cfg.window_k);
    pooled = tape.blend(b.alpha, x1, x2);
  } else {
    pooled = x1;
  }

  const int h = drop(tape.relu(tape.add_bias(tape.matmul(b.head_w1, pooled), b.head_b1)));
  return tape.add_bias(tape.matmul(b.head_w2, h), b.head_b2);
}

// Reusable inference session. Binding copies every parameter matrix onto the
// tape, which costs more than the forward math itself for the full model, so
// the session binds once and rewinds the tape between calls. Results are
// bitwise identical to a fresh bind.
class Predictor {
 public:
  explicit Predictor(const ModelParams& p)
      : config_(p.config), bound_(bind_params(tape_, p)), base_(tape_.size()) {}

  Eigen::RowVectorXd batch(const Eigen::MatrixXd& x) {
    tape_.truncate(base_);
    const int out = gprformer_forward(tape_, bound_, config_, x);
    return tape_.val(out).row(0);
  }

  double window(const Eigen::MatrixXd& w) {
    if (w.cols() != config_.window_k)
      throw InputError("predict_window: expected " + std::to_string(config_.window_k) + " traces");
    return batch(w)[0];
  }

 private:
  ModelConfig config_;
  Tape tape_;
  ParamSet<int> bound_;
  std::size_t base_;
};

// One-shot conveniences; batch callers that loop should hold a Predictor.
inline Eigen::RowVectorXd predict_batch(const ModelParams& p, const Eigen::MatrixXd& x) {
  return Predictor(p).batch(x);
}

inline double predict_window(const ModelParams& p, const Eigen::MatrixXd& window) {
  return Predictor(p).window(window);
}

}  // namespace gprloc
