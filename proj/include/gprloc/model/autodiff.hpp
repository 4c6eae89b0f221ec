#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include "gprloc/core/error.hpp"
#include "gprloc/core/rng.hpp"

namespace gprloc {

// Reverse-mode tape over dense matrices. Convention throughout: features in
// rows, samples in columns, so a linear layer is W (out x in) times X
// (in x n) plus a per-column bias.
//
// Sequence data packs a batch of B windows of k tokens into one matrix of
// k*B columns ordered window-major: column b*k + t holds token t of window
// b. Ops that need window structure take k explicitly.
class Tape {
 public:
  using Matrix = Eigen::MatrixXd;

  int leaf(Matrix value) {
    nodes_.push_back({std::move(value), {}, nullptr});
    return static_cast<int>(nodes_.size()) - 1;
  }

  const Matrix& val(int id) const { return nodes_[static_cast<std::size_t>(id)].val; }

  // Gradient of the loss w.r.t. node `id`; zero-sized until touched.
  Matrix& grad(int id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.size() == 0) n.grad = Matrix::Zero(n.val.rows(), n.val.cols());
    return n.grad;
  }

  // y = a * b
  int matmul(int a, int b) {
    if (val(a).cols() != val(b).rows()) throw InputError("matmul: inner dimensions differ");
    const int out = leaf(val(a) * val(b));
    nodes_.back().back = [this, a, b, out] {
      const Matrix& g = grad(out);
      grad(a).noalias() += g * val(b).transpose();
      grad(b).noalias() += val(a).transpose() * g;
    };
    return out;
  }

  // y = x + bias broadcast across columns; bias is a column vector node.
  int add_bias(int x, int bias) {
    if (val(bias).cols() != 1 || val(bias).rows() != val(x).rows())
      throw InputError("add_bias: bias must be a column vector matching rows");
    const int out = leaf(val(x).colwise() + Eigen::VectorXd(val(bias).col(0)));
    nodes_.back().back = [this, x, bias, out] {
      const Matrix& g = grad(out);
      grad(x) += g;
      grad(bias) += g.rowwise().sum();
    };
    return out;
  }

  int add(int a, int b) {
    if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
      throw InputError("add: shape mismatch");
    const int out = leaf(val(a) + val(b));
    nodes_.back().back = [this, a, b, out] {
      grad(a) += grad(out);
      grad(b) += grad(out);
    };
    return out;
  }

  // y = x + pos tiled across windows; pos is d x window, x is d x window*B.
  int add_window_bias(int x, int pos, int window) {
    const Matrix& xv = val(x);
    const Matrix& pv = val(pos);
    if (pv.rows() != xv.rows() || pv.cols() != window || xv.cols() % window != 0)
      throw InputError("add_window_bias: shape mismatch");
    Matrix y = xv;
    const Eigen::Index nb = xv.cols() / window;
    for (Eigen::Index i = 0; i < nb; ++i) y.middleCols(i * window, window) += pv;
    const int out = leaf(std::move(y));
    nodes_.back().back = [this, x, pos, out, window, nb] {
      const Matrix& g = grad(out);
      grad(x) += g;
      Matrix& gp = grad(pos);
      for (Eigen::Index i = 0; i < nb; ++i) gp += g.middleCols(i * window, window);
    };
    return out;
  }

  // y = alpha * a + (1 - alpha) * b with a learnable 1x1 scalar node.
  int blend(int alpha, int a, int b) {
    if (val(alpha).size() != 1) throw InputError("blend: alpha must be 1x1");
    if (val(a).rows() != val(b).rows() || val(a).cols() != val(b).cols())
      throw InputError("blend: shape mismatch");
    const double w = val(alpha)(0, 0);
    const int out = leaf(w * val(a) + (1.0 - w) * val(b));
    nodes_.back().back = [this, alpha, a, b, out, w] {
      const Matrix& g = grad(out);
      grad(alpha)(0, 0) += ((val(a) - val(b)).array() * g.array()).sum();
      grad(a) += w * g;
      grad(b) += (1.0 - w) * g;
    };
    return out;
  }

  // Normalizes each column to zero mean, unit variance over the feature
  // rows, then applies learned scale and shift (column-vector nodes).
  int layer_norm(int x, int gamma, int beta, double eps = 1e-5) {
    const Matrix& v = val(x);
    const Eigen::Index d = v.rows();
    if (val(gamma).rows() != d || val(beta).rows() != d || val(gamma).cols() != 1 ||
        val(beta).cols() != 1)
      throw InputError("layer_norm: scale/shift must be d x 1");
    Matrix xhat(v.rows(), v.cols());
    Eigen::RowVectorXd inv_std(v.cols());
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
      const double mu = v.col(c).mean();
      const double var = (v.col(c).array() - mu).square().sum() / static_cast<double>(d);
      inv_std[c] = 1.0 / std::sqrt(var + eps);
      xhat.col(c) = (v.col(c).array() - mu) * inv_std[c];
    }
    Matrix y = (xhat.array().colwise() * val(gamma).col(0).array()).colwise() +
               val(beta).col(0).array();
    const int out = leaf(std::move(y));
    nodes_.back().back = [this, x, gamma, beta, out, xhat = std::move(xhat),
                          inv_std = std::move(inv_std), d] {
      const Matrix& g = grad(out);
      grad(beta) += g.rowwise().sum();
      grad(gamma) += (g.array() * xhat.array()).rowwise().sum().matrix();
      Matrix dxhat = g.array().colwise() * val(gamma).col(0).array();
      Matrix& gx = grad(x);
      const double inv_d = 1.0 / static_cast<double>(d);
      for (Eigen::Index c = 0; c < g.cols(); ++c) {
        const double mean_dx = dxhat.col(c).mean();
        const double mean_dx_xhat = dxhat.col(c).dot(xhat.col(c)) * inv_d;
        gx.col(c) += inv_std[c] * (dxhat.col(c).array() - mean_dx -
                                   xhat.col(c).array() * mean_dx_xhat)
                                      .matrix();
      }
    };
    return out;
  }

  // Exact gaussian-error-function GELU.
  int gelu(int x) {
    const Matrix& v = val(x);
    const auto cdf_of = [](double t) { return 0.5 * (1.0 + std::erf(t / std::numbers::sqrt2)); };
    const int out = leaf(v.array() * v.unaryExpr(cdf_of).array());
    nodes_.back().back = [this, x, out, cdf_of] {
      const auto v2 = val(x).array();
      const auto phi = (-0.5 * v2.square()).exp() * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
      grad(x).array() += grad(out).array() * (val(x).unaryExpr(cdf_of).array() + v2 * phi);
    };
    return out;
  }

  int relu(int x) {
    const int out = leaf(val(x).cwiseMax(0.0));
    nodes_.back().back = [this, x, out] {
      grad(x).array() += grad(out).array() * (val(x).array() > 0.0).cast<double>();
    };
    return out;
  }

  // Inverted dropout with a counter-based stream: the mask depends only on
  // the seed, so identical (seed, shape) pairs give identical masks.
  int dropout(int x, double p, std::uint64_t seed) {
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout probability must be in [0, 1)");
    if (p == 0.0) return x;
    const Matrix& v = val(x);
    Matrix mask(v.rows(), v.cols());
    SplitMix64 rng(seed);
    const double keep = 1.0 - p;
    for (Eigen::Index c = 0; c < mask.cols(); ++c)
      for (Eigen::Index r = 0; r < mask.rows(); ++r)
        mask(r, c) = u01(rng.next()) <= keep ? 1.0 / keep : 0.0;
    const int out = leaf(v.cwiseProduct(mask));
    nodes_.back().back = [this, x, out, mask = std::move(mask)] {
      grad(x) += grad(out).cwiseProduct(mask);
    };
    return out;
  }

  // Fused multi-head scaled-dot-product self-attention within each window.
  // q, k, v: (d x window*B); rows split evenly across heads.
  int self_attention(int q, int k, int v, int heads, int window) {
    const Matrix& qv = val(q);
    const Eigen::Index d = qv.rows(), n = qv.cols();
    if (val(k).rows() != d || val(v).rows() != d || val(k).cols() != n || val(v).cols() != n)
      throw InputError("self_attention: q/k/v shapes differ");
    if (heads < 1 || d % heads != 0) throw ConfigError("self_attention: rows not divisible by heads");
    if (window < 1 || n % window != 0) throw InputError("self_attention: columns not divisible by window");
    const Eigen::Index dh = d / heads, nb = n / window;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // probs.block(h*window, b*window) holds the window x window attention
    // matrix of head h in window b; row = query token, col = key token.
    Matrix probs(heads * window, n);
    Matrix ctx(d, n);
    for (Eigen::Index b = 0; b < nb; ++b) {
      for (int h = 0; h < heads; ++h) {
        const auto qb = qv.block(h * dh, b * window, dh, window);
        const auto kb = val(k).block(h * dh, b * window, dh, window);
        const auto vb = val(v).block(h * dh, b * window, dh, window);
        Matrix s = (qb.transpose() * kb) * scale;
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
          const double m = s.row(r).maxCoeff();
          s.row(r) = (s.row(r).array() - m).exp();
          s.row(r) /= s.row(r).sum();
        }
        probs.block(h * window, b * window, window, window) = s;
        ctx.block(h * dh, b * window, dh, window).noalias() = vb * s.transpose();
      }
    }
    const int out = leaf(std::move(ctx));
    nodes_.back().back = [this, q, k, v, out, heads, window, dh, nb, scale,
                          probs = std::move(probs)] {
      const Matrix& g = grad(out);
      Matrix& gq = grad(q);
      Matrix& gk = grad(k);
      Matrix& gv = grad(v);
      for (Eigen::Index b = 0; b < nb; ++b) {
        for (int h = 0; h < heads; ++h) {
          const auto p = probs.block(h * window, b * window, window, window);
          const auto gc = g.block(h * dh, b * window, dh, window);
          const auto qb = val(q).block(h * dh, b * window, dh, window);
          const auto kb = val(k).block(h * dh, b * window, dh, window);
          const auto vb = val(v).block(h * dh, b * window, dh, window);
          gv.block(h * dh, b * window, dh, window).noalias() += gc * p;
          Matrix dp = gc.transpose() * vb;  // window x window, same layout as p
          Matrix ds(window, window);
          for (Eigen::Index r = 0; r < window; ++r) {
            const double dot = dp.row(r).dot(p.row(r));
            ds.row(r) = (dp.row(r).array() - dot) * p.row(r).array();
          }
          gq.block(h * dh, b * window, dh, window).noalias() += kb * ds.transpose() * scale;
          gk.block(h * dh, b * window, dh, window).noalias() += qb * ds * scale;
        }
      }
    };
    return out;
  }

  // Attention pooling over each window: scores come from a learned affine
  // map of `src` tokens, the softmax weights then average the `values`
  // tokens. src and values may be different nodes of equal column count.
  // w: 1 x d row node, b: 1 x 1. Output is d x B, one column per window.
  int attention_pool(int src, int values, int w, int b, int window) {
    const Matrix& sv = val(src);
    const Matrix& vv = val(values);
    const Eigen::Index n = sv.cols();
    if (vv.cols() != n) throw InputError("attention_pool: src/values column counts differ");
    if (val(w).rows() != 1 || val(w).cols() != sv.rows() || val(b).size() != 1)
      throw InputError("attention_pool: weight must be 1 x d, bias 1 x 1");
    if (window < 1 || n % window != 0) throw InputError("attention_pool: columns not divisible by window");
    const Eigen::Index nb = n / window;

    Eigen::RowVectorXd scores = (val(w) * sv).row(0);
    scores.array() += val(b)(0, 0);
    Eigen::RowVectorXd p(n);
    for (Eigen::Index i = 0; i < nb; ++i) {
      const auto seg = scores.segment(i * window, window);
      const double m = seg.maxCoeff();
      p.segment(i * window, window) = (seg.array() - m).exp();
      p.segment(i * window, window) /= p.segment(i * window, window).sum();
    }
    Matrix y(vv.rows(), nb);
    for (Eigen::Index i = 0; i < nb; ++i)
      y.col(i).noalias() = vv.middleCols(i * window, window) * p.segment(i * window, window).transpose();
    const int out = leaf(std::move(y));
    nodes_.back().back = [this, src, values, w, b, out, window, nb, p = std::move(p)] {
      const Matrix& g = grad(out);
      Matrix& gvals = grad(values);
      Eigen::RowVectorXd dp(p.size());
      for (Eigen::Index i = 0; i < nb; ++i) {
        gvals.middleCols(i * window, window).noalias() +=
            g.col(i) * p.segment(i * window, window);
        dp.segment(i * window, window) =
            g.col(i).transpose() * val(values).middleCols(i * window, window);
      }
      Eigen::RowVectorXd ds(p.size());
      for (Eigen::Index i = 0; i < nb; ++i) {
        const auto pi = p.segment(i * window, window);
        const auto di = dp.segment(i * window, window);
        ds.segment(i * window, window) = (di.array() - di.dot(pi)) * pi.array();
      }
      grad(w).noalias() += ds * val(src).transpose();
      grad(b)(0, 0) += ds.sum();
      grad(src).noalias() += val(w).transpose() * ds;
    };
    return out;
  }

  // y = sum of all entries, as a 1x1 node.
  int sum_all(int x) {
    const int out = leaf(Matrix::Constant(1, 1, val(x).sum()));
    nodes_.back().back = [this, x, out] { grad(x).array() += grad(out)(0, 0); };
    return out;
  }

  // Mean squared error of a 1 x B prediction row against fixed targets.
  int mse_loss(int pred, Eigen::RowVectorXd targets) {
    const Matrix& pv = val(pred);
    if (pv.rows() != 1 || pv.cols() != targets.cols())
      throw InputError("mse_loss: prediction must be 1 x targets");
    const Eigen::RowVectorXd diff = pv.row(0) - targets;
    const int out = leaf(Matrix::Constant(1, 1, diff.squaredNorm() / static_cast<double>(diff.size())));
    nodes_.back().back = [this, pred, out, diff = std::move(diff)] {
      grad(pred).row(0) += grad(out)(0, 0) * (2.0 / static_cast<double>(diff.size())) * diff;
    };
    return out;
  }

  // Propagates d(loss)/d(node) to every node reachable from `loss`.
  void backward(int loss) {
    if (val(loss).size() != 1) throw InputError("backward: loss must be scalar");
    grad(loss)(0, 0) = 1.0;
    for (int i = loss; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      if (n.back && n.grad.size() != 0) n.back();
    }
  }

  std::size_t size() const { return nodes_.size(); }

  // Drops every node with id >= n; earlier ids stay valid. Lets a caller
  // rewind to a checkpoint (say, right after binding parameters) instead of
  // rebuilding the whole tape.
  void truncate(std::size_t n) {
    if (n > nodes_.size()) throw InputError("truncate: target exceeds tape size");
    nodes_.resize(n);
  }

 private:
  struct Node {
    Matrix val;
    Matrix grad;
    std::function<void()> back;
  };
  std::vector<Node> nodes_;
};

}  // namespace gprloc
