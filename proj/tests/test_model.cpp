#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <functional>

#include "gprloc/model/ablation.hpp"
#include "gprloc/model/autodiff.hpp"
#include "gprloc/model/checkpoint.hpp"
#include "gprloc/model/config.hpp"
#include "gprloc/model/gprformer.hpp"
#include "gprloc/model/train.hpp"

namespace gprloc {
namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed, double scale = 1.0) {
  GaussianStream g(seed);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = scale * g.next();
  return m;
}

// Central finite difference of a scalar graph w.r.t. one entry of one input
// matrix, rebuilt from scratch per evaluation.
double fd_entry(const std::function<double(const std::vector<Eigen::MatrixXd>&)>& f,
                std::vector<Eigen::MatrixXd> inputs, std::size_t which, Eigen::Index r,
                Eigen::Index c, double h) {
  inputs[which](r, c) += h;
  const double up = f(inputs);
  inputs[which](r, c) -= 2.0 * h;
  const double dn = f(inputs);
  return (up - dn) / (2.0 * h);
}

// Checks tape gradients of a scalar-valued graph against finite differences
// for every entry of every input.
void check_op_gradients(const std::function<int(Tape&, const std::vector<int>&)>& build,
                        const std::vector<Eigen::MatrixXd>& inputs, double tol = 1e-6,
                        double h = 1e-5) {
  auto eval = [&](const std::vector<Eigen::MatrixXd>& ins) {
    Tape t;
    std::vector<int> ids;
    for (const auto& m : ins) ids.push_back(t.leaf(m));
    return t.val(build(t, ids))(0, 0);
  };

  Tape t;
  std::vector<int> ids;
  for (const auto& m : inputs) ids.push_back(t.leaf(m));
  const int loss = build(t, ids);
  t.backward(loss);

  for (std::size_t w = 0; w < inputs.size(); ++w) {
    const Eigen::MatrixXd& g = t.grad(static_cast<int>(ids[w]));
    for (Eigen::Index c = 0; c < inputs[w].cols(); ++c) {
      for (Eigen::Index r = 0; r < inputs[w].rows(); ++r) {
        const double fd = fd_entry(eval, inputs, w, r, c, h);
        const double ad = g(r, c);
        const double denom = std::max({std::abs(fd), std::abs(ad), 1.0});
        EXPECT_NEAR(ad, fd, tol * denom) << "input " << w << " entry (" << r << "," << c << ")";
      }
    }
  }
}

TEST(Autodiff, MatmulBiasChain) {
  check_op_gradients(
      [](Tape& t, const std::vector<int>& in) {
        return t.sum_all(t.add_bias(t.matmul(in[0], in[1]), in[2]));
      },
      {random_matrix(3, 4, 11), random_matrix(4, 5, 12), random_matrix(3, 1, 13)});
}

TEST(Autodiff, LayerNormGradients) {
  check_op_gradients(
      [](Tape& t, const std::vector<int>& in) {
        return t.sum_all(t.gelu(t.layer_norm(in[0], in[1], in[2])));
      },
      {random_matrix(6, 5, 21), random_matrix(6, 1, 22, 0.5).array().abs().matrix() +
                                    Eigen::MatrixXd::Constant(6, 1, 0.5),
       random_matrix(6, 1, 23)});
}

TEST(Autodiff, SelfAttentionGradients) {
  check_op_gradients(
      [](Tape& t, const std::vector<int>& in) {
        return t.sum_all(t.self_attention(in[0], in[1], in[2], 2, 3));
      },
      {random_matrix(4, 6, 31), random_matrix(4, 6, 32), random_matrix(4, 6, 33)});
}

TEST(Autodiff, AttentionPoolGradients) {
  check_op_gradients(
      [](Tape& t, const std::vector<int>& in) {
        return t.sum_all(t.attention_pool(in[0], in[1], in[2], in[3], 3));
      },
      {random_matrix(4, 6, 41), random_matrix(4, 6, 42), random_matrix(1, 4, 43),
       random_matrix(1, 1, 44)});
}

TEST(Autodiff, BlendAndWindowBiasGradients) {
  check_op_gradients(
      [](Tape& t, const std::vector<int>& in) {
        const int x = t.add_window_bias(in[1], in[2], 2);
        return t.sum_all(t.blend(in[0], x, t.relu(in[3])));
      },
      {Eigen::MatrixXd::Constant(1, 1, 0.37), random_matrix(3, 4, 51), random_matrix(3, 2, 52),
       random_matrix(3, 4, 53)});
}

TEST(Autodiff, DropoutMaskIsDeterministicAndScaled) {
  Tape t1, t2;
  const Eigen::MatrixXd x = Eigen::MatrixXd::Ones(8, 8);
  const int a = t1.dropout(t1.leaf(x), 0.25, 99);
  const int b = t2.dropout(t2.leaf(x), 0.25, 99);
  EXPECT_EQ(t1.val(a), t2.val(b));
  // Surviving entries are scaled by 1/keep.
  for (Eigen::Index c = 0; c < 8; ++c)
    for (Eigen::Index r = 0; r < 8; ++r) {
      const double v = t1.val(a)(r, c);
      EXPECT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.75) < 1e-12);
    }
}

TEST(Autodiff, MseLossValues) {
  Tape t;
  Eigen::MatrixXd pred(1, 2);
  pred << 0.0, 1.0;
  Eigen::RowVectorXd truth(2);
  truth << 0.0, 3.0;
  EXPECT_DOUBLE_EQ(t.val(t.mse_loss(t.leaf(pred), truth))(0, 0), 2.0);

  Tape t2;
  Eigen::MatrixXd same = Eigen::MatrixXd::Constant(1, 3, 0.7);
  EXPECT_DOUBLE_EQ(t2.val(t2.mse_loss(t2.leaf(same), same.row(0)))(0, 0), 0.0);

  Tape t3;
  Eigen::MatrixXd two = Eigen::MatrixXd::Constant(1, 1, 2.5);
  Eigen::RowVectorXd half = Eigen::RowVectorXd::Constant(1, 0.5);
  EXPECT_DOUBLE_EQ(t3.val(t3.mse_loss(t3.leaf(two), half))(0, 0), 4.0);
}

ModelConfig reduced_config() {
  ModelConfig cfg;
  cfg.input_dim = 20;
  cfg.token_dim = 16;
  cfg.window_k = 4;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.head_hidden = 8;
  cfg.dropout_p = 0.1;
  cfg.seed = 7;
  return cfg;
}

TEST(GprFormer, ParameterCountPinned) {
  EXPECT_EQ(param_count(ModelConfig{}), 4038660u);
}

TEST(GprFormer, ForwardIsDeterministicAndPure) {
  const ModelConfig cfg = reduced_config();
  const ModelParams p = init_params(cfg);
  const Eigen::MatrixXd x = random_matrix(cfg.input_dim, cfg.window_k, 77, 0.3);
  const double a = predict_window(p, x);
  const double b = predict_window(p, x);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::isfinite(a));
}

TEST(GprFormer, PermutingTracesChangesOutput) {
  const ModelConfig cfg = reduced_config();
  const ModelParams p = init_params(cfg);
  const Eigen::MatrixXd x = random_matrix(cfg.input_dim, cfg.window_k, 78, 0.3);
  Eigen::MatrixXd perm = x;
  perm.col(0).swap(perm.col(3));
  EXPECT_GT(std::abs(predict_window(p, x) - predict_window(p, perm)), 1e-12);
}

TEST(GprFormer, AlphaOneIgnoresPreTokenPoolPath) {
  ModelConfig cfg = reduced_config();
  cfg.alpha_init = 1.0;
  ModelParams p = init_params(cfg);
  const Eigen::MatrixXd x = random_matrix(cfg.input_dim, cfg.window_k, 79, 0.3);
  const double base = predict_window(p, x);
  p.t.pool_pre_w.setZero();
  p.t.pool_pre_b.setZero();
  EXPECT_EQ(predict_window(p, x), base);
}

TEST(GprFormer, AlphaZeroIgnoresPostTokenPoolPath) {
  ModelConfig cfg = reduced_config();
  cfg.alpha_init = 0.0;
  ModelParams p = init_params(cfg);
  const Eigen::MatrixXd x = random_matrix(cfg.input_dim, cfg.window_k, 80, 0.3);
  const double base = predict_window(p, x);
  p.t.pool_post_w.setZero();
  p.t.pool_post_b.setZero();
  EXPECT_EQ(predict_window(p, x), base);
}

TEST(GprFormer, PostOnlyPoolingIgnoresAlpha) {
  ModelConfig cfg = reduced_config();
  cfg.pooling = Pooling::kPostOnly;
  ModelParams p = init_params(cfg);
  const Eigen::MatrixXd x = random_matrix(cfg.input_dim, cfg.window_k, 81, 0.3);
  const double base = predict_window(p, x);
  p.t.alpha(0, 0) = 0.123;
  EXPECT_EQ(predict_window(p, x), base);
}

TEST(GprFormer, ShapeErrors) {
  const ModelConfig cfg = reduced_config();
  const ModelParams p = init_params(cfg);
  EXPECT_THROW(predict_window(p, random_matrix(cfg.input_dim + 1, cfg.window_k, 82)), InputError);
  EXPECT_THROW(predict_window(p, random_matrix(cfg.input_dim, cfg.window_k + 1, 83)), InputError);
}

// A reused session rewinds the tape between calls; every call must still be
// bitwise identical to a fresh bind, with no state leaking across windows.
TEST(GprFormer, ReusedPredictorMatchesFreshBind) {
  const ModelConfig cfg = reduced_config();
  const ModelParams p = init_params(cfg);
  Predictor session(p);
  for (int i = 0; i < 5; ++i) {
    const Eigen::MatrixXd x =
        random_matrix(cfg.input_dim, cfg.window_k, 600 + static_cast<std::uint64_t>(i), 0.3);
    EXPECT_EQ(session.window(x), predict_window(p, x)) << "window " << i;
  }
  EXPECT_THROW(session.window(random_matrix(cfg.input_dim, cfg.window_k + 1, 84)), InputError);
}

// Full-model gradient check on the reduced config, dropout active with a
// fixed mask. Relative error uses max(|ad|, |fd|, 1) as denominator, which
// acts as an absolute tolerance for small entries.
TEST(GprFormer, GradientsMatchFiniteDifferences) {
  const ModelConfig cfg = reduced_config();
  ModelParams params = init_params(cfg);
  const int batch = 3;
  const Eigen::MatrixXd x = random_matrix(cfg.input_dim, cfg.window_k * batch, 90, 0.4);
  Eigen::RowVectorXd y(batch);
  y << 0.12, -0.3, 0.55;

  ForwardPlan plan;
  plan.train = true;
  plan.seed = 1234;
  plan.step = 5;

  auto loss_value = [&](const ModelParams& pp) {
    Tape t;
    const ParamSet<int> b = bind_params(t, pp);
    return t.val(t.mse_loss(gprformer_forward(t, b, cfg, x, plan), y))(0, 0);
  };

  Tape tape;
  const ParamSet<int> bound = bind_params(tape, params);
  const int loss = tape.mse_loss(gprformer_forward(tape, bound, cfg, x, plan), y);
  tape.backward(loss);

  std::vector<Eigen::MatrixXd*> tensors;
  std::vector<std::string> names;
  for_each_param(params.t, [&](const std::string& n, Eigen::MatrixXd& m) {
    tensors.push_back(&m);
    names.push_back(n);
  });
  std::vector<int> ids;
  for_each_param(bound, [&](const std::string&, const int& id) { ids.push_back(id); });

  const double h = 1e-4;
  int checked = 0;
  bool alpha_seen = false, pos_seen = false;
  double max_rel = 0.0;
  SplitMix64 pick(4242);
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    Eigen::MatrixXd& m = *tensors[i];
    const Eigen::MatrixXd& g = tape.grad(ids[i]);
    const int samples = static_cast<int>(std::min<Eigen::Index>(m.size(), 2));
    for (int s = 0; s < samples; ++s) {
      const auto flat = static_cast<Eigen::Index>(pick.next() % static_cast<std::uint64_t>(m.size()));
      const Eigen::Index r = flat % m.rows(), c = flat / m.rows();
      const double orig = m(r, c);
      m(r, c) = orig + h;
      const double up = loss_value(params);
      m(r, c) = orig - h;
      const double dn = loss_value(params);
      m(r, c) = orig;
      const double fd = (up - dn) / (2.0 * h);
      const double ad = g(r, c);
      const double rel = std::abs(ad - fd) / std::max({std::abs(ad), std::abs(fd), 1.0});
      max_rel = std::max(max_rel, rel);
      EXPECT_LE(rel, 1e-4) << names[i] << "(" << r << "," << c << "): ad=" << ad
                           << " fd=" << fd;
      ++checked;
      if (names[i] == "alpha") alpha_seen = true;
      if (names[i] == "pos") pos_seen = true;
    }
  }
  EXPECT_GE(checked, 50);
  EXPECT_TRUE(alpha_seen);
  EXPECT_TRUE(pos_seen);
  std::printf("gradient check: %d params, max rel err %.3e\n", checked, max_rel);
}

TEST(Train, ConstantLabelsConvergeToConstantPredictor) {
  ModelConfig cfg = reduced_config();
  cfg.dropout_p = 0.05;
  TrainConfig tcfg;
  tcfg.batch_size = 16;
  tcfg.epochs = 30;
  tcfg.lr_start = 2e-3;
  tcfg.lr_end = 1e-4;

  TrainSet data;
  for (int i = 0; i < 96; ++i)
    data.push_back({random_matrix(cfg.input_dim, cfg.window_k, 500 + static_cast<std::uint64_t>(i), 0.3), 0.4});
  const TrainResult res = train(data, data, cfg, tcfg);
  ASSERT_EQ(res.history.size(), 30u);
  const double first = res.history.front().train_mse;
  const double last = res.history.back().val_mse;
  EXPECT_LT(last, 0.5 * first);
  EXPECT_LT(eval_mse(res.best, data), 0.02);
}

TEST(Train, IdenticalSeedsGiveIdenticalHistory) {
  ModelConfig cfg = reduced_config();
  TrainConfig tcfg;
  tcfg.batch_size = 8;
  tcfg.epochs = 4;
  TrainSet data;
  for (int i = 0; i < 24; ++i)
    data.push_back({random_matrix(cfg.input_dim, cfg.window_k, 600 + static_cast<std::uint64_t>(i), 0.3),
                    0.1 * static_cast<double>(i % 5)});
  const TrainResult a = train(data, data, cfg, tcfg);
  const TrainResult b = train(data, data, cfg, tcfg);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].train_mse, b.history[i].train_mse);
    EXPECT_EQ(a.history[i].val_mse, b.history[i].val_mse);
    EXPECT_EQ(a.history[i].alpha, b.history[i].alpha);
  }
}

TEST(Train, FrozenAlphaStaysAtInit) {
  ModelConfig cfg = reduced_config();
  cfg.alpha_init = 0.3;
  cfg.alpha_frozen = true;
  TrainConfig tcfg;
  tcfg.batch_size = 8;
  tcfg.epochs = 3;
  TrainSet data;
  for (int i = 0; i < 16; ++i)
    data.push_back({random_matrix(cfg.input_dim, cfg.window_k, 700 + static_cast<std::uint64_t>(i), 0.3), 0.2});
  const TrainResult res = train(data, data, cfg, tcfg);
  for (const auto& e : res.history) EXPECT_DOUBLE_EQ(e.alpha, 0.3);
  EXPECT_DOUBLE_EQ(res.best.t.alpha(0, 0), 0.3);
}

TEST(Checkpoint, RoundTripsBitwise) {
  const ModelConfig cfg = reduced_config();
  const ModelParams p = init_params(cfg);
  const std::string path = testing::TempDir() + "roundtrip.ckpt";
  save_checkpoint(p, path);
  const ModelParams q = load_checkpoint(path);
  EXPECT_EQ(q.config.token_dim, cfg.token_dim);
  EXPECT_EQ(q.config.window_k, cfg.window_k);
  EXPECT_EQ(q.config.seed, cfg.seed);

  std::vector<const Eigen::MatrixXd*> pa, qa;
  for_each_param(p.t, [&](const std::string&, const Eigen::MatrixXd& m) { pa.push_back(&m); });
  for_each_param(q.t, [&](const std::string&, const Eigen::MatrixXd& m) { qa.push_back(&m); });
  ASSERT_EQ(pa.size(), qa.size());
  for (std::size_t i = 0; i < pa.size(); ++i) EXPECT_EQ(*pa[i], *qa[i]);
}

TEST(GprFormer, NoEncoderVariantRunsAndShrinks) {
  ModelConfig cfg = reduced_config();
  cfg.use_encoder = false;
  cfg.token_dim = cfg.input_dim;
  ModelConfig same_dims = cfg;
  same_dims.use_encoder = true;
  const std::size_t enc_size =
      static_cast<std::size_t>(cfg.token_dim) * static_cast<std::size_t>(cfg.input_dim + 1);
  EXPECT_EQ(param_count(cfg) + enc_size, param_count(same_dims));
  const ModelParams p = init_params(cfg);
  EXPECT_TRUE(std::isfinite(predict_window(p, random_matrix(cfg.input_dim, cfg.window_k, 85, 0.3))));

  // Round-trips through a checkpoint with the empty encoder slots.
  const std::string path = testing::TempDir() + "noenc.ckpt";
  save_checkpoint(p, path);
  const ModelParams q = load_checkpoint(path);
  EXPECT_FALSE(q.config.use_encoder);
  EXPECT_EQ(predict_window(q, random_matrix(cfg.input_dim, cfg.window_k, 86, 0.3)),
            predict_window(p, random_matrix(cfg.input_dim, cfg.window_k, 86, 0.3)));
}

TEST(Ablation, AxisNamesRoundTrip) {
  for (const auto a : {AblationAxis::kWindow, AblationAxis::kAlpha, AblationAxis::kLayers,
                       AblationAxis::kDropout, AblationAxis::kPooling, AblationAxis::kEncoder,
                       AblationAxis::kFiltering})
    EXPECT_EQ(parse_ablation_axis(to_string(a)), a);
  EXPECT_THROW(parse_ablation_axis("banana"), ConfigError);
}

TEST(Ablation, MutationsMatchProtocol) {
  ModelConfig cfg;
  bool filtered = true;

  EXPECT_TRUE(apply_ablation(AblationAxis::kWindow, 15, cfg, filtered));
  EXPECT_EQ(cfg.window_k, 15);

  cfg = ModelConfig{};
  EXPECT_FALSE(apply_ablation(AblationAxis::kAlpha, 0.7, cfg, filtered));
  EXPECT_DOUBLE_EQ(cfg.alpha_init, 0.7);
  EXPECT_TRUE(cfg.alpha_frozen);

  cfg = ModelConfig{};
  apply_ablation(AblationAxis::kLayers, 1, cfg, filtered);
  EXPECT_EQ(cfg.layers, 1);
  EXPECT_EQ(cfg.heads, 1);

  cfg = ModelConfig{};
  apply_ablation(AblationAxis::kPooling, 0, cfg, filtered);
  EXPECT_EQ(cfg.pooling, Pooling::kPostOnly);

  cfg = ModelConfig{};
  apply_ablation(AblationAxis::kEncoder, 0, cfg, filtered);
  EXPECT_FALSE(cfg.use_encoder);
  EXPECT_EQ(cfg.token_dim, cfg.input_dim);

  cfg = ModelConfig{};
  EXPECT_TRUE(apply_ablation(AblationAxis::kFiltering, 0, cfg, filtered));
  EXPECT_FALSE(filtered);

  EXPECT_THROW(apply_ablation(AblationAxis::kWindow, 7.5, cfg, filtered), ConfigError);
  EXPECT_THROW(apply_ablation(AblationAxis::kAlpha, 1.5, cfg, filtered), ConfigError);
  EXPECT_THROW(apply_ablation(AblationAxis::kPooling, 0.3, cfg, filtered), ConfigError);
}

TEST(Ablation, SweepProducesOneRowPerValue) {
  ModelConfig mcfg = reduced_config();
  TrainConfig tcfg;
  tcfg.batch_size = 8;
  tcfg.epochs = 2;

  std::vector<double> provider_ks;
  const auto provider = [&](const ModelConfig& c, bool) {
    provider_ks.push_back(c.window_k);
    SweepData d;
    for (int i = 0; i < 16; ++i)
      d.train.push_back({random_matrix(c.input_dim, c.window_k, 900 + static_cast<std::uint64_t>(i), 0.3), 0.1});
    d.val = d.train;
    return d;
  };
  const auto evaluate = [](const ModelParams& p, bool) {
    return 1000.0 * static_cast<double>(p.config.window_k);  // stand-in score
  };

  const std::vector<double> values{3, 4, 5};
  const auto rows = ablation_sweep(AblationAxis::kWindow, values, mcfg, tcfg, provider, evaluate);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(provider_ks, values);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].value, values[i]);
    EXPECT_EQ(rows[i].rmse_mm, 1000.0 * values[i]);
  }
  EXPECT_EQ(best_sweep_row(rows), 0u);
  EXPECT_THROW(ablation_sweep(AblationAxis::kWindow, {}, mcfg, tcfg, provider, evaluate),
               InputError);
}

TEST(Checkpoint, RejectsForeignFile) {
  const std::string path = testing::TempDir() + "not_a.ckpt";
  {
    std::ofstream os(path);
    os << "something else entirely\n";
  }
  EXPECT_THROW(load_checkpoint(path), InputError);
}

}  // namespace
}  // namespace gprloc
