#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "gprloc/signal/filters.hpp"

namespace gprloc {
namespace {

Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

std::vector<Trace> make_traces(const Eigen::MatrixXd& m, double t0 = 0.0, double dt = 0.5) {
  std::vector<Trace> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    out.push_back({m.col(j), t0 + dt * static_cast<double>(j)});
  return out;
}

// Independent dewow oracle: project out the polynomial span with normal
// equations solved by LDLT, a different path than the filter's QR.
Eigen::VectorXd dewow_oracle(const Eigen::VectorXd& x, int degree) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd v(n, degree + 1);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int d = 0; d <= degree; ++d) v(i, d) = std::pow(static_cast<double>(i), d);
  Eigen::MatrixXd gram = v.transpose() * v;
  Eigen::VectorXd coef = gram.ldlt().solve(v.transpose() * x);
  return x - v * coef;
}

TEST(ScreenAnomalies, DropsTracesBeyondLimit) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(8, 5);
  m(3, 2) = 51.0;   // beyond the trusted range
  m(4, 4) = -50.0;  // exactly at the limit stays
  auto traces = make_traces(m);
  auto kept = screen_anomalies(traces, 50.0);
  ASSERT_EQ(kept.size(), 4u);
  for (const auto& t : kept) EXPECT_LE(t.samples.cwiseAbs().maxCoeff(), 50.0);
}

TEST(StackTraces, MeansGroupsAndDropsPartial) {
  Eigen::MatrixXd m(2, 7);
  for (Eigen::Index j = 0; j < 7; ++j) m.col(j) << double(j), 10.0 * double(j);
  auto stacked = stack_traces(make_traces(m, 0.0, 1.0), 3);
  ASSERT_EQ(stacked.size(), 2u);
  EXPECT_DOUBLE_EQ(stacked[0].samples[0], 1.0);
  EXPECT_DOUBLE_EQ(stacked[0].samples[1], 10.0);
  EXPECT_DOUBLE_EQ(stacked[1].samples[0], 4.0);
  EXPECT_DOUBLE_EQ(stacked[0].timestamp, 1.0);
  EXPECT_DOUBLE_EQ(stacked[1].timestamp, 4.0);
}

TEST(StackTraces, SizeOneIsIdentity) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(6, 4);
  auto traces = make_traces(m);
  auto stacked = stack_traces(traces, 1);
  ASSERT_EQ(stacked.size(), traces.size());
  for (std::size_t i = 0; i < traces.size(); ++i)
    EXPECT_EQ(stacked[i].samples, traces[i].samples);
}

TEST(Preprocess, ScreenThenStackOrderMatters) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Constant(4, 6, 1.0);
  m(0, 1) = 90.0;  // one anomalous trace inside the first group
  auto traces = make_traces(m);
  FilterConfig cfg;
  cfg.stack_size = 3;

  auto correct = preprocess_traces(traces, cfg);
  auto swapped = screen_anomalies(stack_traces(traces, 3), cfg.anomaly_limit);
  ASSERT_EQ(correct.size(), 1u);  // 5 clean traces -> one full stack
  ASSERT_EQ(swapped.size(), 2u);  // stacking first hides the anomaly
  EXPECT_DOUBLE_EQ(correct[0].samples[0], 1.0);

  // Without anomalies the two orders agree.
  Eigen::MatrixXd clean = Eigen::MatrixXd::Random(4, 6);
  auto a = preprocess_traces(make_traces(clean), cfg);
  auto b = screen_anomalies(stack_traces(make_traces(clean), 3), cfg.anomaly_limit);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_LT((a[i].samples - b[i].samples).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BackgroundRemoval, RowMeansVanish) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Eigen::MatrixXd m(32, 9);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 25.0);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
    Eigen::MatrixXd out = background_removal(m);
    EXPECT_LT(out.rowwise().mean().cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(BackgroundRemoval, RemovesStationaryComponent) {
  Eigen::MatrixXd moving = Eigen::MatrixXd::Random(16, 8);
  Eigen::MatrixXd centered = background_removal(moving);
  Eigen::VectorXd stationary = random_vector(16, 7);
  Eigen::MatrixXd with_bg = centered.colwise() + stationary;
  EXPECT_LT((background_removal(with_bg) - centered).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BackgroundRemoval, SingleTraceGoesToZero) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Random(12, 1);
  EXPECT_LT(background_removal(m).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Dewow, AnnihilatesLowDegreePolynomials) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd x(200);
    const double c0 = coef(rng), c1 = coef(rng), c2 = coef(rng) * 1e-2, c3 = coef(rng) * 1e-4;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double t = static_cast<double>(i);
      x[i] = c0 + c1 * t + c2 * t * t + c3 * t * t * t;
    }
    Eigen::VectorXd out = dewow(x, 3);
    EXPECT_LE(out.norm(), 1e-9 * std::max(1.0, x.norm()));
  }
}

TEST(Dewow, KnownCubicResidual) {
  Eigen::VectorXd x(16);
  for (Eigen::Index i = 0; i < 16; ++i) {
    const double t = static_cast<double>(i);
    x[i] = t * t * t - 2.0 * t + 3.0;
  }
  EXPECT_LE(dewow(x, 3).norm(), 1e-9 * x.norm());
}

TEST(Dewow, MatchesLeastSquaresOracle) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::VectorXd x = 20.0 * random_vector(120, seed + 100);
    for (int degree : {0, 1, 2, 3, 5}) {
      Eigen::VectorXd got = dewow(x, degree);
      Eigen::VectorXd want = dewow_oracle(x, degree);
      EXPECT_LT((got - want).cwiseAbs().maxCoeff(), 1e-9) << "degree " << degree;
    }
  }
}

TEST(Dewow, Linearity) {
  Eigen::VectorXd x = random_vector(64, 1);
  Eigen::VectorXd y = random_vector(64, 2);
  Eigen::VectorXd lhs = dewow(Eigen::VectorXd(2.0 * x - 3.0 * y), 3);
  Eigen::VectorXd rhs = 2.0 * dewow(x, 3) - 3.0 * dewow(y, 3);
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Dewow, TooShortThrows) {
  Eigen::VectorXd x = random_vector(3, 3);
  EXPECT_THROW(dewow(x, 3), InputError);
}

TEST(SecGain, MatchesClosedFormWithClamp) {
  auto gamma = sec_gain_profile(200, 0.015, 0.0, 100);
  EXPECT_NEAR(gamma[0], 1.0, 1e-15);
  for (Eigen::Index i = 0; i < 100; ++i)
    EXPECT_NEAR(gamma[i], std::exp(0.015 * static_cast<double>(i)), 1e-12);
  for (Eigen::Index i = 100; i < 200; ++i) {
    EXPECT_NEAR(gamma[i], 4.4816890703380645, 1e-12);
    EXPECT_NEAR(gamma[i], std::exp(1.5), 1e-12);
  }
}

TEST(SecGain, PowerLawTerm) {
  auto gamma = sec_gain_profile(64, 0.02, 0.5, 40);
  EXPECT_NEAR(gamma[7], std::sqrt(7.0) * std::exp(0.14), 1e-12);
  EXPECT_NEAR(gamma[0], 0.0, 1e-15);  // 0^0.5
  EXPECT_NEAR(gamma[63], std::sqrt(40.0) * std::exp(0.8), 1e-12);
}

TEST(SecGain, AppliesPerRow) {
  Eigen::MatrixXd scan = Eigen::MatrixXd::Ones(8, 3);
  auto out = sec_gain(scan, 0.1, 0.0, 5);
  for (Eigen::Index j = 0; j < 3; ++j)
    for (Eigen::Index i = 0; i < 8; ++i)
      EXPECT_NEAR(out(i, j), std::exp(0.1 * std::min<double>(double(i), 5.0)), 1e-12);
}

TEST(FilterPipeline, RunsStagesInConfiguredOrder) {
  FilterConfig cfg;
  cfg.sec_threshold = 10;
  cfg.wavelet_levels = 2;
  Eigen::MatrixXd scan = 5.0 * Eigen::MatrixXd::Random(64, 6);

  Eigen::MatrixXd manual = scan;
  manual = background_removal(manual);
  manual = dewow(manual, cfg.dewow_degree);
  manual = sec_gain(manual, cfg.sec_a, cfg.sec_b, cfg.sec_threshold);
  manual = wavelet_denoise(manual, cfg);
  Eigen::MatrixXd got = filter_pipeline(scan, cfg);
  EXPECT_LT((got - manual).cwiseAbs().maxCoeff(), 1e-14);

  cfg.order = {FilterStage::dewow, FilterStage::background};
  Eigen::MatrixXd reordered = filter_pipeline(scan, cfg);
  Eigen::MatrixXd manual2 = background_removal(dewow(scan, cfg.dewow_degree));
  EXPECT_LT((reordered - manual2).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(FilterPipeline, Deterministic) {
  FilterConfig cfg;
  cfg.sec_threshold = 20;
  Eigen::MatrixXd scan = 8.0 * Eigen::MatrixXd::Random(200, 10);
  Eigen::MatrixXd a = filter_pipeline(scan, cfg);
  Eigen::MatrixXd b = filter_pipeline(scan, cfg);
  EXPECT_TRUE((a.array() == b.array()).all());
}

TEST(FilterPipeline, SecThresholdMustFit) {
  FilterConfig cfg;
  cfg.sec_threshold = 64;
  Eigen::MatrixXd scan = Eigen::MatrixXd::Random(64, 4);
  EXPECT_THROW(filter_pipeline(scan, cfg), ConfigError);
}

TEST(FilterConfigIo, RoundTrips) {
  FilterConfig cfg;
  cfg.anomaly_limit = 42.5;
  cfg.stack_size = 5;
  cfg.sec_a = 0.01;
  cfg.sec_b = 1.25;
  cfg.sec_threshold = 77;
  cfg.wavelet = "db4";
  cfg.wavelet_levels = 3;
  cfg.wavelet_threshold_rule = ThresholdRule::hard;
  cfg.wavelet_threshold_scale = 0.5;
  cfg.order = {FilterStage::dewow, FilterStage::sec};

  auto doc = filter_config_to_keyval(cfg);
  FilterConfig back = filter_config_from_keyval(doc.root);
  EXPECT_DOUBLE_EQ(back.anomaly_limit, cfg.anomaly_limit);
  EXPECT_EQ(back.stack_size, cfg.stack_size);
  EXPECT_DOUBLE_EQ(back.sec_a, cfg.sec_a);
  EXPECT_DOUBLE_EQ(back.sec_b, cfg.sec_b);
  EXPECT_EQ(back.sec_threshold, cfg.sec_threshold);
  EXPECT_EQ(back.wavelet, cfg.wavelet);
  EXPECT_EQ(back.wavelet_levels, cfg.wavelet_levels);
  EXPECT_EQ(back.wavelet_threshold_rule, cfg.wavelet_threshold_rule);
  EXPECT_DOUBLE_EQ(back.wavelet_threshold_scale, cfg.wavelet_threshold_scale);
  ASSERT_EQ(back.order.size(), 2u);
  EXPECT_EQ(back.order[0], FilterStage::dewow);
  EXPECT_EQ(back.order[1], FilterStage::sec);
}

TEST(FilterConfigIo, RejectsBadValues) {
  FilterConfig cfg;
  cfg.stack_size = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  auto doc = filter_config_to_keyval(FilterConfig{});
  doc.root["wavelet_threshold_rule"] = "medium";
  EXPECT_THROW(filter_config_from_keyval(doc.root), ConfigError);
}

}  // namespace
}  // namespace gprloc
