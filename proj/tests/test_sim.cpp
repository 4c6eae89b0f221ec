#include <gtest/gtest.h>

#include <cmath>

#include "gprloc/sim/radargram.hpp"
#include "gprloc/sim/sequence.hpp"

namespace gprloc {
namespace {

MotionProfile straight_profile(double length_m, double speed, double slip = 0.0) {
  MotionProfile m;
  m.slip_ratio = slip;
  Waypoint a, b;
  a.time = 0.0;
  b.time = length_m / speed;
  b.x = length_m;
  m.waypoints = {a, b};
  return m;
}

TEST(ReflectionCoeff, KnownValues) {
  EXPECT_DOUBLE_EQ(reflection_coeff(4.0, 4.0), 0.0);
  EXPECT_DOUBLE_EQ(reflection_coeff(4.0, 9.0), -0.2);
  EXPECT_DOUBLE_EQ(reflection_coeff(9.0, 4.0), 0.2);
  EXPECT_GT(reflection_coeff(4.0, 1.0), 0.0);  // void reflects with positive sign
}

TEST(Ricker, PeakAndZeroCrossings) {
  EXPECT_DOUBLE_EQ(ricker(0.0, 0.5), 1.0);
  // Zeros of (1 - 2u^2) at u = 1/sqrt(2), u = pi f t.
  const double t0 = 1.0 / (std::numbers::pi * 0.5 * std::numbers::sqrt2);
  EXPECT_NEAR(ricker(t0, 0.5), 0.0, 1e-12);
  EXPECT_LT(ricker(1.5 * t0, 0.5), 0.0);
}

TEST(TraceResponse, DirectWaveOnlyWhenSceneEmpty) {
  ScatterScene scene;
  scene.wow_coefficients = {};
  auto s = trace_response(scene, 0.0);
  EXPECT_NEAR(s[kDirectWaveIndex], scene.direct_wave_amplitude, 1e-12);
  for (Eigen::Index i = 60; i < s.size(); ++i) EXPECT_DOUBLE_EQ(s[i], 0.0);
  // And is independent of antenna position.
  auto s2 = trace_response(scene, 12.5);
  EXPECT_TRUE((s.array() == s2.array()).all());
}

TEST(TraceResponse, TwoWayTravelTimePlacesEcho) {
  ScatterScene scene;
  scene.direct_wave_amplitude = 0.0;
  scene.wow_coefficients = {};
  scene.host_permittivity = 4.0;
  Scatterer sc;
  sc.x = 0.0;
  sc.depth = 1.0;
  sc.permittivity = 9.0;
  scene.scatterers = {sc};

  auto s = trace_response(scene, 0.0);
  Eigen::Index peak;
  s.cwiseAbs().maxCoeff(&peak);
  const double tau_ns = 2.0 * 1.0 * std::sqrt(4.0) / kSpeedOfLightMPerNs;
  const auto expected = static_cast<Eigen::Index>(std::round(tau_ns / scene.sample_dt_ns));
  EXPECT_NEAR(static_cast<double>(peak), static_cast<double>(expected), 1.0);
  // Reflection is negative going into the higher-permittivity target.
  EXPECT_LT(s[peak], 0.0);
}

TEST(TraceResponse, SuperpositionOfScatterers) {
  ScatterScene base;
  base.direct_wave_amplitude = 0.0;
  base.wow_coefficients = {};
  Scatterer a{1.0, 0.6, 9.0, 0.0};
  Scatterer b{2.5, 1.1, 2.0, 0.0};

  ScatterScene sa = base, sb = base, sab = base;
  sa.scatterers = {a};
  sb.scatterers = {b};
  sab.scatterers = {a, b};
  const double pos = 1.7;
  Eigen::VectorXd sum = trace_response(sa, pos) + trace_response(sb, pos);
  EXPECT_LT((trace_response(sab, pos) - sum).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(TraceResponse, WowPolynomialAdds) {
  ScatterScene scene;
  scene.direct_wave_amplitude = 0.0;
  scene.wow_coefficients = {2.0, 0.01, -1e-4, 2e-7};
  auto s = trace_response(scene, 0.0);
  for (Eigen::Index i : {0, 50, 150}) {
    const double t = static_cast<double>(i);
    EXPECT_NEAR(s[i], 2.0 + 0.01 * t - 1e-4 * t * t + 2e-7 * t * t * t, 1e-12);
  }
}

TEST(TraceResponse, HyperbolaApexAtClosestApproach) {
  ScatterScene scene;
  scene.direct_wave_amplitude = 0.0;
  scene.wow_coefficients = {};
  Scatterer sc;
  sc.x = 5.0;
  sc.depth = 0.8;
  sc.permittivity = 9.0;
  scene.scatterers = {sc};

  std::vector<Eigen::Index> peaks;
  std::vector<double> xs;
  for (double x = 3.0; x <= 7.001; x += 0.25) {
    auto s = trace_response(scene, x);
    Eigen::Index p;
    s.cwiseAbs().maxCoeff(&p);
    peaks.push_back(p);
    xs.push_back(x);
  }
  const std::size_t apex = 4;  // x = 4.0 .. symmetric window around 5.0
  const std::size_t mid = xs.size() / 2;
  ASSERT_DOUBLE_EQ(xs[mid], 5.0);
  for (std::size_t i = 0; i < peaks.size(); ++i) EXPECT_GE(peaks[i], peaks[mid]);
  // Symmetry about the apex.
  for (std::size_t k = 1; k + mid < peaks.size(); ++k)
    EXPECT_NEAR(double(peaks[mid + k]), double(peaks[mid - k]), 1.0);
  // Flanks rise away from the apex.
  EXPECT_GT(peaks[apex - 4], peaks[mid]);

  // Doubling the depth doubles the apex travel time.
  ScatterScene deep = scene;
  deep.scatterers[0].depth = 1.6;
  auto shallow_trace = trace_response(scene, 5.0);
  auto deep_trace = trace_response(deep, 5.0);
  Eigen::Index p1, p2;
  shallow_trace.cwiseAbs().maxCoeff(&p1);
  deep_trace.cwiseAbs().maxCoeff(&p2);
  EXPECT_NEAR(double(p2), 2.0 * double(p1), 2.0);
}

TEST(TraceResponse, NoiseIsSeededAndAdditive) {
  ScatterScene scene;
  scene.noise_sigma = 0.5;
  GaussianStream g1(7), g2(7), g3(8);
  auto a = trace_response(scene, 1.0, &g1);
  auto b = trace_response(scene, 1.0, &g2);
  auto c = trace_response(scene, 1.0, &g3);
  EXPECT_TRUE((a.array() == b.array()).all());
  EXPECT_FALSE((a.array() == c.array()).all());
}

TEST(PathSampler, PosesAndArcLength) {
  MotionProfile m;
  Waypoint a, b, c;
  a.time = 0.0;
  b.time = 10.0;
  b.x = 4.0;
  c.time = 20.0;
  c.x = 4.0;
  c.y = 3.0;
  m.waypoints = {a, b, c};
  PathSampler path(m);

  EXPECT_DOUBLE_EQ(path.total_length(), 7.0);
  EXPECT_DOUBLE_EQ(path.arc_length_at(5.0), 2.0);
  EXPECT_DOUBLE_EQ(path.arc_length_at(15.0), 4.0 + 1.5);
  auto p = path.pose_at(5.0);
  EXPECT_DOUBLE_EQ(p.x, 2.0);
  EXPECT_DOUBLE_EQ(p.y, 0.0);
  EXPECT_DOUBLE_EQ(path.pose_at(0.0).yaw, 0.0);
  EXPECT_NEAR(path.pose_at(20.0).yaw, std::numbers::pi / 2, 1e-12);
  EXPECT_DOUBLE_EQ(path.speed_at(2.0), 0.4);
}

TEST(PathSampler, ZeroLengthPathThrows) {
  MotionProfile m;
  Waypoint a, b;
  a.time = 0.0;
  b.time = 5.0;
  m.waypoints = {a, b};
  EXPECT_THROW(PathSampler{m}, ConfigError);
}

TEST(GenerateSequence, TruthStepsSumToPathLength) {
  ScatterScene scene;
  auto profile = straight_profile(12.0, 0.15);
  auto seq = generate_sequence(scene, profile, 3);
  double total = 0.0;
  for (double d : seq.truth_step) {
    EXPECT_GE(d, 0.0);
    total += d;
  }
  PathSampler path(profile);
  const double covered = path.arc_length_at(seq.traces.back().timestamp);
  EXPECT_NEAR(total, covered, 1e-9);
  ASSERT_EQ(seq.truth.size(), seq.traces.size());
  ASSERT_EQ(seq.truth_step.size(), seq.traces.size() - 1);
}

TEST(GenerateSequence, ConstantSpeedGivesEqualSteps) {
  ScatterScene scene;
  auto seq = generate_sequence(scene, straight_profile(10.0, 0.2), 1);
  for (double d : seq.truth_step) EXPECT_NEAR(d, 0.2 / 1.67, 1e-9);
}

TEST(GenerateSequence, Deterministic) {
  ScatterScene scene;
  scene.noise_sigma = 0.4;
  Scatterer sc{2.0, 0.7, 9.0, 0.0};
  scene.scatterers = {sc};
  auto profile = straight_profile(8.0, 0.1, 0.1);
  profile.imu_yaw_sigma = 0.01;
  auto a = generate_sequence(scene, profile, 42);
  auto b = generate_sequence(scene, profile, 42);
  auto c = generate_sequence(scene, profile, 43);
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (std::size_t i = 0; i < a.traces.size(); ++i)
    EXPECT_TRUE((a.traces[i].samples.array() == b.traces[i].samples.array()).all());
  EXPECT_FALSE((a.traces[0].samples.array() == c.traces[0].samples.array()).all());
  for (std::size_t i = 0; i < a.imu.size(); ++i) {
    EXPECT_DOUBLE_EQ(a.imu[i].yaw, b.imu[i].yaw);
  }
}

TEST(GenerateSequence, SlipInflatesEncoderTravel) {
  ScatterScene scene;
  const double slip = 0.15;
  auto seq = generate_sequence(scene, straight_profile(20.0, 0.25, slip), 5);
  const auto& last = seq.encoders.back();
  const double reported =
      0.25 * (double(last.front_left) + double(last.front_right) + double(last.rear_left) +
              double(last.rear_right)) /
      78000.0;
  const double true_dist = 0.25 * seq.encoders.back().timestamp;
  EXPECT_NEAR(reported / true_dist, 1.0 / (1.0 - slip), 1e-3);

  // Zero slip reports the true distance up to tick quantization.
  auto clean = generate_sequence(scene, straight_profile(20.0, 0.25), 5);
  const auto& cl = clean.encoders.back();
  EXPECT_NEAR(double(cl.front_left) / 78000.0, 0.25 * cl.timestamp, 1e-4);
}

TEST(GenerateSequence, StraightDriveImuIsQuiet) {
  ScatterScene scene;
  auto seq = generate_sequence(scene, straight_profile(10.0, 0.2), 2);
  for (const auto& s : seq.imu) {
    EXPECT_DOUBLE_EQ(s.yaw, 0.0);
    EXPECT_DOUBLE_EQ(s.yaw_rate, 0.0);
    EXPECT_NEAR(s.accel_x, 0.0, 1e-9);
    EXPECT_NEAR(s.accel_y, 0.0, 1e-9);
  }
}

TEST(GenerateSequence, TurnShowsUpInImu) {
  MotionProfile m;
  Waypoint a, b, c;
  a.time = 0.0;
  b.time = 50.0;
  b.x = 10.0;
  c.time = 100.0;
  c.x = 10.0;
  c.y = 10.0;
  m.waypoints = {a, b, c};
  ScatterScene scene;
  auto seq = generate_sequence(scene, m, 9);
  // Yaw rate is concentrated at the corner; find the largest magnitude.
  double peak = 0.0;
  for (const auto& s : seq.imu) peak = std::max(peak, std::abs(s.yaw_rate));
  EXPECT_GT(peak, 0.01);
  EXPECT_NEAR(seq.imu.front().yaw, 0.0, 1e-12);
  EXPECT_NEAR(seq.imu.back().yaw, std::numbers::pi / 2, 1e-9);
}

TEST(GenerateSequence, PerWaypointSlipOverride) {
  MotionProfile m = straight_profile(10.0, 0.2, 0.0);
  m.waypoints[0].slip = 0.3;  // applies to the single segment
  ScatterScene scene;
  auto seq = generate_sequence(scene, m, 4);
  const auto& last = seq.encoders.back();
  const double reported = double(last.front_left) / 78000.0;
  const double true_dist = 0.2 * last.timestamp;
  EXPECT_NEAR(reported / true_dist, 1.0 / 0.7, 1e-3);
}

}  // namespace
}  // namespace gprloc
