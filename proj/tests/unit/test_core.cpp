#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "dramforge/core.hpp"
#include "dramforge/rng.hpp"
#include "dramforge/sim_spec.hpp"
#include "dramforge/targets.hpp"
#include "dramforge/text.hpp"
#include "oracles.hpp"

using namespace dramforge;

TEST(Rng, SameInputsGiveSameState) {
  EXPECT_EQ(rng_new(0, 0), rng_new(0, 0));
  EXPECT_EQ(rng_new(123456789, 42), rng_new(123456789, 42));
}

TEST(Rng, StreamsDiffer) {
  auto a = rng_new(7, 0);
  auto b = rng_new(7, 1);
  EXPECT_NE(rng_uniform(a), rng_uniform(b));
}

TEST(Rng, MatchesReferenceSplitMix) {
  // state = splitmix(seed ^ stream * gamma); each uniform is the top 53
  // bits of the following output.
  const std::uint64_t seed = 7, stream = 3;
  std::uint64_t s = seed ^ (stream * 0x9E3779B97F4A7C15ull);
  s = oracle::splitmix64(s);
  auto rng = rng_new(seed, stream);
  for (int i = 0; i < 1000; ++i) {
    const double expected = static_cast<double>(oracle::splitmix64(s) >> 11) / 9007199254740992.0;
    ASSERT_EQ(rng_uniform(rng), expected) << "draw " << i;
  }
}

TEST(Rng, CopiedStateReplaysFuture) {
  auto rng = rng_new(99, 5);
  for (int i = 0; i < 17; ++i) rng_gauss(rng);  // leaves a cached deviate
  ASSERT_TRUE(rng.gauss_cache.has_value());
  RngState copy{rng.state, rng.stream_id, rng.gauss_cache};
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(rng_gauss(rng), rng_gauss(copy));
    ASSERT_EQ(rng_uniform(rng), rng_uniform(copy));
  }
}

TEST(Rng, UniformMean) {
  auto rng = rng_new(1, 0);
  double sum = 0.0;
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 1000000; ++i) {
    const double u = rng_uniform(rng);
    sum += u;
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  EXPECT_NEAR(sum / 1e6, 0.5, 0.002);
  EXPECT_GE(lo, 0.0);
  EXPECT_LT(hi, 1.0);
}

TEST(Rng, GaussMoments) {
  auto rng = rng_new(1, 0);
  double s1 = 0.0, s2 = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double g = rng_gauss(rng);
    s1 += g;
    s2 += g * g;
  }
  const double mean = s1 / n;
  EXPECT_NEAR(mean, 0.0, 0.005);
  EXPECT_NEAR(s2 / n - mean * mean, 1.0, 0.01);
}

TEST(Rng, GaussPairsShareTwoUniforms) {
  auto a = rng_new(5, 1);
  auto b = rng_new(5, 1);
  const double g1 = rng_gauss(a);
  const double g2 = rng_gauss(a);
  const double u1 = 1.0 - rng_uniform(b);
  const double u2 = rng_uniform(b);
  const double r = std::sqrt(-2.0 * std::log(u1));
  EXPECT_DOUBLE_EQ(g1, r * std::cos(2 * std::numbers::pi * u2));
  EXPECT_DOUBLE_EQ(g2, r * std::sin(2 * std::numbers::pi * u2));
  EXPECT_EQ(a.state, b.state);
}

TEST(Text, RealsRoundTrip) {
  auto rng = rng_new(3, 0);
  for (int i = 0; i < 2000; ++i) {
    const double x = (rng_uniform(rng) - 0.5) * std::pow(10.0, static_cast<int>(rng_uniform(rng) * 40) - 20);
    double back = 0.0;
    ASSERT_TRUE(text::parse_real(text::format_real(x), back));
    ASSERT_EQ(std::bit_cast<std::uint64_t>(x), std::bit_cast<std::uint64_t>(back));
  }
  double back = 0.0;
  ASSERT_TRUE(text::parse_real(text::format_real(-INFINITY), back));
  EXPECT_EQ(back, -INFINITY);
}

TEST(Text, StrictParsing) {
  double d = 0.0;
  std::int64_t i = 0;
  EXPECT_FALSE(text::parse_real("1.5x", d));
  EXPECT_FALSE(text::parse_real("", d));
  EXPECT_TRUE(text::parse_real("  2.5 ", d));
  EXPECT_EQ(d, 2.5);
  EXPECT_FALSE(text::parse_int("3.0", i));
  EXPECT_TRUE(text::parse_int("-12", i));
  EXPECT_EQ(i, -12);
  std::vector<double> v;
  EXPECT_TRUE(text::parse_real_list("0, 1.5,-2", v));
  EXPECT_EQ(v, (std::vector<double>{0.0, 1.5, -2.0}));
  EXPECT_FALSE(text::parse_real_list("1,,2", v));
}

TEST(SimSpecTest, DimensionDependentDefaults) {
  const auto s = SimSpec::defaults(4);
  EXPECT_EQ(s.start_point, Point(4, 0.0));
  EXPECT_DOUBLE_EQ(s.proposal_scale, 2.38 / 2.0);
  EXPECT_EQ(s.adaptation_period, 400);
  EXPECT_EQ(s.dr_stage_count, 1);
  EXPECT_FALSE(find_violation(s).has_value());
}

TEST(SimSpecTest, ViolationsNameTheKey) {
  auto s = SimSpec::defaults(2);
  s.dr_stage_count = 3;
  ASSERT_TRUE(find_violation(s).has_value());
  EXPECT_EQ(find_violation(s)->key, "dr_stage_count");
  s = SimSpec::defaults(2);
  s.start_point = {0.0};
  EXPECT_EQ(find_violation(s)->key, "start_point");
  s = SimSpec::defaults(2);
  s.dr_scale_factor = 1.0;
  EXPECT_EQ(find_violation(s)->key, "dr_scale_factor");
  EXPECT_THROW(validate(s), UsageError);
}

TEST(SimSpecTest, ValuesRoundTripThroughText) {
  auto s = SimSpec::defaults(3);
  s.seed = 18446744073709551615ull;
  s.start_point = {0.1, -2.0, 1e-300};
  s.target_acceptance_window = std::make_pair(0.2, 0.3);
  s.parallelism = Parallelism::single_chain;
  s.num_workers = 8;
  SimSpec back = SimSpec::defaults(3);
  for (const auto& key : spec_keys()) set_spec_value(back, key, format_spec_value(s, key));
  back.user_keys = s.user_keys;
  EXPECT_EQ(back, s);
}

TEST(SimSpecTest, BuildSpecAppliesNdimFirst) {
  const auto s = build_spec({{"seed", "5"}, {"ndim", "9"}});
  EXPECT_EQ(s.ndim, 9);
  EXPECT_EQ(s.adaptation_period, 900);
  EXPECT_EQ(s.seed, 5u);
  EXPECT_EQ(s.user_keys, (std::set<std::string>{"ndim", "seed"}));
  EXPECT_THROW(set_spec_value(const_cast<SimSpec&>(s), "no_such_key", "1"), UsageError);
}

TEST(Targets, StandardMvn) {
  const auto t = BuiltinTarget::standard_mvn(4);
  EXPECT_EQ(eval_builtin(t, std::vector<double>{0, 0, 0, 0}), 0.0);
  EXPECT_EQ(eval_builtin(t, std::vector<double>{1, 1, 1, 1}), -2.0);
  EXPECT_THROW(eval_builtin(t, std::vector<double>{1, 1}), UsageError);
}

TEST(Targets, CorrelatedMvnQuadraticForm) {
  Eigen::MatrixXd cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  Eigen::VectorXd mean(2);
  mean << 1.0, -1.0;
  const auto t = BuiltinTarget::mvn(mean, cov);
  // x^T S^{-1} x by the explicit 2x2 inverse.
  const double det = 2.0 * 1.0 - 0.36;
  const double dx = 0.5 - 1.0, dy = 0.25 + 1.0;
  const double q = (1.0 * dx * dx - 2 * 0.6 * dx * dy + 2.0 * dy * dy) / det;
  EXPECT_NEAR(eval_builtin(t, std::vector<double>{0.5, 0.25}), -0.5 * q, 1e-14);
}

TEST(Targets, MixtureFormula) {
  const double mu = 1.7;
  Eigen::VectorXd a(1), b(1);
  a << -mu;
  b << mu;
  const auto t = BuiltinTarget::gauss_mixture({0.5, 0.5}, {a, b},
                                              {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)});
  for (double x : {0.0, 0.3, -2.5, 6.0}) {
    const double expected = std::log(0.5 * oracle::normal_pdf(x, -mu, 1) + 0.5 * oracle::normal_pdf(x, mu, 1));
    EXPECT_NEAR(eval_builtin(t, std::vector<double>{x}), expected, 1e-13) << x;
  }
}

TEST(Targets, Rosenbrock) {
  const auto t = BuiltinTarget::rosenbrock(3, 2.0);
  EXPECT_EQ(eval_builtin(t, std::vector<double>{1, 1, 1}), 0.0);
  // [100 (1 - 0)^2 + 1] + [100 (0 - 1)^2 + 0] over 2
  EXPECT_DOUBLE_EQ(eval_builtin(t, std::vector<double>{0, 1, 0}), -(101.0 + 100.0) / 2.0);
}

TEST(Targets, RejectsBadParameters) {
  Eigen::MatrixXd not_pd(2, 2);
  not_pd << 1.0, 2.0, 2.0, 1.0;
  EXPECT_THROW(BuiltinTarget::mvn(Eigen::VectorXd::Zero(2), not_pd), UsageError);
  EXPECT_THROW(BuiltinTarget::rosenbrock(1, 1.0), UsageError);
  EXPECT_THROW(BuiltinTarget::gauss_mixture({0.4, 0.4}, {Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(1)},
                                            {Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)}),
               UsageError);
}

TEST(Targets, DensityChecksDimension) {
  const auto f = make_density(BuiltinTarget::standard_mvn(2));
  EXPECT_EQ(f.ndim(), 2);
  EXPECT_EQ(f(std::vector<double>{3.0, 4.0}), -12.5);
  EXPECT_THROW(f(std::vector<double>{1.0}), UsageError);
  EXPECT_THROW(TargetDensity(0, [](std::span<const double>) { return 0.0; }), UsageError);
}
