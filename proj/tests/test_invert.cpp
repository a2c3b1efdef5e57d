#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles/oracles.hpp"
#include "quickinv/errors.hpp"
#include "quickinv/invert.hpp"

using namespace quickinv;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

double laplace_f1(double s) { return 1.0 / ((1.0 + s) * (1.0 + s)); }
cplx laplace_f1c(cplx s) { return 1.0 / ((1.0 + s) * (1.0 + s)); }

}  // namespace

TEST(Stehfest, WeightsForFourteenTerms) {
  // Reference weights from exact rational arithmetic.
  const std::vector<double> v = stehfest_weights(14);
  ASSERT_EQ(v.size(), 14u);
  EXPECT_NEAR(v[0], 1.0 / 360.0, 1e-15);
  EXPECT_NEAR(v[1], -6.40277777777778, 1e-11);
  EXPECT_NEAR(v[2], 924.05, 1e-9);
  EXPECT_NEAR(v[9], -170137188.083333, 1e-5);
  EXPECT_NEAR(v[13], -3925554.96666667, 1e-6);
}

TEST(Stehfest, WeightSums) {
  for (int n : {4, 8, 14, 18}) {
    const std::vector<double> v = stehfest_weights(n);
    double sum = 0.0;
    double harmonic = 0.0;
    double mass = 0.0;
    for (int k = 1; k <= n; ++k) {
      sum += v[k - 1];
      harmonic += v[k - 1] / k;
      mass += std::abs(v[k - 1]);
    }
    // Cancellation across weights of size up to 1e9 limits the attainable sum.
    const double roundoff = 4.0 * n * 2.2e-16 * mass;
    EXPECT_NEAR(sum, 0.0, roundoff) << n;
    EXPECT_NEAR(harmonic, 1.0, roundoff) << n;
  }
}

TEST(Stehfest, MatchesExactArithmeticTruncation) {
  // The n = 14 sum for 1/(1+s)^2 evaluated in 50-digit arithmetic; the gap
  // to e^{-1} is the method's own truncation error.
  EXPECT_NEAR(gaver_stehfest(laplace_f1, 1.0, 14), 0.367881454628654, 1e-9);
  EXPECT_NEAR(gaver_stehfest(laplace_f1, 0.5, 14), 0.303265448653385, 1e-9);
  EXPECT_NEAR(gaver_stehfest(laplace_f1, 1.0, 18), 0.367879463794486, 1e-7);
}

TEST(Stehfest, ConstantAndZero) {
  for (double t : {0.1, 1.0, 7.0}) {
    EXPECT_NEAR(gaver_stehfest([](double s) { return 1.0 / s; }, t, 14), 1.0, 1e-8) << t;
    EXPECT_EQ(gaver_stehfest([](double) { return 0.0; }, t, 14), 0.0);
  }
}

TEST(Stehfest, RejectsBadTermCounts) {
  EXPECT_THROW(stehfest_weights(20), OverflowRisk);
  EXPECT_THROW(stehfest_weights(13), InvalidConfig);
  EXPECT_THROW(stehfest_weights(2), InvalidConfig);
  EXPECT_THROW(gaver_stehfest(laplace_f1, 0.0, 14), DomainError);
}

TEST(Talbot, ClosedPairs) {
  EXPECT_NEAR(talbot(laplace_f1c, 1.0, 32), std::exp(-1.0), 1e-10);
  const LaplaceImage f5 = [](cplx s) {
    const cplx b = s + 1.0;
    return 2.0 / (b * b) - 2.0 / (b * b * b);
  };
  EXPECT_NEAR(talbot(f5, 2.0, 32), 0.0, 1e-9);
  EXPECT_EQ(talbot([](cplx) { return cplx{}; }, 1.0, 32), 0.0);
}

TEST(Talbot, Errors) {
  const LaplaceImage bad = [](cplx) { return cplx{std::nan(""), 0.0}; };
  EXPECT_THROW(talbot(bad, 1.0, 32), EvaluationError);
  EXPECT_THROW(talbot(laplace_f1c, 1.0, 4), InvalidConfig);
}

TEST(InversionMethod, ParseAndValidate) {
  EXPECT_EQ(parse_inversion_kind("stehfest"), InversionKind::GaverStehfest);
  EXPECT_EQ(parse_inversion_kind("Talbot"), InversionKind::Talbot);
  EXPECT_EQ(parse_inversion_kind("quick"), InversionKind::QuickSinCos);
  EXPECT_FALSE(parse_inversion_kind("euler").has_value());
  InversionMethod m;
  m.c = 0.0;
  EXPECT_THROW(m.validate(), InvalidConfig);
  m = InversionMethod{};
  m.m = 6;
  EXPECT_THROW(m.validate(), InvalidConfig);
}

TEST(InvertGrid, TalbotOnF1) {
  InversionMethod m;
  m.kind = InversionKind::Talbot;
  const InversionResult r = invert_grid(m, *find_function("f1"), {0.5, 1.0, 2.0}, QuadConfig{});
  ASSERT_EQ(r.estimates.size(), 3u);
  ASSERT_TRUE(r.rel_errors.has_value());
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE((*r.rel_errors)[i], 1e-9);
    EXPECT_TRUE(r.errors[i].empty());
  }
  EXPECT_EQ(r.points[2], 2.0);
}

TEST(InvertGrid, TalbotOnF5AtItsZero) {
  InversionMethod m;
  m.kind = InversionKind::Talbot;
  const InversionResult r = invert_grid(m, *find_function("f5"), {0.5, 1.0, 2.0}, QuadConfig{});
  for (double e : *r.rel_errors) EXPECT_LE(e, 1e-8);
}

TEST(InvertGrid, PointFailuresAreRecorded) {
  InversionMethod m;
  m.kind = InversionKind::Talbot;
  const InversionResult r = invert_grid(m, *find_function("f2"), {0.5, 1.0}, QuadConfig{});
  for (const auto& e : r.errors) EXPECT_FALSE(e.empty());
  EXPECT_THROW(invert_grid(m, *find_function("f1"), {}, QuadConfig{}), InvalidConfig);
  EXPECT_THROW(invert_grid(m, *find_function("f1"), {1.0, -1.0}, QuadConfig{}), DomainError);
}

TEST(InvertGrid, BaselinesAgreeAtEarlyTimes) {
  // Where Stehfest's truncation error is small the two baselines agree.
  InversionMethod gs;
  gs.kind = InversionKind::GaverStehfest;
  InversionMethod tb;
  tb.kind = InversionKind::Talbot;
  for (const char* id : {"f1", "f3", "f5"}) {
    const TestFunction& f = *find_function(id);
    const InversionResult a = invert_grid(gs, f, {0.5}, QuadConfig{});
    const InversionResult b = invert_grid(tb, f, {0.5}, QuadConfig{});
    EXPECT_LE(std::abs(a.estimates[0] - b.estimates[0]), 1e-5 * std::abs(b.estimates[0])) << id;
  }
}

TEST(QuickInverse, InnerStageMatchesReducedKernel) {
  const SampleFn t = [](double y) { return Sample{cplx{laplace_f1(y)}, 0.0}; };
  const QuickInverse q(t, 1.0);
  // int cos(x t) (L T)(x) dx = int T(u) u / (u^2 + t^2) du.
  const double ref =
      oracles::composite_half_line([](double u) { return cplx{laplace_f1(u) * u / (u * u + 1.0)}; },
                                   1.0, 4000)
          .real();
  EXPECT_NEAR(q.g_direct(1.0).value.real(), ref, 1e-6);
  EXPECT_NEAR(q.g(1.0).value.real(), ref, 1e-6);
}

TEST(QuickInverse, ConvergesAndRecordsAcceleration) {
  InversionMethod m;
  m.kind = InversionKind::QuickSinCos;
  const InversionResult r = invert_grid(m, *find_function("f1"), {0.5, 1.0, 2.0}, QuadConfig{});
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(r.converged[i]);
    EXPECT_TRUE(r.accel_engaged[i]);
    EXPECT_TRUE(std::isfinite(r.estimates[i].real()));
    EXPECT_LT(r.err_ests[i], 1e-6);
  }
}

TEST(QuickInverse, ZeroFunction) {
  InversionMethod m;
  m.kind = InversionKind::QuickSinCos;
  const InversionResult r = invert_grid(m, zero_function(), {1.0}, QuadConfig{});
  EXPECT_EQ(r.estimates[0], cplx{});
}

TEST(QuickInverse, LinearInT) {
  const TestFunction& f1 = *find_function("f1");
  const TestFunction& f5 = *find_function("f5");
  const TestFunction h = combine(2.0, f1, -0.5, f5, "mix");
  InversionMethod m;
  m.kind = InversionKind::QuickSinCos;
  const InversionResult a = invert_grid(m, f1, {1.0}, QuadConfig{});
  const InversionResult b = invert_grid(m, f5, {1.0}, QuadConfig{});
  const InversionResult c = invert_grid(m, h, {1.0}, QuadConfig{});
  const cplx lin = 2.0 * a.estimates[0] - 0.5 * b.estimates[0];
  EXPECT_LE(std::abs(c.estimates[0] - lin), 2.0 * a.err_ests[0] + 0.5 * b.err_ests[0] + c.err_ests[0] + 1e-9);
}

TEST(Theorem4Inverse, EqualsScaledHalfFourier) {
  // The chain gives (2 pi)^2 Z1+(x), so the inverse is -i 2 pi Z1+(x).
  const auto& z = *find_function("f1")->closed_halffourier;
  const Chains ch(Operators(*find_function("f1")));
  for (double x : {0.5, 1.0, 2.0}) {
    const QuadResult r = theorem4_inverse(ch, x);
    EXPECT_LT(std::abs(r.value - (-kI) * 2.0 * kPi * z(x)), 1e-8) << x;
  }
  EXPECT_LT(std::abs(theorem4_inverse(ch, 1.0).value - kPi), 1e-8);
}

TEST(Theorem4Inverse, ZeroFunction) {
  EXPECT_EQ(theorem4_inverse(zero_function(), 1.0, QuadConfig{}).value, cplx{});
}
