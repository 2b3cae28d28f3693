#include <gtest/gtest.h>

#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "dwedge/airy.hpp"
#include "dwedge/gof.hpp"
#include "dwedge/limit_law.hpp"
#include "dwedge/rng.hpp"
#include "dwedge/tracy_widom.hpp"
#include "oracles/fredholm.hpp"

using namespace dwedge;

TEST(Airy, MatchesBoost) {
  for (double x = -12.0; x <= 12.0; x += 0.0173) {
    const AiryPair a = airy(x);
    EXPECT_NEAR(a.ai, boost::math::airy_ai(x), 5e-8) << x;
    EXPECT_NEAR(a.aip, boost::math::airy_ai_prime(x), 5e-8) << x;
  }
  for (double x : {5.5, 8.0, 10.0}) {
    EXPECT_NEAR(airy(x).ai / boost::math::airy_ai(x), 1.0, 1e-8) << x;
    EXPECT_NEAR(airy(x).aip / boost::math::airy_ai_prime(x), 1.0, 1e-8) << x;
  }
  EXPECT_DOUBLE_EQ(airy(0.0).ai, 0.355028053887817239260);
}

TEST(TracyWidom, InitialTailIntegrals) {
  const double s0 = kTwStart;
  const auto y = TracyWidomTable::initial_state(s0);
  const Rule r = gauss_legendre(80, s0, s0 + 20.0);
  double i2 = 0.0, j2 = 0.0, k1 = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double a = boost::math::airy_ai(r.nodes[k]);
    i2 += r.weights[k] * a * a;
    j2 += r.weights[k] * (r.nodes[k] - s0) * a * a;
    k1 += r.weights[k] * a;
  }
  EXPECT_NEAR(y[2] / i2, 1.0, 1e-8);
  EXPECT_NEAR(y[3] / j2, 1.0, 1e-8);
  EXPECT_NEAR(y[4] / k1, 1.0, 1e-8);
}

TEST(TracyWidom, AgreesWithFredholmOracle) {
  for (double s : {-4.0, -2.0, 0.0, 2.0}) {
    EXPECT_NEAR(tw_cdf(1, s), oracle::fredholm_f1(s), 1e-5) << s;
    EXPECT_NEAR(tw_cdf(2, s), oracle::fredholm_f2(s), 1e-5) << s;
  }
}

TEST(TracyWidom, AgreesWithFredholmOracleOffGrid) {
  for (double s = -7.013; s < 5.0; s += 0.731) {
    EXPECT_NEAR(tw_cdf(1, s), oracle::fredholm_f1(s), 1e-8) << s;
    EXPECT_NEAR(tw_cdf(2, s), oracle::fredholm_f2(s), 1e-8) << s;
  }
}

TEST(TracyWidom, RightTailIsOne) {
  EXPECT_NEAR(tw_cdf(2, 6.0), 1.0, 1e-6);
  EXPECT_NEAR(tw_cdf(1, 6.0), 1.0, 1e-6);
}

TEST(TracyWidom, RightTailMatchesOracle) {
  EXPECT_NEAR(tw_cdf(1, 6.0), oracle::fredholm_f1(6.0), 1e-9);
  EXPECT_NEAR(tw_cdf(2, 6.0), oracle::fredholm_f2(6.0), 1e-9);
}

TEST(TracyWidom, LeftTailIsZero) {
  EXPECT_NEAR(tw_cdf(1, -10.0), 0.0, 1e-6);
  EXPECT_NEAR(tw_cdf(2, -10.0), 0.0, 1e-6);
}

TEST(TracyWidom, ClampedOutsideTable) {
  EXPECT_TRUE(tw_cdf_checked(1, 7.0).clamped);
  EXPECT_TRUE(tw_cdf_checked(2, -11.0).clamped);
  EXPECT_FALSE(tw_cdf_checked(1, 0.0).clamped);
  EXPECT_EQ(tw_cdf(1, 7.0), tw_cdf(1, kTwHi));
  EXPECT_THROW(tw_cdf(3, 0.0), InvalidArgument);
}

TEST(TracyWidom, StrictlyIncreasing) {
  for (int beta : {1, 2})
    for (double s = -8.0; s < 4.0; s += kTwStep) EXPECT_LT(tw_cdf(beta, s), tw_cdf(beta, s + kTwStep)) << beta << " " << s;
}

TEST(TracyWidom, DensityIsDerivative) {
  for (int beta : {1, 2})
    for (double s = -5.0; s < 3.0; s += 0.37) {
      const double h = 1e-4;
      EXPECT_NEAR(tw_pdf(beta, s), (tw_cdf(beta, s + h) - tw_cdf(beta, s - h)) / (2 * h), 1e-5);
    }
}

TEST(TracyWidom, MomentsMatchOracle) {
  const Moments m1 = tw_moments(1);
  const Moments o1 = oracle::moments_from_cdf([](double s) { return oracle::fredholm_f1(s); }, -10.0, 10.0);
  EXPECT_NEAR(m1.mean, o1.mean, 1e-3);
  EXPECT_NEAR(std::sqrt(m1.variance), std::sqrt(o1.variance), 1e-3);
  EXPECT_NEAR(m1.mean, -1.2065, 1e-3);
  EXPECT_NEAR(std::sqrt(m1.variance), 1.268, 1e-3);
  const Moments m2 = tw_moments(2);
  const Moments o2 = oracle::moments_from_cdf([](double s) { return oracle::fredholm_f2(s); }, -10.0, 10.0);
  EXPECT_NEAR(m2.mean, o2.mean, 1e-3);
  EXPECT_NEAR(m2.variance, o2.variance, 1e-3);
}

TEST(LimitLaw, DegenerateConvolutionIsF1) {
  const auto law = LimitLaw::tw1_gauss_conv(0.0);
  for (double s = -6.0; s < 4.0; s += 0.13) EXPECT_EQ(law.cdf(s), tw_cdf(1, s));
}

TEST(LimitLaw, GaussianAtZero) {
  EXPECT_DOUBLE_EQ(LimitLaw::gaussian(1.0).cdf(0.0), 0.5);
  EXPECT_NEAR(LimitLaw::gaussian(4.0).cdf(2.0), 0.5 * std::erfc(-1.0 / std::sqrt(2.0)), 1e-15);
}

TEST(LimitLaw, ConvolutionMonotoneWithAddedVariance) {
  const auto law = LimitLaw::tw1_gauss_conv(1.0);
  double prev = -1.0;
  for (double s = -14.0; s < 12.0; s += 0.005) {
    const double f = law.cdf(s);
    EXPECT_GE(f, prev);
    prev = f;
  }
  const Moments m = oracle::moments_from_cdf([&](double s) { return law.cdf(s); }, -14.0, 14.0);
  EXPECT_NEAR(m.variance, tw_moments(1).variance + 1.0, 1e-3);
  EXPECT_NEAR(m.mean, tw_moments(1).mean, 1e-3);
}

TEST(LimitLaw, TableMatchesDirectConvolution) {
  const auto law = LimitLaw::tw1_gauss_conv(0.7);
  for (double s = -8.0; s < 6.0; s += 0.0731) EXPECT_NEAR(law.cdf(s), LimitLaw::convolution_direct(0.7, s), 1e-7);
}

TEST(LimitLaw, Names) {
  EXPECT_EQ(LimitLaw::tw1().name(), "tw1");
  EXPECT_EQ(LimitLaw::tw2().name(), "tw2");
  EXPECT_EQ(LimitLaw::gaussian(1).name(), "gaussian");
  EXPECT_EQ(LimitLaw::tw1_gauss_conv(1).name(), "tw1_gauss_conv");
  EXPECT_THROW(LimitLaw::gaussian(-1.0), InvalidArgument);
}

TEST(Ks, MedianSampleGivesHalf) {
  EXPECT_DOUBLE_EQ(ks_statistic({0.0}, [](double s) { return LimitLaw::gaussian(1.0).cdf(s); }), 0.5);
  EXPECT_THROW(ks_statistic({}, [](double) { return 0.0; }), InvalidArgument);
}

TEST(Ks, NullSampleWithinBand) {
  Rng rng = make_stream(42, "test", 0);
  std::vector<double> x(10000);
  for (auto& v : x) v = rng.normal();
  const auto g = LimitLaw::gaussian(1.0);
  EXPECT_LT(ks_statistic(x, [&](double s) { return g.cdf(s); }), 1.63 / std::sqrt(10000.0));
}

TEST(Ks, ShiftedSampleRejected) {
  Rng rng = make_stream(43, "test", 0);
  std::vector<double> x(10000);
  for (auto& v : x) v = rng.normal() + 1.0;
  const auto g = LimitLaw::gaussian(1.0);
  const double d = ks_statistic(x, [&](double s) { return g.cdf(s); });
  EXPECT_GT(d, 0.3);
  EXPECT_NEAR(d, g.cdf(0.5) - g.cdf(-0.5), 0.02);
}

// Scaling by a power of two is exact in floating point, so the distance
// must be bit-identical.
TEST(Ks, ScaleInvariance) {
  Rng rng = make_stream(44, "test", 0);
  std::vector<double> x(500);
  for (auto& v : x) v = -1.2 + 1.3 * rng.normal();
  const double d0 = ks_statistic(x, [](double s) { return tw_cdf(1, s); });
  for (double c : {0.25, 2.0, 8.0}) {
    std::vector<double> y = x;
    for (auto& v : y) v *= c;
    EXPECT_EQ(ks_statistic(y, [c](double s) { return tw_cdf(1, s / c); }), d0);
  }
}
