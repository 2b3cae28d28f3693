#include <gtest/gtest.h>

#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <numbers>

#include "dwedge/quadrature.hpp"

using namespace dwedge;

namespace {
double sum(const Rule& r, auto f) {
  double s = 0;
  for (std::size_t k = 0; k < r.size(); ++k) s += r.weights[k] * f(r.nodes[k]);
  return s;
}
}  // namespace

TEST(GaussJacobi, WeightsNormalizedAndMomentsExact) {
  for (auto [al, be] : {std::pair{0.5, 0.5}, {-0.5, 0.3}, {2.0, 0.0}, {-0.9, -0.9}, {1.5, 3.0}}) {
    const Rule r = gauss_jacobi(40, al, be);
    EXPECT_NEAR(sum(r, [](double) { return 1.0; }), 1.0, 1e-13);
    // E[(1+x)] under (1-x)^al (1+x)^be / norm = 2 (be+1) / (al+be+2)
    EXPECT_NEAR(sum(r, [](double x) { return 1.0 + x; }), 2.0 * (be + 1) / (al + be + 2), 1e-13);
    // E[(1+x)^3] = 8 B(al+1, be+4) / B(al+1, be+1)
    const double want = 8.0 * boost::math::beta(al + 1, be + 4) / boost::math::beta(al + 1, be + 1);
    EXPECT_NEAR(sum(r, [](double x) { return std::pow(1.0 + x, 3); }), want, 1e-12);
  }
}

TEST(GaussJacobi, SumOfExponentsMinusOneHandled) {
  const Rule r = gauss_jacobi(10, -0.5, -0.5);
  // Chebyshev first kind: nodes cos((2k-1) pi / 2n)
  for (double x : r.nodes) {
    const double t = std::acos(x) * 20.0 / std::numbers::pi;
    EXPECT_NEAR(t - std::round(t), 0.0, 1e-10);
    EXPECT_EQ(static_cast<long>(std::round(t)) % 2, 1);
  }
}

TEST(GaussLegendre, IntegratesExponential) {
  const Rule r = gauss_legendre(20, 0.0, 2.0);
  EXPECT_NEAR(sum(r, [](double x) { return std::exp(x); }), std::exp(2.0) - 1.0, 1e-13);
}

TEST(GaussHermite, NormalMoments) {
  const Rule r = gauss_hermite_normal(64);
  EXPECT_NEAR(sum(r, [](double) { return 1.0; }), 1.0, 1e-13);
  EXPECT_NEAR(sum(r, [](double x) { return x * x; }), 1.0, 1e-12);
  EXPECT_NEAR(sum(r, [](double x) { return std::pow(x, 4); }), 3.0, 1e-11);
  EXPECT_NEAR(sum(r, [](double x) { return std::cos(x); }), std::exp(-0.5), 1e-13);
}

TEST(AdaptiveSimpson, SmoothAndPeaked) {
  EXPECT_NEAR(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, std::numbers::pi),
              2.0, 1e-10);
  const double eta = 1e-4;
  const double got = adaptive_simpson([eta](double x) { return eta / (x * x + eta * eta); }, -1.0, 1.0);
  EXPECT_NEAR(got, 2.0 * std::atan(1.0 / eta), 1e-8);
}
