#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <numbers>

#include "dwedge/freeconv.hpp"

using namespace dwedge;
using namespace std::complex_literals;

namespace {

double rho_sc(double e) { return std::abs(e) < 2 ? std::sqrt(4 - e * e) / (2 * std::numbers::pi) : 0.0; }

// Two-atom law: m solves m^3 + 2z m^2 + (z^2 - lambda^2 + 1) m + z = 0.
cplx two_atom_cubic_root(double lambda, cplx z) {
  Eigen::Matrix3cd c = Eigen::Matrix3cd::Zero();
  c(1, 0) = 1.0;
  c(2, 1) = 1.0;
  c(0, 2) = -z;
  c(1, 2) = -(z * z - lambda * lambda + 1.0);
  c(2, 2) = -2.0 * z;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(c);
  cplx best(0, -1);
  for (int k = 0; k < 3; ++k)
    if (es.eigenvalues()(k).imag() > best.imag()) best = es.eigenvalues()(k);
  return best;
}

// Plain undamped-then-damped iteration with a fixed budget, no Newton.
cplx damped_oracle(const Measure& nu, double lambda, cplx z) {
  cplx m = 1i;
  for (int it = 0; it < 200000; ++it) {
    cplx f = expect(nu, [&](double v) { return 1.0 / (lambda * v - z - m); });
    m = 0.7 * m + 0.3 * f;
  }
  return m;
}

}  // namespace

TEST(SolvePoint, SemicircleAtI) {
  const cplx m = solve_point(Measure::point_mass(0), 0.7, 1.0, 1i);
  EXPECT_NEAR(std::abs(m - 1i * (std::sqrt(5.0) - 1) / 2.0), 0.0, 1e-12);
}

TEST(SolvePoint, SemicircleRealBranchOutsideSupport) {
  const cplx m = solve_point(Measure::point_mass(0), 0.0, 1.0, cplx(3, 1e-8));
  EXPECT_NEAR(m.real(), (-3 + std::sqrt(5.0)) / 2, 1e-8);
  EXPECT_GE(m.imag(), 0.0);
}

TEST(SolvePoint, TwoAtomMatchesDampedOracle) {
  const Measure nu = Measure::two_atom();
  const cplx m = solve_point(nu, 0.5, 1.0, 2i);
  EXPECT_LT(std::abs(m - damped_oracle(nu, 0.5, 2i)), 1e-12);
  EXPECT_LT(std::abs(m - two_atom_cubic_root(0.5, 2i)), 1e-12);
}

TEST(SolvePoint, RejectsLowerHalfPlane) {
  EXPECT_THROW(solve_point(Measure::two_atom(), 0.5, 1.0, cplx(0, 0)), DomainError);
}

TEST(SolvePoint, IterationErrorCarriesResidual) {
  SolveOptions o;
  o.max_iter = 3;
  o.tol = 1e-300;
  try {
    solve_point(Measure::two_atom(), 0.5, 1.0, cplx(0.3, 1e-3), o);
    FAIL() << "expected IterationError";
  } catch (const IterationError& e) {
    EXPECT_GT(e.last_residual(), 0.0);
  }
}

TEST(SolveGrid, SemicircleDensity) {
  const auto s = solve_grid(Measure::point_mass(0), 0.0, 1.0, -3, 3, 1201, 1e-6);
  EXPECT_LT(max_residual(s), 1e-10);
  double worst = 0;
  for (std::size_t k = 0; k < s.energies.size(); ++k) {
    const double e = s.energies[k];
    if (std::abs(std::abs(e) - 2) < 0.05) continue;
    worst = std::max(worst, std::abs(s.density[k] - rho_sc(e)));
  }
  EXPECT_LT(worst, 1e-6);
  EXPECT_NEAR(s.e_plus, 2.0, 1e-12);
  EXPECT_NEAR(s.e_minus, -2.0, 1e-12);
}

TEST(SolveGrid, TwoAtomSingleIntervalBelowOne) {
  const auto s = solve_grid(Measure::two_atom(), 0.5, 1.0, -3, 3, 601, 1e-6);
  for (std::size_t k = 0; k < s.energies.size(); ++k) {
    EXPECT_NEAR(s.density[k], s.density[s.energies.size() - 1 - k], 1e-8);
    if (s.energies[k] > s.e_minus + 0.02 && s.energies[k] < s.e_plus - 0.02) EXPECT_GT(s.density[k], 1e-3);
  }
}

TEST(SolveGrid, TwoAtomTwoIntervalsAboveOne) {
  const auto s = solve_grid(Measure::two_atom(), 1.5, 1.0, -3.5, 3.5, 701, 1e-6);
  for (std::size_t k = 0; k < s.energies.size(); ++k)
    if (std::abs(s.energies[k]) < 0.1) EXPECT_LT(s.density[k], 1e-6);
  double peak = 0;
  for (double d : s.density) peak = std::max(peak, d);
  EXPECT_GT(peak, 0.1);
}

TEST(DensityAt, Examples) {
  EXPECT_NEAR(density_at(Measure::point_mass(0), 0.0, 1.0, 0.0), 1 / std::numbers::pi, 1e-9);
  EXPECT_NEAR(density_at(Measure::point_mass(0), 0.0, 1.0, 2.5), 0.0, 1e-6);
  const cplx mo = two_atom_cubic_root(0.5, cplx(0, 1e-10));
  EXPECT_NEAR(density_at(Measure::two_atom(), 0.5, 1.0, 0.0), mo.imag() / std::numbers::pi, 1e-9);
  EXPECT_NEAR(mo.imag(), std::sqrt(0.75), 1e-9);
}

TEST(SupportEndpoints, Semicircle) {
  for (double l : {0.0, 0.3, 2.0}) {
    auto [lo, hi] = support_endpoints(Measure::point_mass(0), l);
    EXPECT_NEAR(lo, -2, 1e-12);
    EXPECT_NEAR(hi, 2, 1e-12);
  }
}

TEST(SupportEndpoints, TwoAtomMatchesDenseScan) {
  const double l = 0.5;
  auto f = [l](double t) { return 0.5 / std::pow(l - t, 2) + 0.5 / std::pow(-l - t, 2); };
  // Dense scan then bisection to 1e-12.
  double a = l + 1e-9, b = l + 1e-9;
  for (double t = l + 1e-6; t < 10; t += 1e-4) {
    if (f(t) < 1) {
      b = t;
      break;
    }
    a = t;
  }
  while (b - a > 1e-13) {
    const double c = 0.5 * (a + b);
    (f(c) > 1 ? a : b) = c;
  }
  const double theta = 0.5 * (a + b);
  const double eplus = theta - (0.5 / (l - theta) + 0.5 / (-l - theta));
  auto [lo, hi] = support_endpoints(Measure::two_atom(), l);
  EXPECT_NEAR(hi, eplus, 1e-11);
  EXPECT_NEAR(lo, -eplus, 1e-11);
}

TEST(SupportEndpoints, AssumptionViolations) {
  EXPECT_THROW(support_endpoints(Measure::two_atom(), 1.5), AssumptionViolated);
  EXPECT_THROW(support_endpoints(Measure::jacobi(0, 2.0), 5.0), AssumptionViolated);
  EXPECT_NO_THROW(support_endpoints(Measure::jacobi(0.5, 0.5), 5.0));
}

TEST(SupportEndpoints, DensityLivesOnSupportAndIntegratesToOne) {
  for (double l : {0.3, 0.5, 0.8}) {
    const Measure nu = Measure::two_atom();
    auto [lo, hi] = support_endpoints(nu, l);
    const auto s = solve_grid(nu, l, 1.0, lo - 0.5, hi + 0.5, 4001, 1e-6);
    double mass = 0;
    for (std::size_t k = 0; k + 1 < s.energies.size(); ++k) {
      const double e0 = s.energies[k], e1 = s.energies[k + 1];
      if (e0 >= lo && e1 <= hi) mass += 0.5 * (e1 - e0) * (s.density[k] + s.density[k + 1]);
      if (e0 < lo - 0.05 || e0 > hi + 0.05) EXPECT_LT(s.density[k], 1e-4);
      if (e0 > lo + 0.01 && e0 < hi - 0.01) EXPECT_GT(s.density[k], 0.0);
    }
    // Boundary cells carry O(h^{3/2}) mass missed by the trapezoid sum.
    EXPECT_NEAR(mass, 1.0, 1e-4) << l;
  }
}

TEST(SupportEndpoints, JacobiSupportMatchesDensity) {
  const Measure nu = Measure::jacobi(0.5, 1.5);
  auto [lo, hi] = support_endpoints(nu, 1.0);
  EXPECT_GT(density_at(nu, 1.0, 1.0, hi - 0.02), 1e-3);
  EXPECT_LT(density_at(nu, 1.0, 1.0, hi + 0.02), 1e-5);
  EXPECT_GT(density_at(nu, 1.0, 1.0, lo + 0.02), 1e-3);
  EXPECT_LT(density_at(nu, 1.0, 1.0, lo - 0.02), 1e-5);
}

TEST(AsymptoticEplus, Examples) {
  EXPECT_NEAR(asymptotic_eplus(Measure::two_atom(), 0.1), 2.009875, 1e-15);
  EXPECT_DOUBLE_EQ(asymptotic_eplus(Measure::two_atom(), 0.0), 2.0);
  EXPECT_NEAR(asymptotic_eplus(Measure::point_mass(0.7), 0.3), 2.21, 1e-15);
  auto [lo, hi] = support_endpoints(Measure::point_mass(0.7), 0.3);
  EXPECT_NEAR(hi, 2.21, 1e-12);
}

TEST(AsymptoticEplus, ErrorIsFifthOrder) {
  std::vector<double> ratio;
  for (double l : {0.02, 0.05, 0.1, 0.2}) {
    const double err = std::abs(asymptotic_eplus(Measure::two_atom(), l) - support_endpoints(Measure::two_atom(), l).second);
    ratio.push_back(err / std::pow(l, 5));
  }
  const double hi = *std::max_element(ratio.begin(), ratio.end());
  const double lo = *std::min_element(ratio.begin(), ratio.end());
  EXPECT_LT(hi, 10.0);
  EXPECT_LT(hi / std::max(lo, 1e-300), 20.0);
}

TEST(VarianceIdentity, SmallCoupling) {
  const Measure nu = Measure::two_atom();
  const double l = 0.05;
  const EdgeRoots r = outer_edges(nu, l);
  const double m_edge = edge_moment(nu, l, r.theta_plus, 1);
  const cplx m_solved = solve_point(nu, l, 1.0, cplx(r.e_plus, 1e-12));
  EXPECT_NEAR(m_solved.real(), m_edge, 1e-5);
  EXPECT_NEAR((1 - m_edge * m_edge) / (l * l), central_moment(nu, 2), 0.05);
}

TEST(EdgeFit, SemicircleSquareRoot) {
  std::vector<double> es;
  for (int k = 0; k < 400; ++k) es.push_back(2.0 - 0.012 * (1.0 - k / 400.0));
  const auto s = solve_on(Measure::point_mass(0), 0.0, 1.0, es, 1e-6);
  const auto fit = edge_exponent_fit(s);
  EXPECT_NEAR(fit.exponent, 0.5, 0.02);
  EXPECT_NEAR(fit.amplitude, 1 / std::numbers::pi, 0.05 / std::numbers::pi);
}

TEST(EdgeFit, UnrescaledDeformedAmplitudeDiffers) {
  const Measure nu = Measure::two_atom();
  const double eplus = support_endpoints(nu, 0.5).second;
  std::vector<double> es;
  for (int k = 0; k < 400; ++k) es.push_back(eplus - 0.012 * (1.0 - k / 400.0));
  const auto fit = edge_exponent_fit(solve_on(nu, 0.5, 1.0, es, 1e-6));
  EXPECT_NEAR(fit.exponent, 0.5, 0.02);
  EXPECT_GT(std::abs(fit.amplitude - 1 / std::numbers::pi), 0.02);
}

TEST(EdgeFit, TooFewPoints) {
  const auto s = solve_grid(Measure::point_mass(0), 0.0, 1.0, -3, 3, 50, 1e-6);
  EXPECT_THROW(edge_exponent_fit(s), InvalidArgument);
}

// Property: Im m(E + i eta) is nonnegative and varies continuously in eta.
TEST(FreeConvProperty, ImaginaryPartContinuousInEta) {
  auto rng = make_stream(5, "property");
  const Measure nu = empirical_from_values(sample(Measure::jacobi(0.3, 0.6), 300, rng));
  for (int t = 0; t < 20; ++t) {
    const double e = -3 + 6 * rng.uniform();
    const double l = rng.uniform();
    std::optional<cplx> warm;
    double prev = -1;
    for (double le = 0; le >= -6; le -= 0.05) {
      const double eta = std::pow(10.0, le);
      const cplx m = solve_point(nu, l, 1.0, cplx(e, eta), {}, warm);
      ASSERT_GE(m.imag(), 0.0);
      if (prev >= 0) ASSERT_LT(std::abs(m.imag() - prev), 0.2) << e << " " << eta;
      prev = m.imag();
      warm = m;
    }
  }
}
