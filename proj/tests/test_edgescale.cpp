#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dwedge/edgescale.hpp"

using namespace dwedge;

namespace {

Measure two_atom_empirical(std::size_t n, std::uint64_t seed) {
  auto rng = make_stream(seed, "potential");
  return empirical_from_values(sample(Measure::two_atom(), n, rng));
}

// Random atomic measure: n atoms in [-1, 1], random positive weights.
Measure random_atomic(Rng& rng) {
  const int n = 2 + static_cast<int>(rng.uniform() * 60);
  std::vector<std::pair<double, double>> atoms;
  double total = 0;
  for (int k = 0; k < n; ++k) {
    const double w = 0.05 + rng.uniform();
    atoms.emplace_back(2 * rng.uniform() - 1, w);
    total += w;
  }
  for (auto& a : atoms) a.second /= total;
  return Measure::atomic(atoms);
}

// Largest lambda allowed by the single-interval check, scaled down.
double admissible_lambda(const Measure& nu, Rng& rng) {
  const double lmax = std::sqrt(assumption_infimum(nu));
  return std::min(2.0, lmax) * (0.05 + 0.9 * rng.uniform());
}

}  // namespace

TEST(Build, ZeroCoupling) {
  const EdgeScaling s = build(two_atom_empirical(100, 1), 0.0);
  EXPECT_EQ(s.zeta, 1.0);
  EXPECT_EQ(s.gamma, 1.0);
  EXPECT_EQ(s.tau, 1.0);
  EXPECT_EQ(s.e_plus, 2.0);
  EXPECT_EQ(s.l_plus, 2.0);
}

TEST(Build, PointMassIsRigidShift) {
  for (double c : {-0.7, 0.0, 1.3}) {
    const EdgeScaling s = build(Measure::point_mass(c), 0.4);
    EXPECT_NEAR(s.zeta, 1 + 0.4 * c, 1e-14);
    EXPECT_NEAR(s.gamma, 1.0, 1e-14);
    EXPECT_NEAR(s.e_plus, 2 + 0.4 * c, 1e-14);
  }
}

TEST(Build, EmpiricalTwoAtomInvariants) {
  const Measure nu = two_atom_empirical(1000, 7);
  const EdgeScaling s = build(nu, 0.5);
  const auto r = identity_residuals(s);
  EXPECT_GT(r.min_gap, 1e-6);
  EXPECT_GT(s.gamma, 0.0);
  EXPECT_LE(s.gamma, 1.0);
  EXPECT_LT(r.tau, 1e-12);
  EXPECT_LT(r.a2, 1e-10);
  EXPECT_LT(r.a3, 1e-10);
  EXPECT_NEAR(s.e_plus, support_endpoints(Measure::two_atom(), 0.5).second, 0.05);
}

TEST(Build, AssumptionViolated) {
  EXPECT_THROW(build(Measure::two_atom(), 1.2), AssumptionViolated);
  EXPECT_THROW(build(Measure::jacobi(0.0, 2.0), 4.0), AssumptionViolated);
}

TEST(Build, JacobiIdentities) {
  const EdgeScaling s = build(Measure::jacobi(0.5, 1.5), 0.8);
  const auto r = identity_residuals(s);
  EXPECT_LT(r.max(), 1e-10);
  EXPECT_NEAR(s.e_plus, support_endpoints(Measure::jacobi(0.5, 1.5), 0.8).second, 1e-12);
}

TEST(GammaRelation, Examples) {
  EXPECT_LT(verify_gamma_relation(build(Measure::two_atom(), 0.0)), 1e-14);
  EXPECT_LT(verify_gamma_relation(build(two_atom_empirical(500, 3), 0.5)), 1e-10);
  EXPECT_LT(verify_gamma_relation(build(Measure::point_mass(0.2), 0.3)), 1e-12);
}

TEST(FlowScaling, Endpoints) {
  const Measure nu = two_atom_empirical(400, 5);
  const EdgeScaling s0 = flow_scaling(nu, 0.5, 0.0);
  const EdgeScaling b = build(nu, 0.5);
  EXPECT_EQ(s0.zeta, b.zeta);
  EXPECT_EQ(s0.gamma, b.gamma);
  const double n = 400;
  const EdgeScaling st = flow_scaling(nu, 0.5, 4 * std::log(n));
  EXPECT_NEAR(st.lambda, 0.5 / (n * n), 1e-16);
  EXPECT_LT(1.0 - st.gamma, 10.0 / (n * n));
  const EdgeScaling inf = flow_scaling(nu, 0.5, 60.0);
  EXPECT_NEAR(inf.zeta, 1.0, 1e-9);
  EXPECT_NEAR(inf.gamma, 1.0, 1e-9);
  EXPECT_NEAR(inf.e_plus, 2.0, 1e-9);
}

TEST(FlowScaling, ContinuousInTime) {
  const Measure nu = two_atom_empirical(300, 9);
  double prev = flow_scaling(nu, 0.6, 0.0).l_plus;
  for (double t = 0.01; t < 3; t += 0.01) {
    const double cur = flow_scaling(nu, 0.6, t).l_plus;
    EXPECT_LT(std::abs(cur - prev), 0.01);
    prev = cur;
  }
}

TEST(DotZ, Stationary) {
  const DotZ d = dot_z(Measure::two_atom(), 0.0, 1.0);
  EXPECT_EQ(d.formula, 0.0);
  EXPECT_EQ(d.fd, 0.0);
}

TEST(DotZ, PointMassClosedForm) {
  const double c = 0.8, l0 = 0.3, t = 0.7;
  const DotZ d = dot_z(Measure::point_mass(c), l0, t);
  const double exact = -0.5 * l0 * std::exp(-t / 2) * c;
  EXPECT_NEAR(d.fd, exact, 1e-9);
  EXPECT_NEAR(d.formula, exact, 1e-9);
}

TEST(DotZ, FormulaMatchesFiniteDifference) {
  const DotZ d = dot_z(two_atom_empirical(800, 11), 0.5, 1.0);
  EXPECT_LT(std::abs(d.formula - d.fd), 1e-6 * std::abs(d.fd));
}

TEST(Coefficients, ZeroCouplingExact) {
  const auto c = coefficients(Measure::two_atom(), 0.0, 1.0);
  EXPECT_EQ(c.c2, 0.0);
  EXPECT_EQ(c.c3, 0.0);
  EXPECT_EQ(c.c0, 0.0);
  EXPECT_EQ(c.c0_prime, 0.0);
}

TEST(Coefficients, Cancellation) {
  const Measure nu = two_atom_empirical(600, 13);
  for (double t : {0.0, 0.5, 2.0}) {
    const auto c = coefficients(nu, 0.5, t);
    EXPECT_LT(std::abs(c.c2), 1e-5) << t;
    EXPECT_LT(std::abs(c.c3), 1e-5) << t;
    EXPECT_LT(std::abs(c.c0_prime), 1e-5) << t;
    EXPECT_LT(std::abs(c.c0 - c.dt_m_hat), 1e-5) << t;
  }
  const auto c = coefficients(Measure::point_mass(0.4), 0.3, 1.0);
  EXPECT_LT(std::abs(c.c2), 1e-5);
  EXPECT_LT(std::abs(c.c3), 1e-5);
  EXPECT_LT(std::abs(c.c0_prime), 1e-5);
}

TEST(Coefficients, CZeroIsNotIdenticallyZero) {
  const auto c = coefficients(two_atom_empirical(600, 13), 0.5, 0.5);
  EXPECT_GT(std::abs(c.dt_m_hat), 1e-3);
}

TEST(AOne, MatchesSolverAtEdge) {
  for (double l : {0.2, 0.5, 0.8}) {
    const EdgeScaling s = build(two_atom_empirical(500, 17), l);
    const cplx m = solve_point(s.nu, s.lambda, s.gamma, cplx(s.l_plus, 1e-12));
    EXPECT_NEAR(m.real(), s.a[1], 1e-5) << l;
  }
}

TEST(EdgeFit, RescaledLawHasSemicircleAmplitude) {
  const EdgeScaling s = build(Measure::two_atom(), 0.5);
  std::vector<double> es;
  for (int k = 0; k < 400; ++k) es.push_back(s.l_plus - 0.012 * (1.0 - k / 400.0));
  const auto sol = solve_on(s.nu, s.lambda, s.gamma, es, 1e-6);
  EXPECT_NEAR(sol.e_plus, s.l_plus, 1e-12);
  const auto fit = edge_exponent_fit(sol);
  EXPECT_NEAR(fit.exponent, 0.5, 0.02);
  EXPECT_NEAR(fit.amplitude, 1 / std::numbers::pi, 0.05 / std::numbers::pi);
}

// Property: identities over random atomic measures and admissible couplings.
TEST(ScalingProperty, IdentitiesOnRandomInstances) {
  auto rng = make_stream(2024, "property");
  for (int t = 0; t < 100; ++t) {
    const Measure nu = random_atomic(rng);
    const double l = admissible_lambda(nu, rng);
    const EdgeScaling s = build(nu, l);
    const auto r = identity_residuals(s);
    ASSERT_LT(r.max(), 1e-10) << "instance " << t << " lambda " << l;
    ASSERT_GT(r.min_gap, 1e-6);
    ASSERT_GT(s.gamma, 0.0);
    ASSERT_LE(s.gamma, 1.0 + 1e-15);
    // Bracket of the edge root is valid.
    const double left = l * nu.support_hi() + 1e-12, right = l * nu.support_hi() + 10 + 10 * l;
    ASSERT_GT(edge_moment(nu, l, left, 2), 1.0);
    ASSERT_LT(edge_moment(nu, l, right, 2), 1.0);
  }
}
