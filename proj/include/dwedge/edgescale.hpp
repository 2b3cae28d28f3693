#pragma once

// Edge rescaling of the deformed law and the time-dependent coefficients that
// appear along the Ornstein-Uhlenbeck flow lambda(t) = lambda0 exp(-t/2).
//
// zeta  : largest root of int dnu/(lambda v - zeta)^2 = 1
// gamma : (-int dnu/(lambda v - zeta)^3)^(-1/3)
// tau   : gamma zeta;  E+ = zeta - int dnu/(lambda v - zeta);  L+ = gamma E+
// A_n   : int dnu/(lambda gamma v - tau)^n,  A'_n : int v dnu/(lambda gamma v - tau)^n

#include <array>
#include <cmath>
#include <limits>

#include "dwedge/errors.hpp"
#include "dwedge/freeconv.hpp"
#include "dwedge/measure.hpp"

namespace dwedge {

struct EdgeScaling {
  Measure nu;
  double lambda = 0.0;
  double zeta = 1.0;
  double gamma = 1.0;
  double tau = 1.0;
  double l_plus = 2.0;  // gamma * e_plus, upper edge of the rescaled law
  double e_plus = 2.0;
  std::array<double, 5> a{};        // a[n], n = 1..4
  std::array<double, 5> a_prime{};  // a_prime[n], n = 1..4
};

namespace detail {

// Direct sums over the rule; Jacobi measures go through the endpoint-aware
// integral, with A'_n from v = ((lambda v - zeta) + zeta) / lambda.
inline void fill_a_tables(EdgeScaling& s) {
  const double lg = s.lambda * s.gamma;
  if (s.nu.kind() == Measure::Kind::Jacobi && s.lambda > 0.0) {
    std::array<double, 6> mom{};
    mom[0] = 1.0;
    for (int p = 1; p <= 5; ++p) mom[p] = edge_moment(s.nu, s.lambda, s.zeta, p);
    for (int n = 1; n <= 4; ++n) {
      const double gn = std::pow(s.gamma, -n);
      s.a[n] = gn * mom[n];
      s.a_prime[n] = gn * (mom[n - 1] + s.zeta * mom[n]) / s.lambda;
    }
    return;
  }
  const Rule& r = s.nu.rule();
  s.a.fill(0.0);
  s.a_prime.fill(0.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double v = r.nodes[k], w = r.weights[k];
    const double q = 1.0 / (lg * v - s.tau);
    double p = 1.0;
    for (int n = 1; n <= 4; ++n) {
      p *= q;
      s.a[n] += w * p;
      s.a_prime[n] += w * v * p;
    }
  }
}

}  // namespace detail

/// Rescaling constants for (nu, lambda). Requires the single-interval check.
inline EdgeScaling build(const Measure& nu, double lambda) {
  if (lambda < 0.0) throw InvalidArgument("edge scaling: lambda must be nonnegative");
  check_single_interval(nu, lambda);
  EdgeScaling s;
  s.nu = nu;
  s.lambda = lambda;
  if (lambda == 0.0) {
    s.zeta = s.gamma = s.tau = 1.0;
    s.e_plus = s.l_plus = 2.0;
  } else {
    s.zeta = outer_edges(nu, lambda).theta_plus;
    const double m3 = edge_moment(nu, lambda, s.zeta, 3);
    if (!(m3 < 0.0)) throw IterationError("edge scaling: third edge moment is not negative", m3);
    s.gamma = std::cbrt(-1.0 / m3);
    s.tau = s.gamma * s.zeta;
    s.e_plus = s.zeta - edge_moment(nu, lambda, s.zeta, 1);
    s.l_plus = s.gamma * s.e_plus;
  }
  detail::fill_a_tables(s);
  return s;
}

struct ScalingResiduals {
  double a2 = 0.0;              // |A_2 - gamma^-2|
  double a3 = 0.0;              // |A_3 + gamma^-6|
  double tau = 0.0;             // |tau - gamma zeta|
  double gamma_relation = 0.0;  // |gamma - (-A_3)^(-1/6)|
  double recurrence = 0.0;      // max_n |lambda gamma A'_n - tau A_n - A_{n-1}|
  double min_gap = 0.0;         // min over the support of zeta - lambda v
  double max() const {
    return std::max({a2, a3, tau, gamma_relation, recurrence});
  }
};

/// |gamma - (-int dnu/(lambda gamma v - tau)^3)^(-1/6)|, summed directly.
inline double verify_gamma_relation(const EdgeScaling& s) {
  double a3;
  if (s.nu.kind() == Measure::Kind::Jacobi && s.lambda > 0.0) {
    a3 = std::pow(s.gamma, -3) * edge_moment(s.nu, s.lambda, s.zeta, 3);
  } else {
    a3 = expect(s.nu, [&](double v) { return std::pow(s.lambda * s.gamma * v - s.tau, -3); });
  }
  return std::abs(s.gamma - std::pow(-a3, -1.0 / 6.0));
}

inline ScalingResiduals identity_residuals(const EdgeScaling& s) {
  ScalingResiduals r;
  const double g = s.gamma;
  r.a2 = std::abs(s.a[2] - 1.0 / (g * g));
  r.a3 = std::abs(s.a[3] + std::pow(g, -6));
  r.tau = std::abs(s.tau - g * s.zeta);
  r.gamma_relation = verify_gamma_relation(s);
  for (int n = 2; n <= 4; ++n) {
    const double lhs = s.lambda * g * s.a_prime[n] - s.tau * s.a[n];
    r.recurrence = std::max(r.recurrence, std::abs(lhs - s.a[n - 1]));
  }
  r.min_gap = s.zeta - s.lambda * s.nu.support_hi();
  return r;
}

/// Scaling along the flow: build(nu, lambda0 exp(-t/2)).
inline EdgeScaling flow_scaling(const Measure& nu, double lambda0, double t) {
  return build(nu, lambda0 * std::exp(-0.5 * t));
}

inline constexpr double kFlowStep = 1e-5;

struct DotZ {
  double formula;  // -2 gamma gamma' A_1 + gamma^2 d(lambda gamma)/dt A'_2
  double fd;       // central difference of L+(t)
};

namespace detail {

struct FlowDerivatives {
  EdgeScaling s;
  double gamma_dot, lg_dot, tau_dot, l_plus_dot, a1_dot, a3_dot;
};

inline FlowDerivatives flow_derivatives(const Measure& nu, double lambda0, double t, double h) {
  const EdgeScaling sp = flow_scaling(nu, lambda0, t + h);
  const EdgeScaling sm = flow_scaling(nu, lambda0, t - h);
  const double inv = 1.0 / (2.0 * h);
  FlowDerivatives d{flow_scaling(nu, lambda0, t), 0, 0, 0, 0, 0, 0};
  d.gamma_dot = (sp.gamma - sm.gamma) * inv;
  d.lg_dot = (sp.lambda * sp.gamma - sm.lambda * sm.gamma) * inv;
  d.tau_dot = (sp.tau - sm.tau) * inv;
  d.l_plus_dot = (sp.l_plus - sm.l_plus) * inv;
  d.a1_dot = (sp.a[1] - sm.a[1]) * inv;
  d.a3_dot = (sp.a[3] - sm.a[3]) * inv;
  return d;
}

}  // namespace detail

inline DotZ dot_z(const Measure& nu, double lambda0, double t, double h = kFlowStep) {
  const auto d = detail::flow_derivatives(nu, lambda0, t, h);
  const auto& s = d.s;
  return {-2.0 * s.gamma * d.gamma_dot * s.a[1] + s.gamma * s.gamma * d.lg_dot * s.a_prime[2], d.l_plus_dot};
}

struct FlowCoefficients {
  double c2, c3, c0, c0_prime;
  double dt_m_hat;  // central difference of A_1 = m_hat(L+) in t
};

/// The four flow coefficients with time derivatives by central differences;
/// dz/dt is the finite difference of L+(t), not the closed form.
inline FlowCoefficients coefficients(const Measure& nu, double lambda0, double t, double h = kFlowStep) {
  const auto d = detail::flow_derivatives(nu, lambda0, t, h);
  const auto& s = d.s;
  const auto& a = s.a;
  const auto& ap = s.a_prime;
  const double g = s.gamma;
  FlowCoefficients c{};
  c.c2 = -d.lg_dot * g * g * ap[2] + d.l_plus_dot + 2.0 * d.gamma_dot * g * a[1];
  c.c0_prime = -d.lg_dot * (ap[3] - a[3] * ap[4] / a[4]) + d.gamma_dot / g * (1.0 / (g * g) - 2.0 * a[3] * a[3] / a[4]);
  c.c3 = 2.0 * g * g * c.c0_prime;
  c.c0 = -d.lg_dot * (ap[2] - a[2] * ap[4] / a[4]) - 2.0 * d.gamma_dot * a[2] * a[3] / (g * a[4]);
  c.dt_m_hat = d.a1_dot;
  return c;
}

}  // namespace dwedge
