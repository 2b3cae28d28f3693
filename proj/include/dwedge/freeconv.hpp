#pragma once

// Deformed semicircle law: the self-consistent equation
//   m = int dnu(v) / (lambda*gamma*v - z - gamma^2 m),  Im m >= 0,
// its real-axis density, support endpoints and small-coupling expansion.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dwedge/errors.hpp"
#include "dwedge/measure.hpp"

namespace dwedge {

struct SolveOptions {
  double tol = 1e-12;
  int max_iter = 10000;
  double damping = 0.5;
  double fallback_damping = 0.1;
};

/// Richardson pair used for real-axis evaluation.
inline constexpr double kDensityEta = 1e-5;

struct FreeConvolutionSolution {
  Measure nu;
  double lambda = 0.0;
  double gamma = 1.0;
  std::vector<double> energies;
  std::vector<cplx> m;  // at solve_eta
  double solve_eta = 0.0;
  double e_minus = 0.0, e_plus = 0.0;
  std::vector<double> density;
};

namespace detail {

struct FcEval {
  cplx f;       // right-hand side
  cplx df;      // derivative of the right-hand side in m
  double inv2;  // int dnu / |d|^2
};

inline FcEval fc_eval(const Rule& r, double lg, double g2, cplx z, cplx m) {
  cplx f{}, df{};
  double inv2 = 0.0;
  const cplx shift = z + g2 * m;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const cplx d = lg * r.nodes[k] - shift;
    const cplx q = 1.0 / d;
    const double w = r.weights[k];
    f += w * q;
    df += w * q * q;
    inv2 += w * std::norm(q);
  }
  return {f, g2 * df, inv2};
}

// A fixed point is on the physical branch when Im m >= 0 and the stability
// factor gamma^2 int dnu/|d|^2 does not exceed one.
inline bool physical_branch(const FcEval& e, cplx m, double g2) {
  return m.imag() >= -1e-14 && g2 * e.inv2 <= 1.0 + 1e-9;
}

inline std::optional<cplx> newton(const Rule& r, double lg, double g2, cplx z, cplx m0, double tol,
                                  int max_steps, double* residual) {
  cplx m = m0;
  for (int it = 0; it < max_steps; ++it) {
    const FcEval e = fc_eval(r, lg, g2, z, m);
    const cplx g = m - e.f;
    const double res = std::abs(g);
    if (residual) *residual = res;
    if (res < tol) {
      if (!physical_branch(e, m, g2)) return std::nullopt;
      return m;
    }
    const cplx dg = 1.0 - e.df;
    if (std::abs(dg) < 1e-300) return std::nullopt;
    m -= g / dg;
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace detail

/// Solves the self-consistent equation at z (Im z > 0). `warm` seeds a Newton
/// attempt; the damped iteration from m = i is the fallback.
inline cplx solve_point(const Measure& nu, double lambda, double gamma, cplx z, const SolveOptions& opts = {},
                        std::optional<cplx> warm = std::nullopt) {
  if (!(z.imag() > 0.0)) throw DomainError("solve_point: Im z must be positive");
  const Rule& r = nu.rule();
  const double lg = lambda * gamma, g2 = gamma * gamma;
  double res = std::numeric_limits<double>::infinity();
  if (warm) {
    if (auto m = detail::newton(r, lg, g2, z, *warm, opts.tol, 30, &res)) return *m;
  }
  cplx m(0.0, 1.0);
  double alpha = opts.damping;
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const detail::FcEval e = detail::fc_eval(r, lg, g2, z, m);
    res = std::abs(m - e.f);
    if (res < opts.tol && detail::physical_branch(e, m, g2)) return m;
    if (res < best * 0.999) {
      best = res;
      since_best = 0;
    } else if (++since_best > 50 && alpha != opts.fallback_damping) {
      alpha = opts.fallback_damping;
      since_best = 0;
    }
    if (it % 25 == 0 || res < 1e-6) {
      double nres = 0.0;
      if (auto mn = detail::newton(r, lg, g2, z, m, opts.tol, 40, &nres)) return *mn;
    }
    m = (1.0 - alpha) * m + alpha * e.f;
    if (m.imag() < -1e-14) {
      m = cplx(0.0, 1.0);
      alpha = opts.fallback_damping;
    }
  }
  throw IterationError("solve_point: no convergence at z = (" + std::to_string(z.real()) + ", " +
                           std::to_string(z.imag()) + ")",
                       res);
}

/// Stieltjes inversion at a real energy: (1/pi) Im m extrapolated to eta -> 0
/// from eta and eta/2.
inline double density_from_pair(cplx m_eta, cplx m_half) {
  return std::max(0.0, (2.0 * m_half.imag() - m_eta.imag()) / std::numbers::pi);
}

inline double density_at(const Measure& nu, double lambda, double gamma, double e, const SolveOptions& opts = {}) {
  const cplx m1 = solve_point(nu, lambda, gamma, cplx(e, kDensityEta), opts);
  const cplx m2 = solve_point(nu, lambda, gamma, cplx(e, 0.5 * kDensityEta), opts, m1);
  return density_from_pair(m1, m2);
}

/// int dnu(v) / (lambda v - theta)^p for theta outside lambda * supp(nu).
inline double edge_moment(const Measure& nu, double lambda, double theta, int p) {
  if (lambda == 0.0) return std::pow(-theta, -p);
  if (nu.kind() == Measure::Kind::Jacobi) return std::pow(lambda, -p) * inverse_power_integral(nu, theta / lambda, p);
  return expect(nu, [&](double v) { return std::pow(lambda * v - theta, -p); });
}

namespace detail {

// Root of int dnu/(lambda v - theta)^2 = 1 beyond the upper (sign=+1) or
// lower (sign=-1) end of lambda * supp(nu), by bisection on the monotone tail.
inline double edge_root(const Measure& nu, double lambda, int sign) {
  const double vmax = sign > 0 ? nu.support_hi() : -nu.support_lo();
  // Work with theta' = sign * theta and v' = sign * v so the tail is always to the right.
  auto f = [&](double tp) { return edge_moment(nu, lambda, sign * tp, 2) - 1.0; };
  double a = lambda * vmax + 1e-12;
  double b = lambda * vmax + 10.0 + 10.0 * lambda;
  const double fa = f(a), fb = f(b);
  if (!(fa > 0.0))
    throw AssumptionViolated("edge root: no solution with theta - lambda*v_max > 0 (value at bracket " +
                             std::to_string(fa + 1.0) + ")");
  if (!(fb < 0.0)) throw IterationError("edge root: right bracket does not enclose the root", fb);
  for (int it = 0; it < 200 && b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(b); ++it) {
    const double c = 0.5 * (a + b);
    (f(c) > 0.0 ? a : b) = c;
  }
  return sign * 0.5 * (a + b);
}

}  // namespace detail

struct EdgeRoots {
  double theta_minus, theta_plus;
  double e_minus, e_plus;
};

/// Outer support edges without checking the single-interval assumption.
inline EdgeRoots outer_edges(const Measure& nu, double lambda) {
  EdgeRoots r{};
  r.theta_plus = detail::edge_root(nu, lambda, +1);
  r.theta_minus = detail::edge_root(nu, lambda, -1);
  r.e_plus = r.theta_plus - edge_moment(nu, lambda, r.theta_plus, 1);
  r.e_minus = r.theta_minus - edge_moment(nu, lambda, r.theta_minus, 1);
  return r;
}

/// Checks inf over I_nu of int dnu/(v-x)^2 >= lambda^2.
inline void check_single_interval(const Measure& nu, double lambda) {
  if (lambda == 0.0) return;
  const double inf = assumption_infimum(nu);
  if (!(inf >= lambda * lambda))
    throw AssumptionViolated("single-interval assumption fails: inf int dnu/(v-x)^2 = " + std::to_string(inf) +
                             " < lambda^2 = " + std::to_string(lambda * lambda));
}

/// (E_-, E_+) of the deformed semicircle law.
inline std::pair<double, double> support_endpoints(const Measure& nu, double lambda) {
  if (lambda < 0.0) throw InvalidArgument("support_endpoints: lambda must be nonnegative");
  check_single_interval(nu, lambda);
  const EdgeRoots r = outer_edges(nu, lambda);
  return {r.e_minus, r.e_plus};
}

/// Small-coupling expansion of E_+ through fourth order.
inline double asymptotic_eplus(const Measure& nu, double lambda0) {
  const double m1 = mean(nu);
  const double c2 = central_moment(nu, 2), c3 = central_moment(nu, 3), c4 = central_moment(nu, 4);
  const double l = lambda0;
  return 2.0 + l * m1 + l * l * c2 + l * l * l * c3 + l * l * l * l * (c4 - 2.25 * c2 * c2);
}

/// Solves on an arbitrary increasing energy list at height eta, warm-starting
/// each point from its left neighbor; density by Richardson on (eta, eta/2).
inline FreeConvolutionSolution solve_on(const Measure& nu, double lambda, double gamma, std::vector<double> energies,
                                        double eta, const SolveOptions& opts = {}) {
  if (!(eta > 0.0)) throw DomainError("solve_grid: eta must be positive");
  if (energies.empty()) throw InvalidArgument("solve_grid: empty energy grid");
  FreeConvolutionSolution s;
  s.nu = nu;
  s.lambda = lambda;
  s.gamma = gamma;
  s.solve_eta = eta;
  s.energies = std::move(energies);
  s.m.resize(s.energies.size());
  s.density.resize(s.energies.size());
  std::optional<cplx> w1, w2;
  for (std::size_t k = 0; k < s.energies.size(); ++k) {
    try {
      const cplx m1 = solve_point(nu, lambda, gamma, cplx(s.energies[k], eta), opts, w1);
      const cplx m2 = solve_point(nu, lambda, gamma, cplx(s.energies[k], 0.5 * eta), opts, w2 ? w2 : m1);
      s.m[k] = m1;
      s.density[k] = density_from_pair(m1, m2);
      w1 = m1;
      w2 = m2;
    } catch (const IterationError& e) {
      throw IterationError(e.what(), e.last_residual(), static_cast<std::ptrdiff_t>(k));
    }
  }
  // The gamma-decorated law is the undecorated one dilated by gamma.
  const EdgeRoots r = outer_edges(nu, lambda);
  s.e_minus = gamma * r.e_minus;
  s.e_plus = gamma * r.e_plus;
  return s;
}

inline FreeConvolutionSolution solve_grid(const Measure& nu, double lambda, double gamma, double lo, double hi,
                                          int n, double eta, const SolveOptions& opts = {}) {
  if (!(lo < hi) || n < 2) throw InvalidArgument("solve_grid: need lo < hi and n >= 2");
  std::vector<double> es(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) es[k] = lo + (hi - lo) * k / (n - 1);
  es.back() = hi;
  return solve_on(nu, lambda, gamma, std::move(es), eta, opts);
}

/// Largest fixed-point residual over a solution.
inline double max_residual(const FreeConvolutionSolution& s) {
  const Rule& r = s.nu.rule();
  double worst = 0.0;
  for (std::size_t k = 0; k < s.m.size(); ++k) {
    const auto e = detail::fc_eval(r, s.lambda * s.gamma, s.gamma * s.gamma, cplx(s.energies[k], s.solve_eta), s.m[k]);
    worst = std::max(worst, std::abs(s.m[k] - e.f));
  }
  return worst;
}

struct PowerFit {
  double amplitude;
  double exponent;
  int points;
};

/// Least-squares fit of log density against log(E_+ - E) on
/// E_+ - E in [1e-4, 1e-2].
inline PowerFit edge_exponent_fit(const FreeConvolutionSolution& s, double kmin = 1e-4, double kmax = 1e-2) {
  int near = 0;
  for (double e : s.energies)
    if (std::abs(e - s.e_plus) <= 0.05) ++near;
  if (near < 20) throw InvalidArgument("edge_exponent_fit: fewer than 20 grid points within 0.05 of E+");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < s.energies.size(); ++k) {
    const double kappa = s.e_plus - s.energies[k];
    if (kappa < kmin || kappa > kmax || !(s.density[k] > 0.0)) continue;
    const double x = std::log(kappa), y = std::log(s.density[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw InvalidArgument("edge_exponent_fit: fewer than 2 points in the fit window");
  const double p = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double c = (sy - p * sx) / n;
  return {std::exp(c), p, n};
}

}  // namespace dwedge
