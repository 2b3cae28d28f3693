#pragma once

// Gaussian rules by Golub-Welsch and a panel-wise adaptive Simpson rule.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "dwedge/errors.hpp"

namespace dwedge {

/// Nodes and weights of a quadrature rule; weights sum to the weight mass.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

// Eigenvalues of the Jacobi matrix are the nodes; squared first components of
// the normalized eigenvectors times the mass are the weights.
inline Rule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                         double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success) throw IterationError("golub_welsch: eigensolver failed", 0.0);
  const auto n = diag.size();
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    r.nodes[k] = es.eigenvalues()(k);
    const double v0 = es.eigenvectors()(0, k);
    r.weights[k] = mass * v0 * v0;
  }
  return r;
}

}  // namespace detail

/// Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta on [-1, 1],
/// normalized so the weights sum to 1.
inline Rule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw InvalidArgument("gauss_jacobi: n must be positive");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw InvalidArgument("gauss_jacobi: exponents must exceed -1");
  const double ab = alpha + beta;
  Eigen::VectorXd d(n), e(n > 1 ? n - 1 : 0);
  d(0) = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    d(k) = (beta * beta - alpha * alpha) / (s * (s + 2.0));
  }
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    e(k - 1) = std::sqrt(b2);
  }
  return detail::golub_welsch(d, e, 1.0);
}

/// Gauss-Legendre rule on [-1, 1] (weights sum to 2).
inline Rule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) e(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return detail::golub_welsch(d, e, 2.0);
}

/// Gauss-Legendre rule mapped to [a, b].
inline Rule gauss_legendre(int n, double a, double b) {
  Rule r = gauss_legendre(n);
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (std::size_t k = 0; k < r.size(); ++k) {
    r.nodes[k] = c + h * r.nodes[k];
    r.weights[k] *= h;
  }
  return r;
}

/// Gauss-Hermite rule for the standard normal density (weights sum to 1).
inline Rule gauss_hermite_normal(int n) {
  if (n < 1) throw InvalidArgument("gauss_hermite_normal: n must be positive");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) e(k - 1) = std::sqrt(static_cast<double>(k));
  return detail::golub_welsch(d, e, 1.0);
}

namespace detail {

template <class F>
double simpson_refine(const F& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson over `panels` equal panels, each refined to its share of
/// the absolute tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10, int panels = 200,
                        int max_depth = 40) {
  if (!(b > a)) throw InvalidArgument("adaptive_simpson: empty interval");
  if (panels < 1) panels = 1;
  const double h = (b - a) / panels;
  const double ptol = tol / panels;
  double total = 0.0;
  double x0 = a, f0 = f(a);
  for (int p = 0; p < panels; ++p) {
    const double x1 = (p + 1 == panels) ? b : a + (p + 1) * h;
    const double xm = 0.5 * (x0 + x1);
    const double fm = f(xm), f1 = f(x1);
    const double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
    total += detail::simpson_refine(f, x0, x1, f0, fm, f1, whole, ptol, max_depth);
    x0 = x1;
    f0 = f1;
  }
  return total;
}

}  // namespace dwedge
