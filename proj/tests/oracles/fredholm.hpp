#pragma once

// Independent Tracy-Widom values from Fredholm determinants discretized by
// Gauss-Legendre Nystrom on a truncated interval, with Boost's Airy functions.
//   F2(s) = det(I - K_Ai) on L^2(s, s + L),  K_Ai(x,y) = (Ai(x)Ai'(y) - Ai'(x)Ai(y)) / (x - y)
//   F1(s) = det(I - K_1)  on L^2(0, L),      K_1(x,y)  = Ai((x + y)/2 + s) / 2

#include <Eigen/Dense>
#include <boost/math/special_functions/airy.hpp>
#include <cmath>

#include "dwedge/quadrature.hpp"
#include "dwedge/tracy_widom.hpp"

namespace oracle {

inline double fredholm_f2(double s, int m = 80, double len = 16.0) {
  const dwedge::Rule r = dwedge::gauss_legendre(m, s, s + len);
  Eigen::VectorXd ai(m), aip(m), sw(m);
  for (int i = 0; i < m; ++i) {
    ai(i) = boost::math::airy_ai(r.nodes[i]);
    aip(i) = boost::math::airy_ai_prime(r.nodes[i]);
    sw(i) = std::sqrt(r.weights[i]);
  }
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double x = r.nodes[i], y = r.nodes[j];
      const double k = i == j ? aip(i) * aip(i) - x * ai(i) * ai(i) : (ai(i) * aip(j) - aip(i) * ai(j)) / (x - y);
      a(i, j) = (i == j ? 1.0 : 0.0) - sw(i) * k * sw(j);
    }
  return a.partialPivLu().determinant();
}

inline double fredholm_f1(double s, int m = 80, double len = 24.0) {
  const dwedge::Rule r = dwedge::gauss_legendre(m, 0.0, len);
  Eigen::MatrixXd a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double k = 0.5 * boost::math::airy_ai(0.5 * (r.nodes[i] + r.nodes[j]) + s);
      a(i, j) = (i == j ? 1.0 : 0.0) - std::sqrt(r.weights[i]) * k * std::sqrt(r.weights[j]);
    }
  return a.partialPivLu().determinant();
}

// Mean and variance of a CDF by Gauss-Legendre on [lo, 0] and [0, hi].
template <class F>
dwedge::Moments moments_from_cdf(F&& cdf, double lo, double hi) {
  const dwedge::Rule neg = dwedge::gauss_legendre(240, lo, 0.0), pos = dwedge::gauss_legendre(240, 0.0, hi);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < neg.size(); ++k) {
    const double f = cdf(neg.nodes[k]);
    m1 -= neg.weights[k] * f;
    m2 -= 2.0 * neg.weights[k] * neg.nodes[k] * f;
  }
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const double f = 1.0 - cdf(pos.nodes[k]);
    m1 += pos.weights[k] * f;
    m2 += 2.0 * pos.weights[k] * pos.nodes[k] * f;
  }
  return {m1, m2 - m1 * m1};
}

}  // namespace oracle
