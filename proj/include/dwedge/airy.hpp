#pragma once

// Airy function Ai and its derivative: Maclaurin series for |x| <= 5, the
// standard asymptotic expansions outside.

#include <cmath>
#include <numbers>

namespace dwedge {

struct AiryPair {
  double ai;
  double aip;
};

namespace detail {

inline constexpr double kAi0 = 0.355028053887817239260;   // Ai(0)
inline constexpr double kAip0 = 0.258819403792806798405;  // -Ai'(0)

inline AiryPair airy_series(double x) {
  const double x3 = x * x * x;
  // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}; Ai = Ai(0) f + Ai'(0) g.
  // a and b hold the current terms a_k x^{3k} and b_k x^{3k+1}.
  double a = 1.0, b = x;
  double f = 1.0, g = x, fp = 0.0, gp = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double a_next = a * x3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
    const double b_next = b * x3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
    // f' and g' term by term from the current (pre-update) terms.
    fp += a * x * x / (3.0 * k + 2.0);
    gp += b * x * x / (3.0 * k + 3.0);
    a = a_next;
    b = b_next;
    f += a;
    g += b;
    if (std::abs(a) < 1e-18 * std::abs(f) && std::abs(b) < 1e-18 * (std::abs(g) + 1e-300)) break;
  }
  return {kAi0 * f - kAip0 * g, kAi0 * fp - kAip0 * gp};
}

// u_k and v_k of the asymptotic series; the sums stop at the smallest term.
inline double airy_u(int k) {
  double u = 1.0;
  for (int j = 1; j <= k; ++j) u *= (6.0 * j - 5.0) * (6.0 * j - 3.0) * (6.0 * j - 1.0) / ((2.0 * j - 1.0) * 216.0 * j);
  return u;
}

inline double airy_v(int k) { return k == 0 ? 1.0 : -(6.0 * k + 1.0) / (6.0 * k - 1.0) * airy_u(k); }

inline AiryPair airy_asymptotic_right(double x) {
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  double su = 0.0, sv = 0.0, last = INFINITY, p = 1.0;
  for (int k = 0; k < 60; ++k) {
    const double tu = airy_u(k) * p, tv = airy_v(k) * p;
    if (std::abs(tu) > last) break;
    last = std::abs(tu);
    su += tu;
    sv += tv;
    p *= -1.0 / zeta;
  }
  const double e = std::exp(-zeta) / (2.0 * std::sqrt(std::numbers::pi));
  const double q = std::sqrt(std::sqrt(x));
  return {e / q * su, -e * q * sv};
}

inline AiryPair airy_asymptotic_left(double x) {
  const double y = -x;
  const double zeta = 2.0 / 3.0 * y * std::sqrt(y);
  double ue = 0.0, uo = 0.0, ve = 0.0, vo = 0.0, last = INFINITY, p = 1.0;
  for (int k = 0; k < 60; ++k) {
    const double u = airy_u(k) * p;
    if (std::abs(u) > last) break;
    last = std::abs(u);
    // k even contributes (-1)^{k/2}; k odd contributes (-1)^{(k-1)/2}.
    const double sgn = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    if (k % 2 == 0) {
      ue += sgn * u;
      ve += sgn * airy_v(k) * p;
    } else {
      uo += sgn * u;
      vo += sgn * airy_v(k) * p;
    }
    p /= zeta;
  }
  const double ph = zeta + 0.25 * std::numbers::pi;
  const double s = std::sin(ph), c = std::cos(ph);
  const double q = std::sqrt(std::sqrt(y));
  const double rpi = 1.0 / std::sqrt(std::numbers::pi);
  return {rpi / q * (s * ue - c * uo), -rpi * q * (c * ve + s * vo)};
}

}  // namespace detail

inline AiryPair airy(double x) {
  if (x > 5.0) return detail::airy_asymptotic_right(x);
  if (x < -5.0) return detail::airy_asymptotic_left(x);
  return detail::airy_series(x);
}

inline double airy_ai(double x) { return airy(x).ai; }

}  // namespace dwedge
