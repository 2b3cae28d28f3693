#pragma once

// Tracy-Widom F1 and F2 through the Hastings-McLeod solution of
// q'' = s q + 2 q^3, q ~ Ai at +infinity. The ODE is integrated from s0 = 8
// leftwards (the stable direction) with Dormand-Prince 5(4) together with
//   I(s) = int_s^inf q^2,  J(s) = int_s^inf (x - s) q^2,  K(s) = int_s^inf q,
// so that F2 = exp(-J) and F1 = exp(-K/2) sqrt(F2). Values are tabulated on
// [-10, 6] at step 0.01 and interpolated by cubic Hermite with the exact
// derivatives F2' = I F2 and F1' = (q + I) F1 / 2.
//
// In double precision the backward integration leaves the separatrix near
// s = -8, so left of kTwSwitch q is taken from its expansion at -infinity and
// the integrals are continued by quadrature.

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "dwedge/airy.hpp"
#include "dwedge/errors.hpp"
#include "dwedge/quadrature.hpp"

namespace dwedge {

inline constexpr double kTwLo = -10.0;
inline constexpr double kTwHi = 6.0;
inline constexpr double kTwStep = 0.01;
inline constexpr double kTwStart = 8.0;
inline constexpr double kTwRelTol = 1e-10;
inline constexpr double kTwSwitch = -6.0;

struct TwValue {
  double value;
  bool clamped;  // s was outside [kTwLo, kTwHi]
};

class TracyWidomTable {
 public:
  using State = std::array<double, 5>;  // q, q', I, J, K

  static const TracyWidomTable& instance() {
    static const TracyWidomTable t;
    return t;
  }

  static State initial_state(double s0) {
    const AiryPair a = airy(s0);
    State y{};
    y[0] = a.ai;
    y[1] = a.aip;
    // Closed forms for the Airy tails.
    y[2] = a.aip * a.aip - s0 * a.ai * a.ai;
    y[3] = (2.0 * s0 * s0 * a.ai * a.ai - 2.0 * s0 * a.aip * a.aip - a.ai * a.aip) / 3.0;
    const Rule r = gauss_legendre(48, s0, s0 + 16.0);
    y[4] = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) y[4] += r.weights[k] * airy_ai(r.nodes[k]);
    return y;
  }

  static void rhs(const State& y, State& dy, double s) {
    dy[0] = y[1];
    dy[1] = s * y[0] + 2.0 * y[0] * y[0] * y[0];
    dy[2] = -y[0] * y[0];
    dy[3] = -y[2];
    dy[4] = -y[0];
  }

  /// q(s) = sqrt(-s/2) (1 + s^-3/8 - 73 s^-6/128 + 10657 s^-9/1024) for s -> -infinity.
  static double q_left(double s) {
    const double r = 1.0 / (s * s * s);
    return std::sqrt(-0.5 * s) * (1.0 + r * (0.125 + r * (-73.0 / 128.0 + r * 10657.0 / 1024.0)));
  }

  /// State at s < kTwSwitch continued from the state at kTwSwitch.
  static State continue_left(const State& at_switch, double s) {
    const Rule r = gauss_legendre(24, s, kTwSwitch);
    State y = at_switch;
    double iq2 = 0.0, ixq2 = 0.0, iq = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      const double x = r.nodes[k], q = q_left(x);
      iq += r.weights[k] * q;
      iq2 += r.weights[k] * q * q;
      ixq2 += r.weights[k] * (x - s) * q * q;
    }
    const double h = 1e-6;
    y[0] = q_left(s);
    y[1] = (q_left(s + h) - q_left(s - h)) / (2.0 * h);
    y[2] = at_switch[2] + iq2;
    y[3] = at_switch[3] + (kTwSwitch - s) * at_switch[2] + ixq2;
    y[4] = at_switch[4] + iq;
    return y;
  }

  /// Integrates from kTwStart down to each requested point (decreasing order).
  static std::vector<State> integrate_to(const std::vector<double>& points, double rtol = kTwRelTol) {
    namespace ode = boost::numeric::odeint;
    auto stepper = ode::make_controlled(1e-300, rtol, ode::runge_kutta_dopri5<State>());
    State y = initial_state(kTwStart);
    double s = kTwStart;
    std::vector<State> out;
    out.reserve(points.size());
    std::optional<State> at_switch;
    for (double p : points) {
      if (p > s) throw InvalidArgument("tracy-widom: integration points must decrease");
      if (p < kTwSwitch) {
        if (!at_switch) {
          if (s > kTwSwitch) ode::integrate_adaptive(stepper, &TracyWidomTable::rhs, y, s, kTwSwitch, -1e-3);
          s = kTwSwitch;
          at_switch = y;
        }
        out.push_back(continue_left(*at_switch, p));
        s = p;
        continue;
      }
      if (p < s) ode::integrate_adaptive(stepper, &TracyWidomTable::rhs, y, s, p, -1e-3);
      s = p;
      out.push_back(y);
    }
    return out;
  }

  TwValue cdf(int beta, double s) const {
    check_beta(beta);
    if (s <= kTwLo) return {beta == 1 ? f1_.front() : f2_.front(), s < kTwLo};
    if (s >= kTwHi) return {beta == 1 ? f1_.back() : f2_.back(), s > kTwHi};
    const auto& f = beta == 1 ? f1_ : f2_;
    const auto& d = beta == 1 ? d1_ : d2_;
    std::size_t k = static_cast<std::size_t>((s - kTwLo) / kTwStep);
    if (k >= s_.size() - 1) k = s_.size() - 2;
    const double h = s_[k + 1] - s_[k];
    const double u = (s - s_[k]) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return {h00 * f[k] + h10 * h * d[k] + h01 * f[k + 1] + h11 * h * d[k + 1], false};
  }

  double pdf(int beta, double s) const {
    check_beta(beta);
    if (s < kTwLo || s > kTwHi) return 0.0;
    const auto& f = beta == 1 ? f1_ : f2_;
    const auto& d = beta == 1 ? d1_ : d2_;
    std::size_t k = static_cast<std::size_t>((s - kTwLo) / kTwStep);
    if (k >= s_.size() - 1) k = s_.size() - 2;
    const double h = s_[k + 1] - s_[k];
    const double u = (s - s_[k]) / h;
    const double g00 = 6 * u * (u - 1) / h, g10 = (1 - u) * (1 - 3 * u);
    const double g01 = -g00, g11 = u * (3 * u - 2);
    return g00 * f[k] + g10 * d[k] + g01 * f[k + 1] + g11 * d[k + 1];
  }

  const std::vector<double>& grid() const { return s_; }

 private:
  TracyWidomTable() {
    const int n = static_cast<int>(std::lround((kTwHi - kTwLo) / kTwStep)) + 1;
    std::vector<double> pts(n);
    for (int k = 0; k < n; ++k) pts[k] = kTwHi - k * kTwStep;
    const auto ys = integrate_to(pts);
    s_.resize(n);
    f1_.resize(n);
    f2_.resize(n);
    d1_.resize(n);
    d2_.resize(n);
    for (int k = 0; k < n; ++k) {
      const int j = n - 1 - k;  // ascending storage
      const State& y = ys[k];
      s_[j] = pts[k];
      f2_[j] = std::exp(-y[3]);
      f1_[j] = std::exp(-0.5 * y[4]) * std::sqrt(f2_[j]);
      d2_[j] = y[2] * f2_[j];
      d1_[j] = 0.5 * (y[0] + y[2]) * f1_[j];
    }
  }

  static void check_beta(int beta) {
    if (beta != 1 && beta != 2) throw InvalidArgument("tracy-widom: beta must be 1 or 2");
  }

  std::vector<double> s_, f1_, f2_, d1_, d2_;
};

inline double tw_cdf(int beta, double s) { return TracyWidomTable::instance().cdf(beta, s).value; }
inline TwValue tw_cdf_checked(int beta, double s) { return TracyWidomTable::instance().cdf(beta, s); }
inline double tw_pdf(int beta, double s) { return TracyWidomTable::instance().pdf(beta, s); }

struct Moments {
  double mean;
  double variance;
};

/// Mean and variance from the CDF:
/// E X = int_0^inf (1 - F) - int_-inf^0 F,  E X^2 = 2 int_0^inf s (1 - F) + 2 int_-inf^0 |s| F.
inline Moments tw_moments(int beta) {
  const Rule neg = gauss_legendre(200, kTwLo, 0.0), pos = gauss_legendre(200, 0.0, kTwHi);
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t k = 0; k < neg.size(); ++k) {
    const double s = neg.nodes[k], f = tw_cdf(beta, s);
    m1 -= neg.weights[k] * f;
    m2 += 2.0 * neg.weights[k] * (-s) * f;
  }
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const double s = pos.nodes[k], f = 1.0 - tw_cdf(beta, s);
    m1 += pos.weights[k] * f;
    m2 += 2.0 * pos.weights[k] * s * f;
  }
  return {m1, m2 - m1 * m1};
}

}  // namespace dwedge
