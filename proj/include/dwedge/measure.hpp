#pragma once

// Probability measures on the real line: finitely many atoms, a density on a
// uniform grid, or a Jacobi law (1+v)^a (1-v)^b / Z on [-1, 1].

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>
#include <variant>
#include <vector>

#include "dwedge/errors.hpp"
#include "dwedge/quadrature.hpp"
#include "dwedge/rng.hpp"

namespace dwedge {

using cplx = std::complex<double>;

struct Atomic {
  std::vector<double> x;  // strictly increasing
  std::vector<double> w;
};

struct GridDensity {
  double lo = 0.0, hi = 1.0;
  std::vector<double> values;  // density per unit length at lo + k (hi-lo)/(n-1)
  double step() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
  double at(std::size_t k) const { return lo + static_cast<double>(k) * step(); }
};

struct Jacobi {
  double a = 0.0, b = 0.0;  // exponent of (1+v) and of (1-v)
};

/// Number of Gauss-Jacobi nodes used to integrate against a Jacobi measure.
inline constexpr int kJacobiNodes = 256;
/// Atoms closer than this are merged by empirical_from_values.
inline constexpr double kAtomMergeTol = 1e-12;

class Measure {
 public:
  enum class Kind { Atomic, Grid, Jacobi };

  Measure() : Measure(point_mass(0.0)) {}

  /// Atoms need not be sorted; equal locations are merged. Weights must be
  /// nonnegative and sum to 1 within 1e-10; they are renormalized exactly.
  static Measure atomic(std::vector<std::pair<double, double>> atoms) {
    if (atoms.empty()) throw InvalidArgument("atomic measure: no atoms");
    std::sort(atoms.begin(), atoms.end());
    Atomic a;
    double total = 0.0;
    for (const auto& [x, w] : atoms) {
      if (!std::isfinite(x) || !std::isfinite(w)) throw InvalidArgument("atomic measure: non-finite atom");
      if (w < 0.0) throw InvalidArgument("atomic measure: negative weight");
      total += w;
      if (!a.x.empty() && x - a.x.back() <= kAtomMergeTol) {
        a.w.back() += w;
      } else {
        a.x.push_back(x);
        a.w.push_back(w);
      }
    }
    if (std::abs(total - 1.0) > 1e-10) throw InvalidArgument("atomic measure: weights do not sum to 1");
    for (double& w : a.w) w /= total;
    return Measure(std::move(a));
  }

  static Measure point_mass(double c) { return atomic({{c, 1.0}}); }

  /// Symmetric two-atom law (delta_{-c} + delta_{c}) / 2.
  static Measure two_atom(double c = 1.0) { return atomic({{-c, 0.5}, {c, 0.5}}); }

  /// Density sampled on n >= 2 uniform points of [lo, hi]; normalized to unit
  /// trapezoid mass.
  static Measure grid(double lo, double hi, std::vector<double> values) {
    if (!(hi > lo)) throw InvalidArgument("grid measure: need lo < hi");
    if (values.size() < 2) throw InvalidArgument("grid measure: need at least 2 values");
    for (double v : values)
      if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("grid measure: negative or non-finite density");
    GridDensity g{lo, hi, std::move(values)};
    const double h = g.step();
    double mass = 0.0;
    for (std::size_t k = 0; k + 1 < g.values.size(); ++k) mass += 0.5 * h * (g.values[k] + g.values[k + 1]);
    if (!(mass > 0.0)) throw InvalidArgument("grid measure: zero mass");
    for (double& v : g.values) v /= mass;
    return Measure(std::move(g));
  }

  static Measure jacobi(double a, double b) {
    if (!(a > -1.0) || !(b > -1.0)) throw InvalidArgument("jacobi measure: exponents must exceed -1");
    return Measure(Jacobi{a, b});
  }

  Kind kind() const noexcept { return static_cast<Kind>(data_.index()); }
  bool is_atomic() const noexcept { return kind() == Kind::Atomic; }
  const Atomic& atoms() const { return std::get<Atomic>(data_); }
  const GridDensity& grid_density() const { return std::get<GridDensity>(data_); }
  const Jacobi& jacobi_params() const { return std::get<Jacobi>(data_); }

  /// Discrete rule representing the measure: the atoms themselves, the
  /// composite trapezoid rule, or Gauss-Jacobi.
  const Rule& rule() const noexcept { return *rule_; }

  /// Smallest closed interval containing the support.
  double support_lo() const noexcept { return lo_; }
  double support_hi() const noexcept { return hi_; }

  /// Jacobi normalization 2^(a+b+1) B(a+1, b+1).
  static double jacobi_norm(double a, double b) {
    return std::exp2(a + b + 1.0) * boost::math::beta(a + 1.0, b + 1.0);
  }

  /// Density at v (Grid: linear interpolation; Jacobi: closed form).
  double density(double v) const {
    if (auto* g = std::get_if<GridDensity>(&data_)) {
      if (v < g->lo || v > g->hi) return 0.0;
      const double s = (v - g->lo) / g->step();
      const auto k = std::min(static_cast<std::size_t>(s), g->values.size() - 2);
      const double f = s - static_cast<double>(k);
      return (1.0 - f) * g->values[k] + f * g->values[k + 1];
    }
    if (auto* j = std::get_if<Jacobi>(&data_)) {
      if (v <= -1.0 || v >= 1.0) return 0.0;
      return std::pow(1.0 + v, j->a) * std::pow(1.0 - v, j->b) / jacobi_norm(j->a, j->b);
    }
    throw InvalidArgument("density: atomic measure has no density");
  }

 private:
  using Data = std::variant<Atomic, GridDensity, Jacobi>;

  explicit Measure(Data d) : data_(std::move(d)) {
    auto r = std::make_shared<Rule>();
    if (auto* a = std::get_if<Atomic>(&data_)) {
      r->nodes = a->x;
      r->weights = a->w;
      lo_ = a->x.front();
      hi_ = a->x.back();
    } else if (auto* g = std::get_if<GridDensity>(&data_)) {
      const double h = g->step();
      const std::size_t n = g->values.size();
      for (std::size_t k = 0; k < n; ++k) {
        const double w = (k == 0 || k + 1 == n ? 0.5 : 1.0) * h * g->values[k];
        r->nodes.push_back(g->at(k));
        r->weights.push_back(w);
      }
      std::size_t first = 0, last = n - 1;
      while (first < n && g->values[first] == 0.0) ++first;
      while (last > first && g->values[last] == 0.0) --last;
      // Zero-density cells adjacent to the first/last positive value still
      // carry mass under linear interpolation.
      lo_ = g->at(first > 0 ? first - 1 : 0);
      hi_ = g->at(last + 1 < n ? last + 1 : n - 1);
    } else {
      const auto& j = std::get<Jacobi>(data_);
      *r = gauss_jacobi(kJacobiNodes, j.b, j.a);
      lo_ = -1.0;
      hi_ = 1.0;
    }
    rule_ = std::move(r);
  }

  Data data_;
  std::shared_ptr<const Rule> rule_;
  double lo_ = 0.0, hi_ = 0.0;
};

/// Sum of f(v) over the measure's rule.
template <class F>
auto expect(const Measure& m, F&& f) {
  const Rule& r = m.rule();
  using R = decltype(f(0.0));
  R acc{};
  for (std::size_t k = 0; k < r.size(); ++k) acc += r.weights[k] * f(r.nodes[k]);
  return acc;
}

namespace detail {

// Integral of g(v, 1+v, 1-v) (1+v)^a (1-v)^b / Z over [lo, hi] within [-1, 1],
// with endpoint distances taken from tanh-sinh's complement argument.
template <class G>
double jacobi_integral(const Jacobi& j, double lo, double hi, G&& g, double tol = 1e-13) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double z = Measure::jacobi_norm(j.a, j.b);
  auto f = [&](double v, double vc) {
    double one_plus = 1.0 + v, one_minus = 1.0 - v;
    if (vc < 0.0 && lo == -1.0) one_plus = -vc;
    if (vc > 0.0 && hi == 1.0) one_minus = vc;
    if (one_plus <= 0.0 || one_minus <= 0.0) return 0.0;
    return g(v, vc) * std::pow(one_plus, j.a) * std::pow(one_minus, j.b) / z;
  };
  return ts.integrate(f, lo, hi, tol);
}

inline double dist_to_interval(cplx z, double lo, double hi) {
  const double dx = z.real() < lo ? lo - z.real() : (z.real() > hi ? z.real() - hi : 0.0);
  return std::hypot(dx, z.imag());
}

}  // namespace detail

/// Stieltjes transform: integral of dm(v) / (v - z), Im z > 0.
inline cplx stieltjes(const Measure& m, cplx z) {
  if (!(z.imag() > 0.0)) throw DomainError("stieltjes: Im z must be positive");
  if (m.kind() == Measure::Kind::Jacobi &&
      detail::dist_to_interval(z, -1.0, 1.0) < 0.1) {
    // Close to the support the Gauss-Jacobi rule loses accuracy; integrate
    // real and imaginary parts with tanh-sinh, splitting at Re z so the
    // Lorentzian peak sits at a panel endpoint.
    const auto& j = m.jacobi_params();
    const double e = z.real(), eta = z.imag();
    std::vector<std::pair<double, double>> pieces;
    if (e > -1.0 && e < 1.0) {
      pieces = {{-1.0, e}, {e, 1.0}};
    } else {
      pieces = {{-1.0, 1.0}};
    }
    double re = 0.0, im = 0.0;
    for (auto [lo, hi] : pieces) {
      auto diff = [&](double v, double vc) {
        // v - e, exact near a split point at e
        if (vc < 0.0 && lo == e) return -vc;
        if (vc > 0.0 && hi == e) return -vc;
        return v - e;
      };
      re += detail::jacobi_integral(j, lo, hi, [&](double v, double vc) {
        const double d = diff(v, vc);
        return d / (d * d + eta * eta);
      });
      im += detail::jacobi_integral(j, lo, hi, [&](double v, double vc) {
        const double d = diff(v, vc);
        return eta / (d * d + eta * eta);
      });
    }
    return {re, im};
  }
  return expect(m, [z](double v) { return 1.0 / (v - z); });
}

inline double mean(const Measure& m) {
  return expect(m, [](double v) { return v; });
}

/// k-th central moment, k <= 8. Exact for atomic and Jacobi measures.
inline double central_moment(const Measure& m, int k) {
  if (k < 0 || k > 8) throw InvalidArgument("central_moment: k must lie in [0, 8]");
  if (k == 0) return 1.0;
  if (k == 1) return 0.0;
  const double mu = mean(m);
  return expect(m, [mu, k](double v) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= (v - mu);
    return p;
  });
}

/// Integral of dm(v) / (v - x)^p for real x outside the open support.
/// Returns +inf when the integral diverges.
inline double inverse_power_integral(const Measure& m, double x, int p) {
  if (m.kind() == Measure::Kind::Jacobi) {
    const auto& j = m.jacobi_params();
    if (x > -1.0 && x < 1.0) return std::numeric_limits<double>::infinity();
    const bool right = x >= 1.0;
    const double gap = right ? x - 1.0 : -1.0 - x;
    const double edge_exp = right ? j.b : j.a;
    if (gap == 0.0) {
      if (edge_exp <= p - 1.0) return std::numeric_limits<double>::infinity();
      // (v - 1)^-p = (-1)^p (1 - v)^-p and (v + 1)^-p folds into the weight.
      const double r = (right ? Measure::jacobi_norm(j.a, j.b - p) : Measure::jacobi_norm(j.a - p, j.b)) /
                       Measure::jacobi_norm(j.a, j.b);
      return (right && p % 2) ? -r : r;
    }
    if (gap >= 0.1) return expect(m, [x, p](double v) { return std::pow(v - x, -p); });
    // x - v = gap + (1 - v) on the right, -(gap + (1 + v)) on the left.
    return detail::jacobi_integral(j, -1.0, 1.0, [&](double v, double vc) {
      double d;
      if (right) {
        d = gap + ((vc > 0.0) ? vc : 1.0 - v);
        return std::pow(-d, -p);
      }
      d = gap + ((vc < 0.0) ? -vc : 1.0 + v);
      return std::pow(d, -p);
    });
  }
  const Rule& r = m.rule();
  double acc = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (r.weights[k] == 0.0) continue;
    const double d = r.nodes[k] - x;
    if (d == 0.0) return std::numeric_limits<double>::infinity();
    acc += r.weights[k] * std::pow(d, -p);
  }
  return acc;
}

/// Equal-weight atomic measure at the given values, duplicates merged.
inline Measure empirical_from_values(const std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("empirical_from_values: empty list");
  const double w = 1.0 / static_cast<double>(values.size());
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(values.size());
  for (double v : values) atoms.emplace_back(v, w);
  std::sort(atoms.begin(), atoms.end());
  // Weights add to 1 only up to rounding; rescale before validation.
  double total = 0.0;
  for (auto& a : atoms) total += a.second;
  for (auto& a : atoms) a.second /= total;
  return Measure::atomic(std::move(atoms));
}

/// One draw from m using one or two uniforms from rng.
inline double sample_one(const Measure& m, Rng& rng) {
  const double u = rng.uniform();
  switch (m.kind()) {
    case Measure::Kind::Atomic: {
      const auto& a = m.atoms();
      double c = 0.0;
      for (std::size_t k = 0; k < a.x.size(); ++k) {
        c += a.w[k];
        if (u < c) return a.x[k];
      }
      return a.x.back();
    }
    case Measure::Kind::Grid: {
      const auto& g = m.grid_density();
      const double h = g.step();
      double c = 0.0;
      for (std::size_t k = 0; k + 1 < g.values.size(); ++k) {
        const double f0 = g.values[k], f1 = g.values[k + 1];
        const double cell = 0.5 * h * (f0 + f1);
        if (u < c + cell || k + 2 == g.values.size()) {
          // Solve f0 s + (f1 - f0) s^2 / (2h) = u - c for s in [0, h].
          const double r = std::clamp(u - c, 0.0, cell);
          const double qa = (f1 - f0) / (2.0 * h);
          double s;
          if (std::abs(qa) * h < 1e-12 * std::max(f0, 1e-300)) {
            s = f0 > 0.0 ? r / f0 : 0.5 * h;
          } else {
            const double disc = std::max(f0 * f0 + 4.0 * qa * r, 0.0);
            s = 2.0 * r / (f0 + std::sqrt(disc));
          }
          return g.at(k) + std::clamp(s, 0.0, h);
        }
        c += cell;
      }
      return g.hi;
    }
    case Measure::Kind::Jacobi: {
      const auto& j = m.jacobi_params();
      return 2.0 * boost::math::ibeta_inv(j.a + 1.0, j.b + 1.0, u) - 1.0;
    }
  }
  return 0.0;
}

/// n iid draws.
inline std::vector<double> sample(const Measure& m, std::size_t n, Rng& rng) {
  if (n < 1) throw InvalidArgument("sample: n must be positive");
  std::vector<double> out(n);
  if (m.kind() == Measure::Kind::Atomic) {
    const auto& a = m.atoms();
    std::vector<double> cdf(a.w.size());
    std::partial_sum(a.w.begin(), a.w.end(), cdf.begin());
    for (auto& v : out) {
      const double u = rng.uniform();
      auto it = std::upper_bound(cdf.begin(), cdf.end() - 1, u);
      v = a.x[static_cast<std::size_t>(it - cdf.begin())];
    }
    return out;
  }
  for (auto& v : out) v = sample_one(m, rng);
  return out;
}

/// inf over the support hull of the integral of dm(v) / (v - x)^2.
/// Atomic measures are scanned on `grid_points` points plus the endpoints;
/// for densities the integral diverges wherever the density is positive, so
/// only the hull endpoints are examined.
inline double assumption_infimum(const Measure& m, int grid_points = 10000) {
  const double lo = m.support_lo(), hi = m.support_hi();
  if (m.kind() == Measure::Kind::Jacobi)
    return std::min(inverse_power_integral(m, -1.0, 2), inverse_power_integral(m, 1.0, 2));
  if (m.kind() == Measure::Kind::Grid)
    return std::min(inverse_power_integral(m, lo, 2), inverse_power_integral(m, hi, 2));
  if (hi == lo) return std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= grid_points; ++k) {
    const double x = lo + (hi - lo) * k / grid_points;
    best = std::min(best, inverse_power_integral(m, x, 2));
  }
  return best;
}

}  // namespace dwedge
