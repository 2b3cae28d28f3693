#pragma once

// Limit laws for the rescaled top eigenvalue: F1, F2, a centered Gaussian,
// and the law of X_F1 + X_Gauss with independent summands.

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "dwedge/errors.hpp"
#include "dwedge/quadrature.hpp"
#include "dwedge/tracy_widom.hpp"

namespace dwedge {

/// Fritsch-Carlson monotone cubic through (x_k, y_k) on a uniform grid.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(double x0, double h, std::vector<double> y) : x0_(x0), h_(h), y_(std::move(y)), d_(y_.size(), 0.0) {
    const std::size_t n = y_.size();
    if (n < 2) throw InvalidArgument("MonotoneCubic: need at least two points");
    std::vector<double> del(n - 1);
    for (std::size_t k = 0; k + 1 < n; ++k) del[k] = (y_[k + 1] - y_[k]) / h_;
    d_[0] = del[0];
    d_[n - 1] = del[n - 2];
    for (std::size_t k = 1; k + 1 < n; ++k) d_[k] = del[k - 1] * del[k] <= 0.0 ? 0.0 : 0.5 * (del[k - 1] + del[k]);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (del[k] == 0.0) {
        d_[k] = d_[k + 1] = 0.0;
        continue;
      }
      const double a = d_[k] / del[k], b = d_[k + 1] / del[k];
      const double r = a * a + b * b;
      if (r > 9.0) {
        const double t = 3.0 / std::sqrt(r);
        d_[k] = t * a * del[k];
        d_[k + 1] = t * b * del[k];
      }
    }
  }

  double operator()(double x) const {
    if (x <= x0_) return y_.front();
    const double xe = x0_ + h_ * (y_.size() - 1);
    if (x >= xe) return y_.back();
    std::size_t k = static_cast<std::size_t>((x - x0_) / h_);
    if (k >= y_.size() - 1) k = y_.size() - 2;
    const double u = (x - (x0_ + h_ * k)) / h_;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * y_[k] + h10 * h_ * d_[k] + h01 * y_[k + 1] + h11 * h_ * d_[k + 1];
  }

 private:
  double x0_ = 0.0, h_ = 1.0;
  std::vector<double> y_, d_;
};

inline constexpr int kConvolutionNodes = 64;

class LimitLaw {
 public:
  enum class Kind { TW1, TW2, Gaussian, TW1GaussConv };

  static LimitLaw tw1() { return LimitLaw(Kind::TW1, 0.0); }
  static LimitLaw tw2() { return LimitLaw(Kind::TW2, 0.0); }
  static LimitLaw gaussian(double sigma2) { return LimitLaw(Kind::Gaussian, sigma2); }
  static LimitLaw tw1_gauss_conv(double sigma2) { return LimitLaw(Kind::TW1GaussConv, sigma2); }

  Kind kind() const { return kind_; }
  double sigma2() const { return sigma2_; }

  std::string name() const {
    switch (kind_) {
      case Kind::TW1: return "tw1";
      case Kind::TW2: return "tw2";
      case Kind::Gaussian: return "gaussian";
      case Kind::TW1GaussConv: return "tw1_gauss_conv";
    }
    return "";
  }

  double cdf(double s) const {
    switch (kind_) {
      case Kind::TW1: return tw_cdf(1, s);
      case Kind::TW2: return tw_cdf(2, s);
      case Kind::Gaussian:
        if (sigma2_ == 0.0) return s >= 0.0 ? 1.0 : 0.0;
        return 0.5 * std::erfc(-s / std::sqrt(2.0 * sigma2_));
      case Kind::TW1GaussConv:
        if (sigma2_ == 0.0) return tw_cdf(1, s);
        return (*table_)(s);
    }
    return 0.0;
  }

  /// int F1(s - sigma x) dPhi(x) by Gauss-Hermite, bypassing the table.
  static double convolution_direct(double sigma2, double s) {
    static const Rule gh = gauss_hermite_normal(kConvolutionNodes);
    const double sd = std::sqrt(sigma2);
    double acc = 0.0;
    for (std::size_t k = 0; k < gh.size(); ++k) acc += gh.weights[k] * tw_cdf(1, s - sd * gh.nodes[k]);
    return acc;
  }

 private:
  LimitLaw(Kind k, double sigma2) : kind_(k), sigma2_(sigma2) {
    if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("limit law: variance must be finite and nonnegative");
    if (k == Kind::TW1GaussConv && sigma2 > 0.0) {
      const double sd = std::sqrt(sigma2);
      const double lo = kTwLo - 8.0 * sd, hi = kTwHi + 8.0 * sd;
      const int n = static_cast<int>(std::ceil((hi - lo) / kTwStep)) + 1;
      std::vector<double> y(n);
      for (int i = 0; i < n; ++i) y[i] = convolution_direct(sigma2, lo + i * kTwStep);
      table_ = std::make_shared<const MonotoneCubic>(lo, kTwStep, std::move(y));
    }
  }

  Kind kind_;
  double sigma2_;
  std::shared_ptr<const MonotoneCubic> table_;
};

}  // namespace dwedge
