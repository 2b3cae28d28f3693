#pragma once

// Green functions G(z) = (H - z)^{-1}, minors, the classical resolvent
// identities, local-law and optical-theorem residuals, and smoothed
// eigenvalue counts.

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dwedge/edgescale.hpp"
#include "dwedge/ensemble.hpp"
#include "dwedge/errors.hpp"
#include "dwedge/freeconv.hpp"
#include "dwedge/quadrature.hpp"

namespace dwedge {

using CMatrix = Eigen::MatrixXcd;

struct GreenEvaluation {
  cplx z;
  CMatrix g;
  cplx m;  // trace / N, N the size of the full matrix
};

/// G(z) for symmetric H by a pivoted LU solve of (H - z) X = I. `n_norm`
/// overrides the 1/N normalization of m (minors keep the parent's N).
inline GreenEvaluation green(const Matrix& h, cplx z, Eigen::Index n_norm = -1) {
  if (!(z.imag() > 0.0)) throw DomainError("green: Im z must be positive");
  const Eigen::Index n = h.rows();
  CMatrix a = h.cast<cplx>();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<CMatrix> lu(a);
  GreenEvaluation out{z, lu.solve(CMatrix::Identity(n, n)), cplx{}};
  if (!out.g.allFinite()) throw DomainError("green: singular resolvent solve");
  out.m = out.g.trace() / static_cast<double>(n_norm > 0 ? n_norm : n);
  return out;
}

/// Largest column residual of (H - z) G - I.
inline double green_residual(const Matrix& h, const GreenEvaluation& e) {
  CMatrix r = h.cast<cplx>() * e.g - e.z * e.g;
  r.diagonal().array() -= 1.0;
  return r.colwise().norm().maxCoeff();
}

struct Minor {
  Matrix h;
  std::vector<int> labels;  // original indices of the retained rows/columns
};

/// H with the rows and columns in `removed` deleted (0-based indices).
inline Minor minor(const Matrix& h, const std::vector<int>& removed) {
  const int n = static_cast<int>(h.rows());
  std::vector<char> drop(n, 0);
  for (int t : removed) {
    if (t < 0 || t >= n) throw InvalidArgument("minor: index out of range");
    drop[t] = 1;
  }
  Minor m;
  for (int i = 0; i < n; ++i)
    if (!drop[i]) m.labels.push_back(i);
  const int k = static_cast<int>(m.labels.size());
  m.h.resize(k, k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) m.h(a, b) = h(m.labels[a], m.labels[b]);
  return m;
}

/// Green function of a minor, indexed by original labels.
struct MinorGreen {
  Minor minor;
  GreenEvaluation eval;  // m uses the parent's 1/N normalization
  std::vector<int> position;  // original index -> row in eval.g, or -1
  cplx operator()(int i, int j) const { return eval.g(position.at(i), position.at(j)); }
};

inline MinorGreen minor_green(const Matrix& h, const std::vector<int>& removed, cplx z) {
  MinorGreen mg{minor(h, removed), {}, std::vector<int>(h.rows(), -1)};
  mg.eval = green(mg.minor.h, z, h.rows());
  for (std::size_t a = 0; a < mg.minor.labels.size(); ++a) mg.position[mg.minor.labels[a]] = static_cast<int>(a);
  return mg;
}

struct IdentityResiduals {
  double schur;      // G_ii against the Schur complement formula
  double basic;      // G_ij = G^(k)_ij + G_ik G_kj / G_kk
  double onesided;   // G_ij = -G_ii sum_k h_ik G^(i)_kj
  double twosided;   // G_ij = -G_ii G^(i)_jj (h_ij - sum h_ik G^(ij)_kl h_lj)
  double max() const { return std::max({schur, basic, onesided, twosided}); }
};

/// Residuals of the four resolvent identities for distinct indices i, j, k.
inline IdentityResiduals verify_identities(const Matrix& h, cplx z, int i, int j, int k) {
  const int n = static_cast<int>(h.rows());
  for (int t : {i, j, k})
    if (t < 0 || t >= n) throw InvalidArgument("verify_identities: index out of range");
  if (i == j || i == k || j == k) throw InvalidArgument("verify_identities: indices must be distinct");
  const GreenEvaluation full = green(h, z);
  const auto& g = full.g;
  const MinorGreen gi = minor_green(h, {i}, z);
  const MinorGreen gk = minor_green(h, {k}, z);
  const MinorGreen gij = minor_green(h, {i, j}, z);
  IdentityResiduals r{};

  cplx quad{};
  for (int a = 0; a < n; ++a) {
    if (a == i) continue;
    for (int b = 0; b < n; ++b) {
      if (b == i) continue;
      quad += h(i, a) * gi(a, b) * h(b, i);
    }
  }
  r.schur = std::abs(g(i, i) - 1.0 / (h(i, i) - z - quad));

  r.basic = std::abs(g(i, j) - (gk(i, j) + g(i, k) * g(k, j) / g(k, k)));

  cplx row{};
  for (int a = 0; a < n; ++a)
    if (a != i) row += h(i, a) * gi(a, j);
  r.onesided = std::abs(g(i, j) + g(i, i) * row);

  cplx inner{};
  for (int a = 0; a < n; ++a) {
    if (a == i || a == j) continue;
    for (int b = 0; b < n; ++b) {
      if (b == i || b == j) continue;
      inner += h(i, a) * gij(a, b) * h(b, j);
    }
  }
  r.twosided = std::abs(g(i, j) + g(i, i) * gi(j, j) * (h(i, j) - inner));
  return r;
}

/// max_i |sum_j |G_ij|^2 - Im G_ii / eta| (Ward identity).
inline double ward_residual(const GreenEvaluation& e) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < e.g.rows(); ++i)
    worst = std::max(worst, std::abs(e.g.row(i).squaredNorm() - e.g(i, i).imag() / e.z.imag()));
  return worst;
}

/// Exponent xi in the spectral domain eta >= N^{-1+xi}.
inline constexpr double kLocalLawXi = 0.01;

struct LocalLawResiduals {
  double r_m;        // |m - m_hat| N eta
  double r_offdiag;  // max_{i != j} |G_ij| / Pi
  double r_diag;     // max_i |G_ii - g_i| / Pi
  double pi;         // sqrt(Im m_hat / (N eta)) + 1 / (N eta)
  cplx m_hat;
};

/// Local-law residuals for the rescaled matrix gamma (lambda V + W); `v` is
/// the potential and `s` the scaling built from its empirical measure.
inline LocalLawResiduals local_law_residuals(const Matrix& h_rescaled, const std::vector<double>& v,
                                             const EdgeScaling& s, cplx z) {
  const Eigen::Index n = h_rescaled.rows();
  const double eta = z.imag();
  if (!(eta >= std::pow(static_cast<double>(n), -1.0 + kLocalLawXi)))
    throw DomainError("local_law_residuals: eta below N^{-1+xi}");
  if (static_cast<Eigen::Index>(v.size()) != n) throw InvalidArgument("local_law_residuals: potential length");
  const GreenEvaluation e = green(h_rescaled, z);
  const cplx mh = solve_point(s.nu, s.lambda, s.gamma, z);
  const double neta = static_cast<double>(n) * eta;
  LocalLawResiduals r{};
  r.m_hat = mh;
  r.pi = std::sqrt(mh.imag() / neta) + 1.0 / neta;
  r.r_m = std::abs(e.m - mh) * neta;
  double off = 0.0, diag = 0.0;
  const double lg = s.lambda * s.gamma, g2 = s.gamma * s.gamma;
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx gi = 1.0 / (lg * v[i] - z - g2 * mh);
    diag = std::max(diag, std::abs(e.g(i, i) - gi));
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) off = std::max(off, std::abs(e.g(i, j)));
  }
  r.r_offdiag = off / r.pi;
  r.r_diag = diag / r.pi;
  return r;
}

/// Optical-theorem residual for row i:
///   (z + gamma^2 m - tau) sum_s G_is G_si + (1/N) sum_{s,k} G_ik G_ks G_si.
inline cplx optical_residual(const GreenEvaluation& e, const EdgeScaling& s, int i) {
  const auto n = e.g.rows();
  if (i < 0 || i >= n) throw InvalidArgument("optical_residual: index out of range");
  const Eigen::RowVectorXcd row = e.g.row(i);
  const Eigen::RowVectorXcd row2 = row * e.g;  // (G^2)_{i,.}
  const cplx g2ii = (row.transpose().array() * e.g.col(i).array()).sum();
  const cplx g3ii = (row2.transpose().array() * e.g.col(i).array()).sum();
  const cplx coef = e.z + s.gamma * s.gamma * e.m - s.tau;
  return coef * g2ii + g3ii / static_cast<double>(n);
}

/// Row average of optical_residual computed from the spectrum alone:
/// (1/N) sum_i (G^p)_ii = (1/N) sum_k (mu_k - z)^{-p}.
inline cplx optical_residual_spectral(const std::vector<double>& mu, const EdgeScaling& s, cplx z) {
  const double n = static_cast<double>(mu.size());
  cplx t1{}, t2{}, t3{};
  for (double x : mu) {
    const cplx q = 1.0 / (x - z);
    t1 += q;
    t2 += q * q;
    t3 += q * q * q;
  }
  t1 /= n;
  t2 /= n;
  t3 /= n;
  const cplx coef = z + s.gamma * s.gamma * t1 - s.tau;
  return coef * t2 + t3 / n;
}

/// Row-averaged optical residual from a full Green function.
inline cplx optical_residual_mean(const GreenEvaluation& e, const EdgeScaling& s) {
  const auto n = e.g.rows();
  const CMatrix g2 = e.g * e.g;
  const cplx tr2 = g2.trace();
  const cplx tr3 = (g2.array() * e.g.transpose().array()).sum();
  const cplx coef = e.z + s.gamma * s.gamma * e.m - s.tau;
  const double nn = static_cast<double>(n);
  return (coef * tr2 + tr3 / nn) / nn;
}

/// (1/N) sum_a (lambda gamma v_a - tau)^{-2} gamma^2, equal to 1 at the edge.
inline double sum_rule(const EdgeScaling& s) { return s.a[2] * s.gamma * s.gamma; }

/// Poisson kernel (1/pi) eta / (x^2 + eta^2).
inline double poisson_kernel(double x, double eta) { return eta / (std::numbers::pi * (x * x + eta * eta)); }

/// Smooth cutoff: 1 on (-inf, 1/9], 0 on [2/9, inf), C-infinity in between.
inline double smooth_cutoff(double x) {
  constexpr double a = 1.0 / 9.0, b = 2.0 / 9.0;
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double p = f((b - x) / (b - a)), q = f((x - a) / (b - a));
  return p / (p + q);
}

struct DosWindow {
  double smoothed;  // (N/pi) int_{E1}^{E2} Im m(y + i eta) dy
  int exact;        // #{mu in (E1, E2]}
};

/// Smoothed and exact eigenvalue counts of a window from the spectrum.
inline DosWindow dos_window(const std::vector<double>& mu, double e1, double e2, double eta) {
  if (!(e1 < e2)) throw InvalidArgument("dos_window: need E1 < E2");
  if (!(eta > 0.0)) throw DomainError("dos_window: eta must be positive");
  auto n_im_m = [&](double y) {
    double acc = 0.0;
    for (double x : mu) acc += eta / ((x - y) * (x - y) + eta * eta);
    return acc;
  };
  DosWindow w{};
  w.smoothed = adaptive_simpson(n_im_m, e1, e2, 1e-9, 200) / std::numbers::pi;
  for (double x : mu)
    if (x > e1 && x <= e2) ++w.exact;
  return w;
}

inline DosWindow dos_window(const Matrix& h, double e1, double e2, double eta) {
  return dos_window(eigenvalues(h), e1, e2, eta);
}

/// Scalar laws with known moments for the cumulant expansion check.
struct ScalarLaw {
  enum class Kind { Gaussian, Rademacher } kind;
  double scale;  // sigma for Gaussian, a for Rademacher (values +-a)

  /// E h^n.
  double moment(int n) const {
    if (n % 2) return 0.0;
    if (kind == Kind::Rademacher) return std::pow(scale, n);
    double df = 1.0;
    for (int k = n - 1; k > 1; k -= 2) df *= k;
    return df * std::pow(scale, n);
  }
};

/// Cumulants kappa_1..kappa_n from kappa_n = M_n - sum_{m<n} C(n-1, m-1) kappa_m M_{n-m}.
inline std::vector<double> cumulants(const ScalarLaw& law, int n) {
  std::vector<double> k(n + 1, 0.0);
  for (int j = 1; j <= n; ++j) {
    double acc = law.moment(j);
    double binom = 1.0;  // C(j-1, m-1)
    for (int m = 1; m < j; ++m) {
      acc -= binom * k[m] * law.moment(j - m);
      binom = binom * (j - m) / m;
    }
    k[j] = acc;
  }
  return k;
}

/// |E[Q'(h) h] - sum_{m=1}^{M} kappa_m / (m-1)! E[Q^(m)(h)]| for a polynomial
/// Q with coefficients q[0..5].
inline double cumulant_expansion_residual(const ScalarLaw& law, const std::vector<double>& q, int order) {
  if (q.size() > 6) throw InvalidArgument("cumulant_expansion_residual: degree must be at most 5");
  if (order < 1) throw InvalidArgument("cumulant_expansion_residual: order must be positive");
  const int deg = static_cast<int>(q.size()) - 1;
  auto falling = [](int j, int m) {
    double p = 1.0;
    for (int t = 0; t < m; ++t) p *= (j - t);
    return p;
  };
  // E[Q^(m)(h)] = sum_j q_j j!/(j-m)! E h^{j-m}
  auto deriv_mean = [&](int m) {
    double acc = 0.0;
    for (int j = m; j <= deg; ++j) acc += q[j] * falling(j, m) * law.moment(j - m);
    return acc;
  };
  double lhs = 0.0;
  for (int j = 1; j <= deg; ++j) lhs += q[j] * j * law.moment(j);
  const auto kap = cumulants(law, order);
  double rhs = 0.0, fact = 1.0;  // (m-1)!
  for (int m = 1; m <= order; ++m) {
    if (m > 1) fact *= (m - 1);
    rhs += kap[m] / fact * deriv_mean(m);
  }
  return std::abs(lhs - rhs);
}

}  // namespace dwedge
