#pragma once

// Edge statistics: classical locations and rigidity, the Monte Carlo harness
// for the rescaled top eigenvalues, and the small-coupling regime test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "dwedge/edgescale.hpp"
#include "dwedge/ensemble.hpp"
#include "dwedge/errors.hpp"
#include "dwedge/freeconv.hpp"
#include "dwedge/gof.hpp"
#include "dwedge/limit_law.hpp"
#include "dwedge/parallel.hpp"

namespace dwedge {

// ---------------------------------------------------------------------------
// Classical locations

/// gamma_k with int_{gamma_k}^inf rho = (k - 1/2) / N, from a solution whose
/// grid spans the support. Cumulative trapezoid from the top, normalized by
/// the total mass, inverted linearly.
inline std::vector<double> classical_locations(const FreeConvolutionSolution& sol, int n, const std::vector<int>& ks) {
  check_single_interval(sol.nu, sol.lambda);
  if (n < 1) throw InvalidArgument("classical_locations: N must be positive");
  std::vector<double> x{sol.e_minus}, rho{0.0};
  for (std::size_t j = 0; j < sol.energies.size(); ++j) {
    const double e = sol.energies[j];
    if (e <= sol.e_minus || e >= sol.e_plus) continue;
    x.push_back(e);
    rho.push_back(std::max(0.0, sol.density[j]));
  }
  x.push_back(sol.e_plus);
  rho.push_back(0.0);
  if (x.size() < 3) throw InvalidArgument("classical_locations: grid does not cover the support");
  const std::size_t m = x.size();
  std::vector<double> tail(m, 0.0);  // int_{x_j}^{E+}
  for (std::size_t j = m - 1; j-- > 0;) tail[j] = tail[j + 1] + 0.5 * (rho[j] + rho[j + 1]) * (x[j + 1] - x[j]);
  const double total = tail[0];
  std::vector<double> out;
  out.reserve(ks.size());
  for (int k : ks) {
    if (k < 1 || k > n) throw InvalidArgument("classical_locations: k must lie in 1..N");
    const double t = (k - 0.5) / n * total;
    // tail is nonincreasing in j; find the last j with tail[j] >= t.
    std::size_t lo = 0, hi = m - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (tail[mid] >= t ? lo : hi) = mid;
    }
    const double span = tail[lo] - tail[hi];
    const double u = span > 0.0 ? (tail[lo] - t) / span : 0.0;
    out.push_back(x[lo] + u * (x[hi] - x[lo]));
  }
  return out;
}

/// Solves on a grid clustered at both edges (E = c + h cos theta) and
/// returns the classical locations.
inline std::vector<double> classical_locations(const Measure& nu, double lambda, double gamma, int n,
                                               const std::vector<int>& ks, int grid_points = 4001) {
  check_single_interval(nu, lambda);
  const EdgeRoots r = outer_edges(nu, lambda);
  const double lo = gamma * r.e_minus, hi = gamma * r.e_plus;
  const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  std::vector<double> es;
  es.reserve(grid_points);
  for (int j = 1; j + 1 < grid_points; ++j) es.push_back(c - h * std::cos(std::numbers::pi * j / (grid_points - 1)));
  return classical_locations(solve_on(nu, lambda, gamma, std::move(es), kDensityEta), n, ks);
}

// ---------------------------------------------------------------------------
// Rigidity

struct RigidityRow {
  int k;
  double median;
  double p95;
};

struct RigidityReport {
  int n = 0;
  int n_samples = 0;
  std::vector<RigidityRow> rows;
  double threshold = 0.0;  // N^0.2
  bool flagged = false;    // some p95 above threshold
};

inline double quantile(std::vector<double> x, double p) {
  if (x.empty()) throw InvalidArgument("quantile: empty input");
  std::sort(x.begin(), x.end());
  const double pos = p * (x.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= x.size()) return x.back();
  return x[i] + (pos - i) * (x[i + 1] - x[i]);
}

/// N^{2/3} khat^{1/3} |gamma mu_k - gamma_k| for k <= k_max, with khat =
/// min(k, N + 1 - k), the rescaling built from each sample's own potential
/// and gamma_k from the rescaled law.
inline RigidityReport rigidity_report(const EnsembleSpec& spec, int n_samples, int k_max,
                                      int workers = default_workers()) {
  spec.validate();
  if (k_max < 1 || 2 * k_max > spec.n) throw InvalidArgument("rigidity_report: need 1 <= k_max <= N/2");
  if (n_samples < 1) throw InvalidArgument("rigidity_report: need at least one sample");
  std::vector<int> ks(k_max);
  for (int k = 0; k < k_max; ++k) ks[k] = k + 1;
  const bool shared = spec.lambda0 == 0.0 || std::holds_alternative<FixedPotential>(spec.potential);
  struct Reference {
    double gamma;
    std::vector<double> loc;
  };
  auto reference = [&](const std::vector<double>& v) {
    const Measure nu = empirical_from_values(v);
    const EdgeScaling s = build(nu, spec.lambda0);
    return Reference{s.gamma, classical_locations(nu, spec.lambda0, s.gamma, spec.n, ks)};
  };
  Reference common{};
  if (shared) common = reference(sample_potential(spec, 0));
  std::vector<std::vector<double>> stat(k_max, std::vector<double>(n_samples));
  const double n23 = std::pow(static_cast<double>(spec.n), 2.0 / 3.0);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    const DeformedSample d = sample_deformed(spec, i);
    const Reference ref = shared ? common : reference(d.v);
    const auto mu = eigenvalues(d.h);
    for (int k = 1; k <= k_max; ++k) {
      const double khat = std::min(k, spec.n + 1 - k);
      stat[k - 1][i] = n23 * std::cbrt(khat) * std::abs(ref.gamma * mu[k - 1] - ref.loc[k - 1]);
    }
  });
  RigidityReport r;
  r.n = spec.n;
  r.n_samples = n_samples;
  r.threshold = std::pow(static_cast<double>(spec.n), 0.2);
  for (int k = 1; k <= k_max; ++k) {
    RigidityRow row{k, quantile(stat[k - 1], 0.5), quantile(stat[k - 1], 0.95)};
    r.flagged = r.flagged || row.p95 > r.threshold;
    r.rows.push_back(row);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo edge harness

struct MCRunResult {
  EnsembleSpec spec;
  int n_samples = 0;
  int top_k = 1;
  std::vector<double> samples;      // gamma0 N^{2/3} (mu_1 - E+), per sample
  std::vector<double> samples_top;  // row-major n_samples x top_k, same scaling for mu_j
  std::vector<double> e_plus;       // per-sample E+ of the drawn potential
  std::vector<double> gamma;        // per-sample gamma0
  double ks = 0.0;                  // to F1
  double runtime = 0.0;             // seconds
};

/// Rescaled top eigenvalues, with (gamma0, E+) rebuilt from each sample's own
/// potential. Sample i uses only streams of index i.
inline MCRunResult mc_edge(const EnsembleSpec& spec, int n_samples, int top_k = 1, int workers = default_workers()) {
  spec.validate();
  if (n_samples < 1) throw InvalidArgument("mc_edge: need at least one sample");
  if (top_k < 1 || top_k > spec.n) throw InvalidArgument("mc_edge: top_k must lie in 1..N");
  const auto t0 = std::chrono::steady_clock::now();
  MCRunResult r;
  r.spec = spec;
  r.n_samples = n_samples;
  r.top_k = top_k;
  r.samples.resize(n_samples);
  r.samples_top.resize(static_cast<std::size_t>(n_samples) * top_k);
  r.e_plus.resize(n_samples);
  r.gamma.resize(n_samples);
  const double n23 = std::pow(static_cast<double>(spec.n), 2.0 / 3.0);
  parallel_for(n_samples, workers, [&](std::size_t i) {
    const DeformedSample d = sample_deformed(spec, i);
    const EdgeScaling s = build(empirical_from_values(d.v), spec.lambda0);
    const auto mu = eigenvalues(d.h);
    for (int j = 0; j < top_k; ++j) r.samples_top[i * top_k + j] = s.gamma * n23 * (mu[j] - s.e_plus);
    r.samples[i] = r.samples_top[i * top_k];
    r.e_plus[i] = s.e_plus;
    r.gamma[i] = s.gamma;
  });
  r.ks = ks_statistic(r.samples, [](double x) { return tw_cdf(1, x); });
  r.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Regime test for lambda0 = sigma0 N^{-delta}

enum class Regime { TracyWidom, Mixed, Gaussian };

inline constexpr double kCriticalDelta = 1.0 / 6.0;
inline constexpr double kCriticalDeltaTol = 1e-3;

inline Regime regime_of(double delta) {
  if (std::abs(delta - kCriticalDelta) <= kCriticalDeltaTol) return Regime::Mixed;
  return delta > kCriticalDelta ? Regime::TracyWidom : Regime::Gaussian;
}

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::TracyWidom: return "tracy_widom";
    case Regime::Mixed: return "mixed";
    case Regime::Gaussian: return "gaussian";
  }
  return "";
}

struct LawFit {
  std::string law;
  double ks;  // NaN when the normalization is undefined (lambda0 = 0)
};

struct RegimeVerdict {
  int n = 0;
  double lambda0 = 0.0;
  double e_plus = 0.0;        // population edge
  double sigma2_gauss = 0.0;  // lambda0^-2 (1 - m_fc(E+)^2)
  double sigma2_conv = 0.0;   // sigma0^2 m2(nu)
  Regime regime = Regime::TracyWidom;
  LawFit fit;                       // the regime's own law
  std::vector<LawFit> alternatives;  // the other two laws
  std::vector<double> samples;      // the regime's normalized statistic
};

struct RegimeOptions {
  EntryLaw law = EntryLaw::Gaussian;
  double c2 = 0.0;
  bool zero_diagonal = true;
  std::uint64_t seed = 0;
  int workers = default_workers();
};

/// For each N: lambda0 = sigma0 N^{-delta}, top eigenvalues of lambda0 V + W
/// with V iid from nu, normalized around the population E+ as
///   N^{2/3} (mu_1 - E+)             for F1 and F1 * Phi(sigma0^2 m2),
///   N^{1/2} lambda0^{-1} (mu_1 - E+) for Phi(lambda0^-2 (1 - m_fc(E+)^2)).
inline std::vector<RegimeVerdict> regime_test(const Measure& nu, double sigma0, double delta,
                                              const std::vector<int>& ns, int n_samples,
                                              const RegimeOptions& opt = {}) {
  if (!(delta >= 0.0)) throw InvalidArgument("regime_test: delta must be nonnegative");
  if (!(sigma0 >= 0.0)) throw InvalidArgument("regime_test: sigma0 must be nonnegative");
  const Regime regime = regime_of(delta);
  const double m2 = central_moment(nu, 2);
  std::vector<RegimeVerdict> out;
  for (int n : ns) {
    RegimeVerdict v;
    v.n = n;
    v.regime = regime;
    v.lambda0 = sigma0 * std::pow(static_cast<double>(n), -delta);
    v.e_plus = support_endpoints(nu, v.lambda0).second;
    const double m_fc = v.lambda0 > 0.0 ? edge_moment(nu, v.lambda0, outer_edges(nu, v.lambda0).theta_plus, 1) : -1.0;
    v.sigma2_gauss = v.lambda0 > 0.0 ? (1.0 - m_fc * m_fc) / (v.lambda0 * v.lambda0) : 0.0;
    v.sigma2_conv = sigma0 * sigma0 * m2;

    EnsembleSpec spec;
    spec.n = n;
    spec.lambda0 = v.lambda0;
    spec.potential = IidPotential{nu};
    spec.law = opt.law;
    spec.c2 = opt.c2;
    spec.zero_diagonal = opt.zero_diagonal;
    spec.seed = opt.seed;
    spec.validate();
    std::vector<double> top(n_samples);
    parallel_for(n_samples, opt.workers, [&](std::size_t i) { top[i] = eigenvalues(sample_deformed(spec, i).h).front(); });

    const double dn = static_cast<double>(n);
    std::vector<double> edge(n_samples), bulk(n_samples);
    for (int i = 0; i < n_samples; ++i) {
      edge[i] = std::pow(dn, 2.0 / 3.0) * (top[i] - v.e_plus);
      bulk[i] = v.lambda0 > 0.0 ? std::sqrt(dn) / v.lambda0 * (top[i] - v.e_plus) : 0.0;
    }
    auto fit = [&](const LimitLaw& law, bool gaussian_scaling) -> LawFit {
      if (gaussian_scaling && !(v.lambda0 > 0.0)) return {law.name(), std::nan("")};
      return {law.name(), ks_statistic(gaussian_scaling ? bulk : edge, [&](double s) { return law.cdf(s); })};
    };
    const LawFit f_tw = fit(LimitLaw::tw1(), false);
    const LawFit f_conv = fit(LimitLaw::tw1_gauss_conv(v.sigma2_conv), false);
    const LawFit f_gauss = fit(LimitLaw::gaussian(v.sigma2_gauss), true);
    switch (regime) {
      case Regime::TracyWidom:
        v.fit = f_tw;
        v.alternatives = {f_conv, f_gauss};
        v.samples = edge;
        break;
      case Regime::Mixed:
        v.fit = f_conv;
        v.alternatives = {f_tw, f_gauss};
        v.samples = edge;
        break;
      case Regime::Gaussian:
        v.fit = f_gauss;
        v.alternatives = {f_tw, f_conv};
        v.samples = bulk;
        break;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace dwedge
