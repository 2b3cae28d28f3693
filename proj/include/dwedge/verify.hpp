#pragma once

// Randomized verification suites over the resolvent diagnostics: exact
// identities, edge local-law bounds, and decay of the optical residual.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dwedge/edgescale.hpp"
#include "dwedge/ensemble.hpp"
#include "dwedge/parallel.hpp"
#include "dwedge/resolvent.hpp"
#include "dwedge/twstats.hpp"

namespace dwedge {

struct IdentitySuite {
  int instances = 0;
  double schur = 0, basic = 0, onesided = 0, twosided = 0;  // maxima
  double ward = 0;
  double green = 0;
  double tolerance = 1e-9;
  double max() const { return std::max({schur, basic, onesided, twosided, ward}); }
  bool pass() const { return max() < tolerance && green < 1e-8; }
};

/// Random symmetric H (N in [8, 40], Wigner entries plus a random diagonal),
/// z with Re z in [-3, 3] and Im z in [0.05, 1], random distinct i, j, k.
inline IdentitySuite run_identity_suite(std::uint64_t seed, int instances = 100) {
  IdentitySuite r;
  r.instances = instances;
  for (int t = 0; t < instances; ++t) {
    Rng rng = make_stream(seed, "verify-identities", t);
    const int n = 8 + static_cast<int>(rng.uniform() * 33);
    Matrix h = sample_wigner(n, EntryLaw::Gaussian, 0.0, false, rng);
    for (int i = 0; i < n; ++i) h(i, i) += rng.uniform() - 0.5;
    const cplx z(6.0 * rng.uniform() - 3.0, 0.05 + 0.95 * rng.uniform());
    const int i = static_cast<int>(rng.uniform() * n);
    int j, k;
    do j = static_cast<int>(rng.uniform() * n); while (j == i);
    do k = static_cast<int>(rng.uniform() * n); while (k == i || k == j);
    const IdentityResiduals res = verify_identities(h, z, i, j, k);
    r.schur = std::max(r.schur, res.schur);
    r.basic = std::max(r.basic, res.basic);
    r.onesided = std::max(r.onesided, res.onesided);
    r.twosided = std::max(r.twosided, res.twosided);
    const GreenEvaluation e = green(h, z);
    r.ward = std::max(r.ward, ward_residual(e));
    r.green = std::max(r.green, green_residual(h, e));
  }
  return r;
}

struct LocalLawRow {
  double lambda0;
  double p95_m, p95_offdiag, p95_diag;
};

struct LocalLawSuite {
  int n = 0;
  int seeds = 0;
  double bound = 0.0;  // N^0.1
  std::vector<LocalLawRow> rows;
  bool pass() const {
    for (const auto& r : rows)
      if (!(r.p95_m < bound && r.p95_offdiag < bound && r.p95_diag < bound)) return false;
    return !rows.empty();
  }
};

/// Residuals at z = L+ + i N^{-2/3} for two-atom potentials, rescaling from
/// each sample's own potential; 95th percentiles over seeds.
inline LocalLawSuite run_local_law_suite(int n, int seeds, const std::vector<double>& lambdas, std::uint64_t seed,
                                         int workers = default_workers()) {
  LocalLawSuite out;
  out.n = n;
  out.seeds = seeds;
  out.bound = std::pow(static_cast<double>(n), 0.1);
  for (double l0 : lambdas) {
    EnsembleSpec spec;
    spec.n = n;
    spec.lambda0 = l0;
    spec.seed = seed;
    std::vector<double> rm(seeds), ro(seeds), rd(seeds);
    parallel_for(seeds, workers, [&](std::size_t i) {
      const DeformedSample d = sample_deformed(spec, i);
      const EdgeScaling s = build(empirical_from_values(d.v), l0);
      const auto r = local_law_residuals(s.gamma * d.h, d.v, s, cplx(s.l_plus, std::pow(n, -2.0 / 3.0)));
      rm[i] = r.r_m;
      ro[i] = r.r_offdiag;
      rd[i] = r.r_diag;
    });
    out.rows.push_back({l0, quantile(rm, 0.95), quantile(ro, 0.95), quantile(rd, 0.95)});
  }
  return out;
}

struct OpticalSuite {
  std::vector<int> ns;
  std::vector<double> medians;  // median |residual| per N
  double slope = 0.0;           // least-squares slope of log median on log N
  double target = -1.0 / 3.0;
  double slope_tol = 0.15;
  bool decreasing = false;      // medians strictly decrease in N
  bool pass() const { return std::abs(slope - target) <= slope_tol; }
};

/// Row-averaged optical residual of the rescaled matrix at
/// z = L+ + i N^{-2/3-eps}, scaling from each sample's potential.
inline OpticalSuite run_optical_suite(const std::vector<int>& ns, int seeds, double lambda0, std::uint64_t seed,
                                      double eps = 0.05, int workers = default_workers()) {
  OpticalSuite out;
  out.ns = ns;
  for (int n : ns) {
    EnsembleSpec spec;
    spec.n = n;
    spec.lambda0 = lambda0;
    spec.seed = seed;
    std::vector<double> mag(seeds);
    parallel_for(seeds, workers, [&](std::size_t i) {
      const DeformedSample d = sample_deformed(spec, i);
      const EdgeScaling s = build(empirical_from_values(d.v), lambda0);
      auto mu = eigenvalues(d.h);
      for (double& x : mu) x *= s.gamma;
      mag[i] = std::abs(optical_residual_spectral(mu, s, cplx(s.l_plus, std::pow(n, -2.0 / 3.0 - eps))));
    });
    out.medians.push_back(quantile(mag, 0.5));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double k = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double x = std::log(static_cast<double>(ns[i])), y = std::log(out.medians[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  out.slope = ns.size() > 1 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : 0.0;
  out.decreasing = true;
  for (std::size_t i = 1; i < out.medians.size(); ++i) out.decreasing = out.decreasing && out.medians[i] < out.medians[i - 1];
  return out;
}

}  // namespace dwedge
