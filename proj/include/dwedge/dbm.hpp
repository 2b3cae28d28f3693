#pragma once

// Ornstein-Uhlenbeck matrix flow dh_ij = db_ij / sqrt(N) - h_ij dt / 2 with no
// Brownian term on the diagonal. Steps use the exact transition, so any time
// can be reached in one jump.

#include <cmath>
#include <cstdint>
#include <vector>

#include "dwedge/edgescale.hpp"
#include "dwedge/ensemble.hpp"
#include "dwedge/errors.hpp"
#include "dwedge/gof.hpp"
#include "dwedge/parallel.hpp"
#include "dwedge/resolvent.hpp"
#include "dwedge/rng.hpp"

namespace dwedge {

struct FlowState {
  double t = 0.0;
  Matrix h;
  EnsembleSpec spec;
  std::vector<double> v;  // potential of the initial matrix
  Rng rng;
};

/// Initial state for trajectory `index`: H(0) = sample_deformed(spec, index),
/// noise from the "flow" stream of the same index.
inline FlowState make_flow_state(const EnsembleSpec& spec, std::uint64_t index) {
  DeformedSample d = sample_deformed(spec, index);
  return {0.0, std::move(d.h), spec, std::move(d.v), make_stream(spec.seed, purpose::kFlow, index)};
}

struct OuStep {
  double decay;  // e^{-dt/2}
  double noise;  // sqrt((1 - e^{-dt}) / N)
};

inline OuStep ou_step(double dt, int n) {
  return {std::exp(-0.5 * dt), std::sqrt(-std::expm1(-dt) / n)};
}

/// Applies one exact step with caller-supplied standard normals; only the
/// strict upper triangle of `xi` is read.
inline void advance_with_noise(FlowState& s, double dt, const Matrix& xi) {
  if (!(dt > 0.0)) throw InvalidArgument("evolve: dt must be positive");
  const int n = static_cast<int>(s.h.rows());
  const OuStep c = ou_step(dt, n);
  for (int i = 0; i < n; ++i) {
    s.h(i, i) *= c.decay;
    for (int j = i + 1; j < n; ++j) {
      const double x = c.decay * s.h(i, j) + c.noise * xi(i, j);
      s.h(i, j) = s.h(j, i) = x;
    }
  }
  s.t += dt;
}

/// Draws the step noise from the state's stream, row by row over the upper
/// triangle.
inline void advance(FlowState& s, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("evolve: dt must be positive");
  const int n = static_cast<int>(s.h.rows());
  Matrix xi = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) xi(i, j) = s.rng.normal();
  advance_with_noise(s, dt, xi);
}

inline FlowState evolve(FlowState s, double dt) {
  advance(s, dt);
  return s;
}

inline constexpr double kFlowEpsilon = 0.01;

struct TrackOptions {
  bool edge = true;        // N^{2/3} (gamma mu_1 - L+) per requested time
  bool stieltjes = true;   // m of gamma(t) H(t) at z(t), through green()
  double epsilon = kFlowEpsilon;
};

struct TrackPoint {
  double t;
  cplx z;
  cplx m;
  double edge;
  double lambda;  // lambda0 e^{-t/2}
};

/// One trajectory evaluated at the requested times. The rescaling uses the
/// empirical law of the trajectory's own potential.
inline std::vector<TrackPoint> flow_edge_track(const EnsembleSpec& spec, const std::vector<double>& times, double y,
                                               std::uint64_t index, const TrackOptions& opt = {}) {
  spec.validate();
  const double n = spec.n;
  if (std::abs(y) > std::pow(n, -2.0 / 3.0 + opt.epsilon))
    throw InvalidArgument("flow_edge_track: |y| exceeds N^{-2/3+eps}");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) throw InvalidArgument("flow_edge_track: times must be nonnegative");
    if (k > 0 && !(times[k] > times[k - 1])) throw InvalidArgument("flow_edge_track: times must increase");
  }
  FlowState s = make_flow_state(spec, index);
  const Measure nu_hat = empirical_from_values(s.v);
  const double eta = std::pow(n, -2.0 / 3.0 - opt.epsilon);
  std::vector<TrackPoint> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t > s.t) advance(s, t - s.t);
    const EdgeScaling sc = flow_scaling(nu_hat, spec.lambda0, t);
    TrackPoint p{t, cplx(sc.l_plus + y, eta), cplx(0.0, 0.0), 0.0, sc.lambda};
    const Matrix hr = sc.gamma * s.h;
    if (opt.stieltjes) p.m = green(hr, p.z).m;
    if (opt.edge) p.edge = std::pow(n, 2.0 / 3.0) * (eigenvalues(hr).front() - sc.l_plus);
    out.push_back(p);
  }
  return out;
}

struct InvarianceCheck {
  double ks;
  double band;  // 1.36 sqrt(2/n) + 0.02
  bool pass() const { return ks < band; }
};

/// Largest eigenvalues of zero-diagonal GOE matrices at time 0 (samples
/// [0, n)) against independent ones evolved to time t (samples [n, 2n)).
inline InvarianceCheck goe_invariance_check(int n_dim, double t, int n_samples, std::uint64_t seed,
                                            int workers = default_workers()) {
  if (n_samples < 1) throw InvalidArgument("goe_invariance_check: need at least one sample");
  if (!(t >= 0.0)) throw InvalidArgument("goe_invariance_check: t must be nonnegative");
  std::vector<double> a(n_samples), b(n_samples);
  parallel_for(2 * static_cast<std::size_t>(n_samples), workers, [&](std::size_t i) {
    auto rng = make_stream(seed, purpose::kGoe, i);
    FlowState s{0.0, sample_goe_zero_diagonal(n_dim, rng), EnsembleSpec{}, {}, make_stream(seed, purpose::kFlow, i)};
    const bool late = i >= static_cast<std::size_t>(n_samples);
    if (late && t > 0.0) advance(s, t);
    (late ? b[i - n_samples] : a[i]) = eigenvalues(s.h).front();
  });
  return {ks_two_sample(a, b), 1.36 * std::sqrt(2.0 / n_samples) + 0.02};
}

}  // namespace dwedge
