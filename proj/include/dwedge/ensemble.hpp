#pragma once

// Wigner, GOE and deformed ensembles H = lambda0 V + W, and their spectra.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "dwedge/errors.hpp"
#include "dwedge/measure.hpp"
#include "dwedge/rng.hpp"

namespace dwedge {

using Matrix = Eigen::MatrixXd;

enum class EntryLaw { Gaussian, Rademacher };

inline const char* to_string(EntryLaw l) { return l == EntryLaw::Gaussian ? "gaussian" : "rademacher"; }

struct IidPotential {
  Measure law;
};
struct FixedPotential {
  std::vector<double> values;
};
using Potential = std::variant<IidPotential, FixedPotential>;

/// Stream purposes; each random ingredient of sample i has its own stream.
namespace purpose {
inline constexpr const char* kPotential = "potential";
inline constexpr const char* kWigner = "wigner";
inline constexpr const char* kGoe = "goe";
inline constexpr const char* kFlow = "flow";
}  // namespace purpose

struct EnsembleSpec {
  int n = 100;
  double lambda0 = 0.0;
  Potential potential = IidPotential{Measure::two_atom()};
  EntryLaw law = EntryLaw::Gaussian;
  double c2 = 0.0;  // diagonal variance is (1 + c2) / N
  bool zero_diagonal = true;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 2) throw ConfigError("N", "must be at least 2");
    if (!(lambda0 >= 0.0) || !std::isfinite(lambda0)) throw ConfigError("lambda0", "must be finite and nonnegative");
    if (!(c2 >= -1.0)) throw ConfigError("c2", "must be at least -1");
    if (auto* f = std::get_if<FixedPotential>(&potential))
      if (static_cast<int>(f->values.size()) != n)
        throw ConfigError("potential.values", "length must equal N");
  }

  /// Canonical text form used for hashing.
  std::string canonical() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "N=%d;lambda0=%.17g;law=%s;c2=%.17g;zero_diagonal=%d;seed=%llu;", n, lambda0,
                  to_string(law), c2, zero_diagonal ? 1 : 0, static_cast<unsigned long long>(seed));
    std::string s = buf;
    if (auto* p = std::get_if<IidPotential>(&potential)) {
      s += "iid:";
      const Rule& r = p->law.rule();
      for (std::size_t k = 0; k < std::min<std::size_t>(r.size(), 64); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g;", r.nodes[k], r.weights[k]);
        s += buf;
      }
    } else {
      s += "fixed:";
      for (double v : std::get<FixedPotential>(potential).values) {
        std::snprintf(buf, sizeof buf, "%.17g;", v);
        s += buf;
      }
    }
    return s;
  }

  std::uint64_t hash() const { return fnv1a(canonical()); }
};

struct Spectrum {
  std::vector<double> eigenvalues;  // descending
  std::uint64_t spec_hash = 0;
  std::uint64_t sample_index = 0;
};

/// Symmetric Wigner matrix: off-diagonal variance 1/N, diagonal (1 + c2)/N
/// (zero when zero_diagonal). Entries are filled row by row over the upper
/// triangle, so a stream always produces the same matrix.
inline Matrix sample_wigner(int n, EntryLaw law, double c2, bool zero_diagonal, Rng& rng) {
  if (n < 2) throw InvalidArgument("sample_wigner: N must be at least 2");
  if (!(c2 >= -1.0)) throw InvalidArgument("sample_wigner: c2 must be at least -1");
  Matrix h(n, n);
  const double s_off = 1.0 / std::sqrt(static_cast<double>(n));
  const double s_diag = std::sqrt((1.0 + c2) / n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double x = law == EntryLaw::Gaussian ? rng.normal() : rng.sign();
      if (i == j) {
        h(i, i) = zero_diagonal ? 0.0 : s_diag * x;
      } else {
        h(i, j) = h(j, i) = s_off * x;
      }
    }
  }
  return h;
}

/// GOE-type Gaussian matrix with off-diagonal variance 1/N and zero diagonal.
inline Matrix sample_goe_zero_diagonal(int n, Rng& rng) {
  return sample_wigner(n, EntryLaw::Gaussian, 0.0, true, rng);
}

/// Potential values for sample `index`.
inline std::vector<double> sample_potential(const EnsembleSpec& spec, std::uint64_t index) {
  if (auto* f = std::get_if<FixedPotential>(&spec.potential)) return f->values;
  auto rng = make_stream(spec.seed, purpose::kPotential, index);
  return sample(std::get<IidPotential>(spec.potential).law, static_cast<std::size_t>(spec.n), rng);
}

struct DeformedSample {
  Matrix h;
  std::vector<double> v;
};

/// H = lambda0 V + W for sample `index`.
inline DeformedSample sample_deformed(const EnsembleSpec& spec, std::uint64_t index) {
  spec.validate();
  DeformedSample out;
  out.v = sample_potential(spec, index);
  auto rng = make_stream(spec.seed, purpose::kWigner, index);
  out.h = sample_wigner(spec.n, spec.law, spec.c2, spec.zero_diagonal, rng);
  for (int i = 0; i < spec.n; ++i) out.h(i, i) += spec.lambda0 * out.v[i];
  return out;
}

/// Largest |H - H^T| entry.
inline double asymmetry(const Matrix& h) { return (h - h.transpose()).cwiseAbs().maxCoeff(); }

/// Full spectrum in descending order.
inline std::vector<double> eigenvalues(const Matrix& h) {
  if (h.rows() != h.cols()) throw InvalidArgument("eigenvalues: matrix is not square");
  if (h.rows() == 0) return {};
  if (asymmetry(h) > 1e-12) throw InvalidArgument("eigenvalues: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw IterationError("eigenvalues: QR iteration did not converge", 0.0);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::reverse(ev.begin(), ev.end());
  return ev;
}

inline Spectrum spectrum(const EnsembleSpec& spec, std::uint64_t index) {
  return {eigenvalues(sample_deformed(spec, index).h), spec.hash(), index};
}

/// One draw of lambda0 e^{-t/2} V + e^{-t/2} W + sqrt(1 - e^{-t}) W_goe with
/// W_goe independent and zero on the diagonal.
inline Matrix sample_interpolated(const EnsembleSpec& spec, double t, std::uint64_t index) {
  if (!(t >= 0.0)) throw InvalidArgument("sample_interpolated: t must be nonnegative");
  DeformedSample d = sample_deformed(spec, index);
  auto rng = make_stream(spec.seed, purpose::kGoe, index);
  const Matrix g = sample_goe_zero_diagonal(spec.n, rng);
  const double a = std::exp(-0.5 * t);
  const double b = std::sqrt(-std::expm1(-t));
  return a * d.h + b * g;
}

}  // namespace dwedge
