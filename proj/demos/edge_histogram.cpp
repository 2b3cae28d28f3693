// Rescaled top eigenvalue of lambda0 V + W against the Tracy-Widom density.
// usage: edge_histogram [N] [samples] [lambda0]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "dwedge/twstats.hpp"

using namespace dwedge;

int main(int argc, char** argv) {
  EnsembleSpec spec;
  spec.n = argc > 1 ? std::atoi(argv[1]) : 200;
  const int samples = argc > 2 ? std::atoi(argv[2]) : 500;
  spec.lambda0 = argc > 3 ? std::atof(argv[3]) : 0.5;
  spec.zero_diagonal = false;
  spec.c2 = 1.0;
  spec.seed = 2026;

  const MCRunResult r = mc_edge(spec, samples);
  constexpr double lo = -5.0, hi = 2.0, w = 0.5;
  std::vector<int> counts(static_cast<std::size_t>((hi - lo) / w), 0);
  for (double x : r.samples)
    if (x >= lo && x < hi) ++counts[static_cast<std::size_t>((x - lo) / w)];
  std::printf("N=%d samples=%d lambda0=%.2f  KS to F1 = %.4f\n\n", spec.n, samples, spec.lambda0, r.ks);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    const double a = lo + b * w;
    const double expect = (tw_cdf(1, a + w) - tw_cdf(1, a)) * samples;
    std::printf("[%5.1f,%5.1f) %4d %7.1f  %s\n", a, a + w, counts[b], expect, std::string(counts[b] * 60 / samples, '#').c_str());
  }
}
