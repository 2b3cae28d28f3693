// One trajectory of the matrix Ornstein-Uhlenbeck flow: rescaled top
// eigenvalue and m at the moving edge as the potential decays.

#include <cmath>
#include <cstdio>

#include "dwedge/dbm.hpp"

using namespace dwedge;

int main() {
  EnsembleSpec spec;
  spec.n = 300;
  spec.lambda0 = 0.8;
  spec.seed = 99;
  std::vector<double> times;
  const double t_end = 4.0 * std::log(static_cast<double>(spec.n));
  for (int k = 0; k <= 12; ++k) times.push_back(t_end * k / 12.0);

  std::printf("%8s %10s %12s %12s %12s\n", "t", "lambda", "edge", "Re m", "Im m");
  for (const TrackPoint& p : flow_edge_track(spec, times, 0.0, 0))
    std::printf("%8.3f %10.5f %12.5f %12.6f %12.6f\n", p.t, p.lambda, p.edge, p.m.real(), p.m.imag());
}
