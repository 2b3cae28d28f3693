// Edge of the deformed semicircle law for a two-atom potential: support,
// rescaling constants and the square-root profile of the rescaled density.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "dwedge/edgescale.hpp"
#include "dwedge/freeconv.hpp"

using namespace dwedge;

int main() {
  const Measure nu = Measure::two_atom();
  std::printf("%6s %10s %10s %10s %10s %12s %10s\n", "lambda", "E-", "E+", "zeta", "gamma", "expansion", "amp*pi");
  for (double l : {0.0, 0.1, 0.3, 0.5, 0.8}) {
    const auto [lo, hi] = support_endpoints(nu, l);
    const EdgeScaling s = build(nu, l);
    std::vector<double> es;
    for (int k = 0; k < 400; ++k) es.push_back(s.l_plus - 0.012 * (1.0 - k / 400.0));
    const auto fit = edge_exponent_fit(solve_on(nu, l, s.gamma, es, 1e-6));
    std::printf("%6.2f %10.6f %10.6f %10.6f %10.6f %12.6f %10.4f\n", l, lo, hi, s.zeta, s.gamma, asymptotic_eplus(nu, l),
                fit.amplitude * std::numbers::pi);
  }
  // Past sqrt(inf int dnu/(v-x)^2) = 1 the support splits.
  try {
    build(nu, 1.5);
  } catch (const AssumptionViolated& e) {
    std::printf("lambda 1.5: %s\n", e.what());
  }
}
