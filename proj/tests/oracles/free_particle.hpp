#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

// Lowest free kinetic energy at quasi-momentum q: min_n (q + 2n)^2.
inline double free_band_energy(double q, int nmax = 50) {
  double best = std::numeric_limits<double>::infinity();
  for (int n = -nmax; n <= nmax; ++n) best = std::min(best, (q + 2.0 * n) * (q + 2.0 * n));
  return best;
}

}  // namespace oracle
