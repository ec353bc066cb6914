#pragma once

#include <cmath>
#include <stdexcept>

namespace oracle {

// Characteristic value a0(qm) of y'' + (a - 2 qm cos 2z) y = 0 from the
// continued fraction a = 2qm^2 / (a - 4 - qm^2 / (a - 16 - ...)).
inline double mathieu_a0(double qm, int depth = 60) {
  if (qm == 0) return 0.0;
  const double q2 = qm * qm;
  auto F = [&](double a) {
    double t = 0.0;
    for (int r = depth; r >= 2; --r) t = q2 / (a - 4.0 * r * r - t);
    return a - 2.0 * q2 / (a - 4.0 - t);
  };
  // F rises through the root and drops through its poles: take the first
  // upward crossing above a lower bound on a0.
  double lo = -2.0 * std::abs(qm) - 2.0;
  while (F(lo) > 0) lo *= 2;
  const double step = 1e-3 * (1.0 + std::abs(qm));
  double hi = lo;
  for (;;) {
    hi += step;
    if (hi > 1.0) throw std::runtime_error("mathieu bracket");
    if (F(hi) > 0) break;
    lo = hi;
  }
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (lo + hi);
    (F(m) > 0 ? hi : lo) = m;
  }
  return 0.5 * (lo + hi);
}

// Ground chemical potential at q = 0 for -d^2/dx^2 + v cos^2 x:
// with z = x this is a = mu - v/2, qm = -v/4.
inline double mathieu_ground_mu(double v) { return mathieu_a0(-v / 4.0) + v / 2.0; }

}  // namespace oracle
