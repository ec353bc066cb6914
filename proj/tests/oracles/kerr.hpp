#pragma once

#include <cmath>

namespace oracle {

// Shallow lattice at q = 0, f = 1/2 - v/16, so with D = delta_c - N U0 f
// the state function v kappa^2 + v D^2 - eta^2 U0 is a cubic in v (a Kerr
// medium). Its triple root gives the critical point in closed form.
struct KerrCritical {
  double delta_0;
  double n_0;
  double eta_0;
};

inline KerrCritical kerr_critical(double kappa, double n_atoms, double u0) {
  const double nu0 = n_atoms * u0;
  const double s3 = std::sqrt(3.0);
  KerrCritical k;
  k.delta_0 = nu0 / 2.0 - s3 * kappa;
  k.n_0 = 32.0 * kappa / (s3 * nu0 * u0);
  k.eta_0 = std::sqrt(128.0 * kappa * kappa * kappa / (3.0 * s3 * n_atoms * u0 * u0));
  return k;
}

}  // namespace oracle
