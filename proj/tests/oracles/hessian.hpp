#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>

namespace oracle {

using cvec = Eigen::VectorXcd;

struct GrandPotential {
  double q, kappa, n_atoms, u0, eta, delta_c, mu;

  // Per-atom grand potential of plane-wave coefficients c_n, n = -J..J:
  // sum k^2 |c|^2 - eta^2/(kappa N) arctan((delta_c - N U0 F)/kappa) - mu sum |c|^2,
  // F = <cos^2 x> = sum (|c_n|^2 / 2 + Re(conj(c_n) c_{n+1}) / 2).
  double operator()(const cvec& c) const {
    const int dim = static_cast<int>(c.size());
    const int J = (dim - 1) / 2;
    double kin = 0, norm = 0, F = 0;
    for (int i = 0; i < dim; ++i) {
      const double k = q + 2.0 * (i - J);
      kin += k * k * std::norm(c[i]);
      norm += std::norm(c[i]);
      F += 0.5 * std::norm(c[i]);
      if (i + 1 < dim) F += 0.5 * std::real(std::conj(c[i]) * c[i + 1]);
    }
    return kin - eta * eta / (kappa * n_atoms) * std::atan((delta_c - n_atoms * u0 * F) / kappa) - mu * norm;
  }

  // d^2/de^2 G(a + e psi) at e = 0, central differences with one
  // Richardson step.
  double second_directional(const cvec& a, const cvec& psi, double h = 1e-2) const {
    auto d2 = [&](double s) { return ((*this)(a + s * psi) - 2.0 * (*this)(a) + (*this)(a - s * psi)) / (s * s); };
    return (4.0 * d2(h / 2) - d2(h)) / 3.0;
  }
};

}  // namespace oracle
