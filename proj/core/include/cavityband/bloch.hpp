#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>

#include "cavityband/model.hpp"
#include "cavityband/richardson.hpp"

namespace cavityband {

// Plane-wave representation of -(d/dx + iq)^2 + v cos^2 x on n = -R..R.
Eigen::MatrixXd build_hamiltonian(double q, double v, int R);

// Periodic part of psi_q as real Fourier coefficients a_n, n = -R..R
// (coeffs[n + R]).
struct BlochState {
  double q = 0;
  int band = 0;
  double v = 0;
  Eigen::VectorXd coeffs;
  double mu = 0;
  int truncation = 0;

  double coeff(int n) const {
    return (n < -truncation || n > truncation) ? 0.0 : coeffs[n + truncation];
  }
};

inline constexpr int default_truncation = 16;
inline constexpr int max_truncation = 256;

// Lowest (band+1)-th eigenpair, R doubled from R0 until mu is converged.
BlochState solve_bloch(double q, double v, int band = 0, int R0 = default_truncation);

// Full spectrum of build_hamiltonian(q, v, R), ascending; vectors in columns
// when requested.
struct BlochSpectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
BlochSpectrum bloch_spectrum(double q, double v, int R, bool vectors = true);

// Same at a fixed truncation, no convergence loop.
BlochState solve_bloch_fixed(double q, double v, int band, int R);

// <cos^2 x> in the state: 1/2 + (1/2) sum_n a_n a_{n+1}.
double overlap_f(const BlochState& s);

// f(v, q) for the given band.
double overlap_value(double q, double v, int band = 0);

// df/dv from second-order perturbation theory over the full spectrum.
double overlap_slope(double q, double v, int band = 0);

using OverlapDerivatives = DerivativeTower;

// f and its v-derivatives up to `order` (<= 4) with error estimates.
OverlapDerivatives overlap_derivatives(double q, double v, int band, int order);

// The overlap f as a function of depth. Steady-state, bistability and
// catastrophe code only talks to this interface so the physical Bloch
// overlap can be swapped for simple closed forms.
class OverlapModel {
 public:
  virtual ~OverlapModel() = default;
  virtual double f(double v) const = 0;
  virtual double slope(double v) const { return tower(v, 1).d[1]; }
  virtual DerivativeTower tower(double v, int order) const;
  // Full Bloch state if the model has one (used for energies and stability).
  virtual bool has_state() const { return false; }
  virtual BlochState state(double v) const;
};

class BlochOverlap final : public OverlapModel {
 public:
  BlochOverlap(double q, int band = 0) : q_(q), band_(band) {}
  double f(double v) const override { return overlap_value(q_, v, band_); }
  double slope(double v) const override { return overlap_slope(q_, v, band_); }
  DerivativeTower tower(double v, int order) const override {
    return overlap_derivatives(q_, v, band_, order);
  }
  bool has_state() const override { return true; }
  BlochState state(double v) const override { return solve_bloch(q_, v, band_); }
  double q() const { return q_; }
  int band() const { return band_; }

 private:
  double q_;
  int band_;
};

// f held constant: a linear cavity.
class FrozenOverlap final : public OverlapModel {
 public:
  explicit FrozenOverlap(double c = 0.5) : c_(c) {}
  double f(double) const override { return c_; }
  double slope(double) const override { return 0.0; }
  DerivativeTower tower(double v, int order) const override;

 private:
  double c_;
};

// Shallow-lattice linearization at q = 0: f = 1/2 - v/16.
class ShallowOverlap final : public OverlapModel {
 public:
  double f(double v) const override { return 0.5 - v / 16.0; }
  double slope(double) const override { return -1.0 / 16.0; }
  DerivativeTower tower(double v, int order) const override;
};

// Arbitrary closed-form f, differentiated numerically.
class FunctionOverlap final : public OverlapModel {
 public:
  explicit FunctionOverlap(std::function<double(double)> fn) : fn_(std::move(fn)) {}
  double f(double v) const override { return fn_(v); }

 private:
  std::function<double(double)> fn_;
};

}  // namespace cavityband
