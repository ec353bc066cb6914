#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "cavityband/bloch.hpp"
#include "cavityband/parallel.hpp"

namespace cavityband {

// Value with a first-order absolute error bound.
struct Uncertain {
  double value = 0;
  double error = 0;
};

inline Uncertain operator+(Uncertain a, Uncertain b) { return {a.value + b.value, a.error + b.error}; }
inline Uncertain operator-(Uncertain a, Uncertain b) { return {a.value - b.value, a.error + b.error}; }
inline Uncertain operator*(Uncertain a, Uncertain b) {
  return {a.value * b.value, std::abs(a.value) * b.error + std::abs(b.value) * a.error};
}
inline Uncertain operator/(Uncertain a, Uncertain b) {
  const double q = a.value / b.value;
  return {q, (a.error + std::abs(q) * b.error) / std::abs(b.value)};
}
inline Uncertain operator*(double s, Uncertain a) { return {s * a.value, std::abs(s) * a.error}; }

// Shallow-lattice (q = 0, f = 1/2 - v/16) state equation as a monic cubic.
struct CuspCoordinates {
  double b1 = 0, b2 = 0, b3 = 0;
  double c1 = 0, c2 = 0;

  double cubic(double v) const { return ((v + b1) * v + b2) * v + b3; }
  double shifted(double v) const { return v + b1 / 3.0; }  // s = v + b1/3
  std::vector<double> real_roots() const;
};

CuspCoordinates cusp_reduce_shallow(const SystemParams& p);

struct SwallowtailPoint {
  double q = 0;
  double v = 0;
  double delta_over_NU0 = 0;  // r
  double inv_NU0_sq = 0;      // s = kappa^2 / (N U0)^2
  double eta = 0;             // kappa units
  Uncertain residual3;        // r32 - r33
  Uncertain residual4;        // r34 - r32
  Uncertain s_uncertain;
  bool inconclusive = false;

  // mapping to omega_R for the (n_atoms, kappa) used in the scan
  double n_atoms = 0;
  double kappa = 0;
  double nu0 = 0;
  double u0 = 0;
  double delta_c = 0;
  double n_ph = 0;
  double f = 0;
};

struct SwallowtailScanOptions {
  double v_lo = 1e-3;
  double v_hi = 50.0;
  int v_points = 2000;
  double n_atoms = 100;
  double kappa = 1.0;
  int band = 0;
};

// The three conditions for r = delta_c / (N U0) from successive v-derivatives
// of the state function.
Uncertain swallowtail_r32(double v, const DerivativeTower& t);
Uncertain swallowtail_r33(double v, const DerivativeTower& t);
Uncertain swallowtail_r34(double v, const DerivativeTower& t);
// kappa^2 / (N U0)^2 from the first derivative given r.
Uncertain swallowtail_s(double v, Uncertain r, const DerivativeTower& t);

std::vector<SwallowtailPoint> swallowtail_scan(double q, const SwallowtailScanOptions& opt = {},
                                               const Execution& ex = {});
std::vector<SwallowtailPoint> swallowtail_scan(const OverlapModel& model, double q,
                                               const SwallowtailScanOptions& opt = {}, const Execution& ex = {});

// Physical mapping of a scaled point for another (n_atoms, kappa).
SwallowtailPoint map_swallowtail(SwallowtailPoint pt, double n_atoms, double kappa);
SystemParams swallowtail_params(const SwallowtailPoint& pt);

double find_q_sw(double lo = 0.4, double hi = 0.7, double tol = 1e-3, const SwallowtailScanOptions& opt = {},
                 const Execution& ex = {});

enum class ButterflyVerdict { no_butterfly, vanishing, inconclusive };
const char* to_string(ButterflyVerdict v);

struct ButterflyResult {
  Uncertain residual4;
  ButterflyVerdict verdict = ButterflyVerdict::inconclusive;
};

ButterflyResult butterfly_check(const SwallowtailPoint& pt, const OverlapModel& model);
ButterflyResult butterfly_check(const SwallowtailPoint& pt);

struct TransversalityResult {
  int rank = 0;
  Eigen::Matrix4d matrix;
  Eigen::Vector4d singular_values;
  double g4 = 0, g5 = 0;
  std::array<std::array<double, 4>, 2> z{};  // z[i][j-1], i: (delta_c, u0) unfolding
};

TransversalityResult transversality_rank_check(const SwallowtailPoint& pt, const OverlapModel& model,
                                               bool duplicate_unfolding = false);
TransversalityResult transversality_rank_check(const SwallowtailPoint& pt, bool duplicate_unfolding = false);

}  // namespace cavityband
