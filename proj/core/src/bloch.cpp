#include "cavityband/bloch.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace cavityband {
namespace {

constexpr double kTailTol = 1e-7;

void fix_sign(Eigen::VectorXd& a) {
  Eigen::Index imax = 0;
  a.cwiseAbs().maxCoeff(&imax);
  if (a[imax] < 0) a = -a;
}

Eigen::VectorXd apply_cos2(const Eigen::VectorXd& a) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd out = 0.5 * a;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out[i] += 0.25 * a[i + 1];
    out[i + 1] += 0.25 * a[i];
  }
  return out;
}

// v = 0: a single plane wave, the band-th lowest in kinetic energy. At the
// zone edge the degenerate pair is not mixed, so f = 1/2 for every q.
Eigen::VectorXd free_state(double q, int band, int R) {
  const int dim = 2 * R + 1;
  std::vector<int> idx(dim);
  std::iota(idx.begin(), idx.end(), 0);
  auto kin = [&](int i) { double k = q + 2.0 * (i - R); return k * k; };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return kin(a) < kin(b); });
  Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
  a[idx[band]] = 1.0;
  return a;
}

double rayleigh(double q, double v, const Eigen::VectorXd& a) {
  const int R = static_cast<int>(a.size() / 2);
  double acc = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double k = q + 2.0 * (i - R);
    acc += (k * k + 0.5 * v) * a[i] * a[i];
    if (i + 1 < a.size()) acc += 0.5 * v * a[i] * a[i + 1];
  }
  return acc;
}

double tail(const Eigen::VectorXd& a) {
  const Eigen::Index n = a.size();
  double t = std::max(std::abs(a[0]), std::abs(a[n - 1]));
  if (n > 2) t = std::max({t, std::abs(a[1]), std::abs(a[n - 2])});
  return t;
}

}  // namespace

Eigen::MatrixXd build_hamiltonian(double q, double v, int R) {
  if (R < 1) throw Error(ErrorKind::truncation, "truncation R must be at least 1");
  const int dim = 2 * R + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double k = q + 2.0 * (i - R);
    H(i, i) = k * k + 0.5 * v;
    if (i + 1 < dim) H(i, i + 1) = H(i + 1, i) = 0.25 * v;
  }
  return H;
}

BlochState solve_bloch_fixed(double q, double v, int band, int R) {
  if (R < 1) throw Error(ErrorKind::truncation, "truncation R must be at least 1");
  const int dim = 2 * R + 1;
  if (band < 0 || band >= dim) throw Error(ErrorKind::truncation, "band index exceeds basis size");
  if (!std::isfinite(q) || !std::isfinite(v))
    throw Error(ErrorKind::numerical, "non-finite input to Bloch solver");

  BlochState s;
  s.q = q;
  s.band = band;
  s.v = v;
  s.truncation = R;
  if (v == 0.0) {
    s.coeffs = free_state(q, band, R);
  } else {
    thread_local std::vector<double> d, e, w, z, work;
    thread_local std::vector<lapack_int> iwork;
    d.resize(dim);
    e.assign(dim, 0.0);
    w.resize(dim);
    z.resize(dim);
    work.resize(20 * dim);
    iwork.resize(10 * dim);
    for (int i = 0; i < dim; ++i) {
      const double k = q + 2.0 * (i - R);
      d[i] = k * k + 0.5 * v;
      if (i + 1 < dim) e[i] = 0.25 * v;
    }
    lapack_int m = 0;
    lapack_int isuppz[2];
    lapack_int info = LAPACKE_dstevr_work(LAPACK_COL_MAJOR, 'V', 'I', dim, d.data(), e.data(), 0.0, 0.0,
                                          band + 1, band + 1, 0.0, &m, w.data(), z.data(), dim, isuppz,
                                          work.data(), static_cast<lapack_int>(work.size()), iwork.data(),
                                          static_cast<lapack_int>(iwork.size()));
    if (info != 0 || m != 1) throw Error(ErrorKind::numerical, "tridiagonal eigensolver failed");
    s.coeffs = Eigen::Map<Eigen::VectorXd>(z.data(), dim);
    s.coeffs.normalize();
  }
  fix_sign(s.coeffs);
  s.mu = rayleigh(q, v, s.coeffs);
  return s;
}

BlochState solve_bloch(double q, double v, int band, int R0) {
  int R = std::max(R0, 1);
  while (2 * R + 1 <= band) R *= 2;
  // Coefficients decay super-exponentially beyond |n| ~ sqrt(|v|); solve on
  // that window and zero-pad when the window tail is far below tolerance.
  const int window = static_cast<int>(std::ceil(6.0 + 1.5 * std::sqrt(std::abs(v)))) + band;
  if (window < R) {
    BlochState s = solve_bloch_fixed(q, v, band, window);
    if (tail(s.coeffs) < 1e-13) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(2 * R + 1);
      a.segment(R - window, 2 * window + 1) = s.coeffs;
      s.coeffs = a;
      s.truncation = R;
      return s;
    }
  }
  for (;;) {
    BlochState s = solve_bloch_fixed(q, v, band, R);
    if (tail(s.coeffs) < kTailTol) return s;
    if (2 * R > max_truncation)
      throw Error(ErrorKind::truncation, "Bloch state not converged at R = 256");
    R *= 2;
  }
}

double overlap_f(const BlochState& s) {
  const Eigen::Index n = s.coeffs.size();
  double acc = 0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) acc += s.coeffs[i] * s.coeffs[i + 1];
  return 0.5 + 0.5 * acc;
}

double overlap_value(double q, double v, int band) { return overlap_f(solve_bloch(q, v, band)); }

BlochSpectrum bloch_spectrum(double q, double v, int R, bool vectors) {
  const int dim = 2 * R + 1;
  std::vector<double> d(dim), e(std::max(dim - 1, 1));
  for (int i = 0; i < dim; ++i) {
    const double k = q + 2.0 * (i - R);
    d[i] = k * k + 0.5 * v;
    if (i + 1 < dim) e[i] = 0.25 * v;
  }
  BlochSpectrum out;
  if (vectors) out.vectors.resize(dim, dim);
  const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', dim, d.data(), e.data(),
                                        vectors ? out.vectors.data() : nullptr, dim);
  if (info != 0) throw Error(ErrorKind::numerical, "tridiagonal eigensolver failed");
  out.values = Eigen::Map<Eigen::VectorXd>(d.data(), dim);
  return out;
}

double overlap_slope(double q, double v, int band) {
  const int R = solve_bloch(q, v, band).truncation;
  const int dim = 2 * R + 1;
  const BlochSpectrum es = bloch_spectrum(q, v, R);
  Eigen::VectorXd b = es.vectors.col(band);
  if (v == 0.0) b = free_state(q, band, R);
  const double mub = rayleigh(q, v, b);
  const Eigen::VectorXd Mb = apply_cos2(b);
  double acc = 0;
  for (int m = 0; m < dim; ++m) {
    if (m == band) continue;
    const double gap = mub - es.values[m];
    if (std::abs(gap) < 1e-12) continue;
    const double c = es.vectors.col(m).dot(Mb);
    acc += c * c / gap;
  }
  return 2.0 * acc;
}

OverlapDerivatives overlap_derivatives(double q, double v, int band, int order) {
  if (order < 0 || order > 4) throw Error(ErrorKind::internal, "overlap derivative order must be <= 4");
  try {
    return richardson_tower([&](double x) { return overlap_value(q, x, band); }, v, order);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::derivative_unavailable) throw;
    throw Error(ErrorKind::derivative_unavailable, std::string("overlap derivative failed: ") + e.what());
  }
}

DerivativeTower OverlapModel::tower(double v, int order) const {
  return richardson_tower([this](double x) { return f(x); }, v, order);
}

BlochState OverlapModel::state(double) const {
  throw Error(ErrorKind::internal, "overlap model has no Bloch state");
}

DerivativeTower FrozenOverlap::tower(double, int order) const {
  DerivativeTower t;
  t.order = order;
  t.value = t.d[0] = c_;
  return t;
}

DerivativeTower ShallowOverlap::tower(double v, int order) const {
  DerivativeTower t;
  t.order = order;
  t.value = t.d[0] = f(v);
  if (order >= 1) t.d[1] = -1.0 / 16.0;
  return t;
}

}  // namespace cavityband
