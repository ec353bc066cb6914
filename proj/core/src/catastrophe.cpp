#include "cavityband/catastrophe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace cavityband {

std::vector<double> CuspCoordinates::real_roots() const {
  Eigen::Matrix3d c = Eigen::Matrix3d::Zero();
  c(1, 0) = 1.0;
  c(2, 1) = 1.0;
  c(0, 2) = -b3;
  c(1, 2) = -b2;
  c(2, 2) = -b1;
  Eigen::EigenSolver<Eigen::Matrix3d> es(c, false);
  const double scale = 1.0 + std::abs(b1) + std::sqrt(std::abs(b2)) + std::cbrt(std::abs(b3));
  std::vector<double> roots;
  for (int i = 0; i < 3; ++i) {
    auto z = es.eigenvalues()[i];
    if (std::abs(z.imag()) > 1e-7 * scale) continue;
    double x = z.real();
    for (int it = 0; it < 3; ++it) {
      const double d = (3 * x + 2 * b1) * x + b2;
      if (d == 0) break;
      x -= cubic(x) / d;
    }
    roots.push_back(x);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

CuspCoordinates cusp_reduce_shallow(const SystemParams& p) {
  require_valid(p);
  // D = delta_c - N U0 (1/2 - v/16) = d0 + a v
  const double a = p.nu0() / 16.0;
  const double d0 = p.delta_c - p.nu0() / 2.0;
  CuspCoordinates c;
  c.b1 = 2.0 * d0 / a;
  c.b2 = (p.kappa * p.kappa + d0 * d0) / (a * a);
  c.b3 = -256.0 * p.eta * p.eta / (p.n_atoms * p.n_atoms * p.u0);
  c.c1 = c.b2 - c.b1 * c.b1 / 3.0;
  c.c2 = 2.0 * c.b1 * c.b1 * c.b1 / 27.0 - c.b1 * c.b2 / 3.0 + c.b3;
  return c;
}

namespace {

struct Fd {
  Uncertain f, f1, f2, f3, f4;
};

Fd unpack(const DerivativeTower& t) {
  Fd o;
  o.f = {t.value, 0.0};
  o.f1 = {t.d[1], t.err[1]};
  o.f2 = {t.d[2], t.err[2]};
  if (t.order >= 3) o.f3 = {t.d[3], t.err[3]};
  if (t.order >= 4) o.f4 = {t.d[4], t.err[4]};
  return o;
}

Uncertain exact(double x) { return {x, 0.0}; }

}  // namespace

Uncertain swallowtail_r32(double v, const DerivativeTower& t) {
  const Fd d = unpack(t);
  const Uncertain V = exact(v);
  return (2.0 * (d.f * d.f1) + V * (d.f * d.f2 + d.f1 * d.f1)) / (2.0 * d.f1 + V * d.f2);
}

Uncertain swallowtail_r33(double v, const DerivativeTower& t) {
  const Fd d = unpack(t);
  const Uncertain V = exact(v);
  return (3.0 * (d.f * d.f2) + 3.0 * (d.f1 * d.f1) + V * (3.0 * (d.f1 * d.f2) + d.f * d.f3)) /
         (V * d.f3 + 3.0 * d.f2);
}

Uncertain swallowtail_r34(double v, const DerivativeTower& t) {
  const Fd d = unpack(t);
  const Uncertain V = exact(v);
  return (12.0 * (d.f1 * d.f2) + 4.0 * (d.f * d.f3) +
          V * (4.0 * (d.f1 * d.f3) + d.f * d.f4 + 3.0 * (d.f2 * d.f2))) /
         (V * d.f4 + 4.0 * d.f3);
}

Uncertain swallowtail_s(double v, Uncertain r, const DerivativeTower& t) {
  const Fd d = unpack(t);
  const Uncertain x = r - d.f;
  const Uncertain y = x * x - 2.0 * v * (d.f1 * x);
  return {-y.value, y.error};
}

SwallowtailPoint map_swallowtail(SwallowtailPoint pt, double n_atoms, double kappa) {
  pt.n_atoms = n_atoms;
  pt.kappa = kappa;
  pt.nu0 = kappa / std::sqrt(pt.inv_NU0_sq);
  pt.u0 = pt.nu0 / n_atoms;
  pt.delta_c = pt.delta_over_NU0 * pt.nu0;
  pt.n_ph = pt.v / pt.u0;
  const double D = pt.delta_c - pt.nu0 * pt.f;
  pt.eta = std::sqrt(pt.n_ph * (kappa * kappa + D * D)) / kappa;
  return pt;
}

SystemParams swallowtail_params(const SwallowtailPoint& pt) {
  SystemParams p;
  p.kappa = pt.kappa;
  p.n_atoms = pt.n_atoms;
  p.u0 = pt.u0;
  p.eta = pt.eta * pt.kappa;
  p.delta_c = pt.delta_c;
  return p;
}

namespace {

struct Sample {
  double v = 0;
  Uncertain e35;
  double den32 = 0, den33 = 0;
  bool ok = false;
};

Sample sample(const OverlapModel& model, double v) {
  Sample s;
  s.v = v;
  try {
    const DerivativeTower t = model.tower(v, 3);
    s.den32 = 2.0 * t.d[1] + v * t.d[2];
    s.den33 = v * t.d[3] + 3.0 * t.d[2];
    s.e35 = swallowtail_r32(v, t) - swallowtail_r33(v, t);
    s.ok = std::isfinite(s.e35.value);
  } catch (const Error&) {
    s.ok = false;
  }
  return s;
}

bool sign_flip(double a, double b) { return (a < 0) != (b < 0); }

}  // namespace

std::vector<SwallowtailPoint> swallowtail_scan(const OverlapModel& model, double q, const SwallowtailScanOptions& opt,
                                               const Execution& ex) {
  if (!(opt.v_lo > 0) || !(opt.v_hi > opt.v_lo) || opt.v_points < 2)
    throw Error(ErrorKind::invalid_params, "swallowtail scan needs 0 < v_lo < v_hi and at least 2 points");
  const int n = opt.v_points;
  const double ratio = std::log(opt.v_hi / opt.v_lo) / (n - 1);
  auto samples = parallel_map(static_cast<std::size_t>(n), ex, [&](std::size_t i) {
    return sample(model, opt.v_lo * std::exp(ratio * static_cast<double>(i)));
  });

  std::vector<std::pair<Sample, Sample>> cells;
  for (int i = 0; i + 1 < n; ++i) {
    const Sample& a = samples[i];
    const Sample& b = samples[i + 1];
    if (!a.ok || !b.ok) continue;
    if (!sign_flip(a.e35.value, b.e35.value)) continue;
    // a denominator changing sign in the same cell means the flip is a pole
    if (sign_flip(a.den32, b.den32) || sign_flip(a.den33, b.den33)) continue;
    cells.emplace_back(a, b);
  }

  auto found = parallel_map(cells.size(), ex, [&](std::size_t k) -> std::optional<SwallowtailPoint> {
    Sample a = cells[k].first;
    Sample b = cells[k].second;
    Sample m = a;
    for (int it = 0; it < 200; ++it) {
      m = sample(model, 0.5 * (a.v + b.v));
      if (!m.ok) return std::nullopt;
      if (std::abs(m.e35.value) <= m.e35.error || b.v - a.v < 1e-13 * b.v) break;
      if (sign_flip(a.e35.value, m.e35.value))
        b = m;
      else
        a = m;
    }
    // a pole that slipped through keeps |E35| large at the end of the bisection
    if (std::abs(m.e35.value) > std::max(3.0 * m.e35.error, 1e-8)) return std::nullopt;

    const double v = m.v;
    DerivativeTower t;
    try {
      t = model.tower(v, 4);
    } catch (const Error&) {
      return std::nullopt;
    }
    const Uncertain r32 = swallowtail_r32(v, t);
    const Uncertain r33 = swallowtail_r33(v, t);
    const Uncertain r34 = swallowtail_r34(v, t);
    const Uncertain s = swallowtail_s(v, r32, t);
    if (!(s.value > 0)) return std::nullopt;

    SwallowtailPoint pt;
    pt.q = q;
    pt.v = v;
    pt.f = t.value;
    pt.delta_over_NU0 = r32.value;
    pt.inv_NU0_sq = s.value;
    pt.s_uncertain = s;
    pt.residual3 = r32 - r33;
    pt.residual4 = r34 - r32;
    pt.inconclusive = s.value <= s.error || std::abs(pt.residual4.value) <= pt.residual4.error;
    return map_swallowtail(pt, opt.n_atoms, opt.kappa);
  });

  std::vector<SwallowtailPoint> out;
  for (auto& f : found)
    if (f) out.push_back(*f);
  return out;
}

std::vector<SwallowtailPoint> swallowtail_scan(double q, const SwallowtailScanOptions& opt, const Execution& ex) {
  BlochOverlap model(QuasiMomentum(q).value(), opt.band);
  return swallowtail_scan(model, q, opt, ex);
}

double find_q_sw(double lo, double hi, double tol, const SwallowtailScanOptions& opt, const Execution& ex) {
  auto has = [&](double q) { return !swallowtail_scan(q, opt, ex).empty(); };
  if (has(lo)) throw Error(ErrorKind::not_found, "swallowtail points already present at the lower q bound");
  if (!has(hi)) throw Error(ErrorKind::not_found, "no swallowtail point at the upper q bound");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (has(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

const char* to_string(ButterflyVerdict v) {
  switch (v) {
    case ButterflyVerdict::no_butterfly: return "no_butterfly";
    case ButterflyVerdict::vanishing: return "vanishing";
    case ButterflyVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

ButterflyResult butterfly_check(const SwallowtailPoint& pt, const OverlapModel& model) {
  const DerivativeTower t = model.tower(pt.v, 4);
  const Uncertain r32 = swallowtail_r32(pt.v, t);
  ButterflyResult res;
  res.residual4 = swallowtail_r34(pt.v, t) - r32;
  const double r = std::abs(res.residual4.value);
  const double e = res.residual4.error;
  if (r > 3.0 * e)
    res.verdict = ButterflyVerdict::no_butterfly;
  else if (e <= 1e-6 * std::max(1.0, std::abs(r32.value)))
    res.verdict = ButterflyVerdict::vanishing;
  else
    res.verdict = ButterflyVerdict::inconclusive;
  return res;
}

ButterflyResult butterfly_check(const SwallowtailPoint& pt) {
  return butterfly_check(pt, BlochOverlap(pt.q));
}

TransversalityResult transversality_rank_check(const SwallowtailPoint& pt, const OverlapModel& model,
                                               bool duplicate_unfolding) {
  // kappa units: Delta = delta_c/kappa, U = U0/kappa
  const double delta = pt.delta_c / pt.kappa;
  const double nu = pt.nu0 / pt.kappa;
  const double n = pt.n_atoms;

  auto F = [&](double v) {
    const double D = delta - nu * model.f(v);
    return v + v * D * D;
  };
  auto dF_delta = [&](double v) { return 2.0 * v * (delta - nu * model.f(v)); };
  auto dF_u0 = [&](double v) {
    const double f = model.f(v);
    return -2.0 * v * n * f * (delta - nu * f);
  };

  TransversalityResult res;
  const DerivativeTower tf = richardson_tower(F, pt.v, 5);
  res.g4 = tf.d[4] / 24.0;
  res.g5 = tf.d[5] / 120.0;
  if (res.g4 == 0) throw Error(ErrorKind::numerical, "fourth Taylor coefficient vanishes");

  const DerivativeTower ta = richardson_tower(dF_delta, pt.v, 4);
  const DerivativeTower tb = richardson_tower(dF_u0, pt.v, 4);
  const double fact[5] = {1, 1, 2, 6, 24};
  for (int j = 1; j <= 4; ++j) {
    res.z[0][j - 1] = ta.d[j] / fact[j];
    res.z[1][j - 1] = tb.d[j] / fact[j];
  }

  Eigen::Matrix4d m;
  m.row(0) << 0, 0, 0, 1;
  m.row(1) << 0, 0, 1, res.g5 / (4.0 * res.g4);
  m.row(2) << res.z[0][0], res.z[0][1], res.z[0][2], res.z[0][3];
  if (duplicate_unfolding)
    m.row(3) = m.row(2);
  else
    m.row(3) << res.z[1][0], res.z[1][1], res.z[1][2], res.z[1][3];
  for (int i = 0; i < 4; ++i) {
    const double nrm = m.row(i).norm();
    if (nrm > 0) m.row(i) /= nrm;
  }
  res.matrix = m;
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(m);
  res.singular_values = svd.singularValues();
  const double thr = 1e-6 * res.singular_values[0];
  res.rank = 0;
  for (int i = 0; i < 4; ++i)
    if (res.singular_values[i] > thr) ++res.rank;
  return res;
}

TransversalityResult transversality_rank_check(const SwallowtailPoint& pt, bool duplicate_unfolding) {
  return transversality_rank_check(pt, BlochOverlap(pt.q), duplicate_unfolding);
}

}  // namespace cavityband
