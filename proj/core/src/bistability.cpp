#include "cavityband/bistability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <tuple>

namespace cavityband {
namespace {

std::vector<double> signed_log_grid(double lo, double hi, int n, double sign) {
  std::vector<double> v(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) v[i] = sign * std::exp(a + (b - a) * i / (n - 1));
  return v;
}

double residual_from(double v, double delta_c, double f, double fp, const SystemParams& p) {
  const double D = delta_c - p.nu0() * f;
  return p.kappa * p.kappa + D * D - 2.0 * v * D * p.nu0() * fp;
}

double bisect_fn(double a, double b, double fa, const std::function<double(double)>& fn, double rel = 1e-13) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (std::abs(b - a) <= rel * std::max(std::abs(a), std::abs(b))) return m;
    const double fm = fn(m);
    if (fm == 0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

double bistability_residual(double v, double delta_c, const SystemParams& p, const OverlapModel& model) {
  return residual_from(v, delta_c, model.f(v), model.slope(v), p);
}

double bistability_residual(double v, double delta_c, const SystemParams& p, double q, int band) {
  return bistability_residual(v, delta_c, p, BlochOverlap(q, band));
}

CriticalPoint critical_point_numeric(const OverlapModel& model, double q, const SystemParams& p0,
                                     const CriticalSearch& s) {
  SystemParams p = p0;
  p.eta = 0;
  require_valid(p);
  if (!(s.delta_hi > s.delta_lo)) throw Error(ErrorKind::invalid_params, "delta window must be increasing");
  const double sign = p.u0 > 0 ? 1.0 : -1.0;
  const double k2 = p.kappa * p.kappa;
  const auto vg = signed_log_grid(s.v_lo, s.v_hi, s.v_points, sign);
  std::vector<double> fv(vg.size()), sv(vg.size());
  for (std::size_t i = 0; i < vg.size(); ++i) {
    fv[i] = model.f(vg[i]);
    sv[i] = model.slope(vg[i]);
  }
  std::size_t arg = 0;
  auto min_res = [&](double dc) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vg.size(); ++i) {
      const double r = residual_from(vg[i], dc, fv[i], sv[i], p);
      if (r < m) {
        m = r;
        arg = i;
      }
    }
    return m / k2;
  };
  double prev_dc = s.delta_lo, prev_m = min_res(prev_dc);
  double seed_dc = 0;
  bool found = false;
  for (int k = 1; k < s.delta_points && !found; ++k) {
    const double dc = s.delta_lo + (s.delta_hi - s.delta_lo) * k / (s.delta_points - 1);
    const double m = min_res(dc);
    if ((m < 0) != (prev_m < 0)) {
      seed_dc = bisect_fn(prev_dc, dc, prev_m, min_res, 1e-12);
      found = true;
    }
    prev_dc = dc;
    prev_m = m;
  }
  if (!found) throw Error(ErrorKind::not_found, "no bistability onset inside the detuning window");
  min_res(seed_dc);
  double v = vg[arg], dc = seed_dc;

  auto eval = [&](double vv, double dd, std::array<double, 2>& r, std::array<std::array<double, 2>, 2>* J) {
    const DerivativeTower t = model.tower(vv, 3);
    const double f = t.d[0], f1 = t.d[1], f2 = t.d[2], f3 = t.d[3];
    const double nu = p.nu0();
    const double D = dd - nu * f;
    r[0] = (k2 + D * D - 2.0 * vv * D * nu * f1) / k2;
    r[1] = -2.0 * nu * (2.0 * D * f1 + vv * D * f2 - vv * nu * f1 * f1) / k2;
    if (J) {
      (*J)[0][0] = r[1];
      (*J)[0][1] = (2.0 * D - 2.0 * vv * nu * f1) / k2;
      (*J)[1][0] = -2.0 * nu * (3.0 * D * f2 + vv * D * f3 - 3.0 * nu * f1 * f1 - 3.0 * vv * nu * f1 * f2) / k2;
      (*J)[1][1] = -2.0 * nu * (2.0 * f1 + vv * f2) / k2;
    }
  };
  CriticalPoint cp;
  cp.q = q;
  std::array<double, 2> r;
  std::array<std::array<double, 2>, 2> J;
  eval(v, dc, r, &J);
  int it = 0;
  for (; it < 60; ++it) {
    const double norm = std::max(std::abs(r[0]), std::abs(r[1]));
    if (norm < 1e-11) break;
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0 || !std::isfinite(det)) break;
    const double dv = (-r[0] * J[1][1] + r[1] * J[0][1]) / det;
    const double dd = (-J[0][0] * r[1] + J[1][0] * r[0]) / det;
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      const double vn = v + alpha * dv, dn = dc + alpha * dd;
      if (vn * sign <= 0) continue;
      std::array<double, 2> rn;
      eval(vn, dn, rn, nullptr);
      if (std::max(std::abs(rn[0]), std::abs(rn[1])) < norm) {
        v = vn;
        dc = dn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    eval(v, dc, r, &J);
  }
  cp.iterations = it;
  cp.v_0 = v;
  cp.delta_0 = dc;
  cp.n_0 = v / p.u0;
  const double D = dc - p.nu0() * model.f(v);
  cp.eta_cr = std::sqrt(cp.n_0 * (k2 + D * D));
  cp.residual = r[0];
  cp.residual_dv = r[1];
  return cp;
}

CriticalPoint critical_point_numeric(double q, const SystemParams& p, const CriticalSearch& search, int band) {
  QuasiMomentum{q};
  return critical_point_numeric(BlochOverlap(q, band), q, p, search);
}

std::optional<EtaWindow> eta_window(double q, double delta_c, const SystemParams& p0, int band,
                                    const WindowOptions& opt) {
  SystemParams p = p0;
  p.delta_c = delta_c;
  require_valid(p);
  BlochOverlap model(q, band);
  const double sign = p.u0 > 0 ? 1.0 : -1.0;
  const double k2 = p.kappa * p.kappa;
  const auto vg = signed_log_grid(opt.v_lo, opt.v_hi, opt.v_points, sign);
  auto B = [&](double v) { return bistability_residual(v, delta_c, p, model) / k2; };
  std::vector<double> bs(vg.size());
  for (std::size_t i = 0; i < vg.size(); ++i) bs[i] = B(vg[i]);
  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < vg.size(); ++i)
    if ((bs[i] < 0) != (bs[i + 1] < 0)) roots.push_back(bisect_fn(vg[i], vg[i + 1], bs[i], B));
  if (roots.empty()) {
    const double mn = *std::min_element(bs.begin(), bs.end());
    if (std::abs(mn) < 1e-10) throw Error(ErrorKind::degenerate_window, "single tangent fold (exactly critical)");
    return std::nullopt;
  }
  if (roots.size() == 1) throw Error(ErrorKind::degenerate_window, "single fold root in the search range");
  EtaWindow w;
  for (double v : roots) {
    const double n = v / p.u0;
    const double D = delta_c - p.nu0() * model.f(v);
    w.fold_n_ph.push_back(n);
    w.fold_eta.push_back(std::sqrt(n * (k2 + D * D)));
  }
  w.eta_1 = *std::min_element(w.fold_eta.begin(), w.fold_eta.end());
  w.eta_2 = *std::max_element(w.fold_eta.begin(), w.fold_eta.end());
  return w;
}

double eta_cr_analytic_shallow(double q, const SystemParams& p, AnalyticConstant c) {
  require_valid(p);
  if (std::abs(q) >= 1.0) return 0.0;
  const double C = c == AnalyticConstant::derivation ? std::sqrt(128.0) : std::sqrt(8.0);
  const double k3 = p.kappa * p.kappa * p.kappa;
  return C * std::sqrt(k3 * (1.0 - q * q) / (3.0 * std::sqrt(3.0) * p.n_atoms * p.u0 * p.u0));
}

std::vector<std::vector<FoldCurvePoint>> fold_curves(const OverlapModel& model, const SystemParams& p,
                                                      const std::vector<double>& v_grid) {
  std::vector<std::vector<FoldCurvePoint>> out;
  const double k2 = p.kappa * p.kappa;
  for (int branch = 0; branch < 2; ++branch) {
    std::vector<FoldCurvePoint> seg;
    for (double v : v_grid) {
      const double b = v * p.nu0() * model.slope(v);
      const double disc = b * b - k2;
      if (disc < 0) {
        if (!seg.empty()) out.push_back(std::move(seg));
        seg.clear();
        continue;
      }
      const double D = branch == 0 ? b - std::sqrt(disc) : b + std::sqrt(disc);
      const double n = v / p.u0;
      FoldCurvePoint pt;
      pt.v = v;
      pt.delta_c = D + p.nu0() * model.f(v);
      pt.eta = std::sqrt(n * (k2 + D * D));
      seg.push_back(pt);
    }
    if (!seg.empty()) out.push_back(std::move(seg));
  }
  return out;
}

namespace {

struct EdgeKey {
  int dir, i, j;  // dir 0: (i,j)-(i,j+1); dir 1: (i,j)-(i+1,j)
  bool operator<(const EdgeKey& o) const {
    return std::tie(dir, i, j) < std::tie(o.dir, o.i, o.j);
  }
};

std::vector<FoldPolyline> march(const std::vector<std::vector<int>>& c, const std::vector<double>& eta,
                                const std::vector<double>& dlt, double level) {
  const int ni = static_cast<int>(eta.size()), nj = static_cast<int>(dlt.size());
  auto inside = [&](int i, int j) { return c[i][j] > level; };
  auto point = [&](const EdgeKey& e) {
    const int i2 = e.i + (e.dir == 1), j2 = e.j + (e.dir == 0);
    const double ca = c[e.i][e.j], cb = c[i2][j2];
    const double t = (level - ca) / (cb - ca);
    return std::make_pair(dlt[e.j] + t * (dlt[j2] - dlt[e.j]), eta[e.i] + t * (eta[i2] - eta[e.i]));
  };
  std::vector<std::pair<EdgeKey, EdgeKey>> segs;
  for (int i = 0; i + 1 < ni; ++i)
    for (int j = 0; j + 1 < nj; ++j) {
      const bool b00 = inside(i, j), b01 = inside(i, j + 1), b10 = inside(i + 1, j), b11 = inside(i + 1, j + 1);
      const EdgeKey e0{0, i, j}, e1{1, i, j + 1}, e2{0, i + 1, j}, e3{1, i, j};
      std::vector<EdgeKey> cross;
      if (b00 != b01) cross.push_back(e0);
      if (b01 != b11) cross.push_back(e1);
      if (b10 != b11) cross.push_back(e2);
      if (b00 != b10) cross.push_back(e3);
      if (cross.size() == 2) {
        segs.push_back({cross[0], cross[1]});
      } else if (cross.size() == 4) {
        const double centre = 0.25 * (c[i][j] + c[i][j + 1] + c[i + 1][j] + c[i + 1][j + 1]);
        const bool cin = centre > level;
        if (b00 == cin) {
          segs.push_back({e0, e1});
          segs.push_back({e2, e3});
        } else {
          segs.push_back({e0, e3});
          segs.push_back({e1, e2});
        }
      }
    }
  std::map<EdgeKey, std::vector<std::size_t>> adj;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    adj[segs[s].first].push_back(s);
    adj[segs[s].second].push_back(s);
  }
  std::vector<bool> used(segs.size(), false);
  std::vector<FoldPolyline> out;
  auto walk = [&](EdgeKey start) {
    FoldPolyline pl;
    pl.level = level;
    pl.points.push_back(point(start));
    EdgeKey cur = start;
    for (;;) {
      std::size_t next = segs.size();
      for (std::size_t s : adj[cur])
        if (!used[s]) {
          next = s;
          break;
        }
      if (next == segs.size()) break;
      used[next] = true;
      const EdgeKey& a = segs[next].first;
      cur = (!(a < cur) && !(cur < a)) ? segs[next].second : a;
      pl.points.push_back(point(cur));
    }
    if (pl.points.size() > 1) out.push_back(std::move(pl));
  };
  for (const auto& [k, v] : adj)
    if (v.size() == 1) walk(k);
  for (std::size_t s = 0; s < segs.size(); ++s)
    if (!used[s]) walk(segs[s].first);
  return out;
}

}  // namespace

BifurcationMap bifurcation_map(double q, const SystemParams& p0, const std::vector<double>& eta_grid,
                               const std::vector<double>& delta_grid, int band, const Execution& ex) {
  QuasiMomentum{q};
  SystemParams p = p0;
  p.eta = 0;
  require_valid(p);
  if (eta_grid.size() < 2 || delta_grid.size() < 2 || !std::is_sorted(eta_grid.begin(), eta_grid.end()) ||
      !std::is_sorted(delta_grid.begin(), delta_grid.end()))
    throw Error(ErrorKind::invalid_params, "grids: need at least two sorted points");
  BifurcationMap map;
  map.q = q;
  map.eta_grid = eta_grid;
  map.delta_grid = delta_grid;

  const double eta_max = eta_grid.back();
  const double eta_min = std::max(eta_grid.front(), 1e-12 * eta_max);
  const double ratio = eta_max / eta_min;
  const int points = static_cast<int>(std::clamp(4000.0 * ratio * ratio, 4000.0, 400000.0));
  const double v_end = p.u0 * eta_max * eta_max / (p.kappa * p.kappa) * (1.0 + 1e-6);
  const OverlapTable table = make_overlap_table(q, band, v_end, points, ex);

  auto count = [&](double eta, double dc) {
    SystemParams pp = p;
    pp.eta = eta;
    pp.delta_c = dc;
    return static_cast<int>(find_depths(table, pp).size());
  };

  const std::size_t ni = eta_grid.size(), nj = delta_grid.size();
  auto flat = parallel_map(ni * nj, ex, [&](std::size_t k) { return count(eta_grid[k / nj], delta_grid[k % nj]); });
  map.counts.assign(ni, std::vector<int>(nj));
  for (std::size_t k = 0; k < flat.size(); ++k) map.counts[k / nj][k % nj] = flat[k];

  // one level of refinement: halve every cell whose corners disagree
  const std::size_t ri = 2 * ni - 1, rj = 2 * nj - 1;
  std::vector<double> reta(ri), rdlt(rj);
  for (std::size_t i = 0; i < ri; ++i)
    reta[i] = i % 2 == 0 ? eta_grid[i / 2] : 0.5 * (eta_grid[i / 2] + eta_grid[i / 2 + 1]);
  for (std::size_t j = 0; j < rj; ++j)
    rdlt[j] = j % 2 == 0 ? delta_grid[j / 2] : 0.5 * (delta_grid[j / 2] + delta_grid[j / 2 + 1]);
  std::vector<std::vector<int>> rc(ri, std::vector<int>(rj, -1));
  std::vector<std::pair<std::size_t, std::size_t>> todo;
  for (std::size_t i = 0; i < ri; ++i)
    for (std::size_t j = 0; j < rj; ++j) {
      std::vector<int> around;
      for (std::size_t a = i / 2; a <= (i + 1) / 2; ++a)
        for (std::size_t b = j / 2; b <= (j + 1) / 2; ++b) around.push_back(map.counts[a][b]);
      if (std::all_of(around.begin(), around.end(), [&](int x) { return x == around[0]; }))
        rc[i][j] = around[0];
      else
        todo.push_back({i, j});
    }
  auto extra = parallel_map(todo.size(), ex, [&](std::size_t k) { return count(reta[todo[k].first], rdlt[todo[k].second]); });
  for (std::size_t k = 0; k < todo.size(); ++k) rc[todo[k].first][todo[k].second] = extra[k];

  for (double level : {2.0, 4.0}) {
    auto pl = march(rc, reta, rdlt, level);
    map.folds.insert(map.folds.end(), pl.begin(), pl.end());
  }

  // cusps: stationary points of delta_c along the parametric fold curves
  const double sign = p.u0 > 0 ? 1.0 : -1.0;
  const auto vg = signed_log_grid(1e-4, std::abs(v_end), 4000, sign);
  BlochOverlap model(q, band);
  for (const auto& seg : fold_curves(model, p, vg)) {
    for (std::size_t k = 1; k + 1 < seg.size(); ++k) {
      const double a = seg[k].delta_c - seg[k - 1].delta_c, b = seg[k + 1].delta_c - seg[k].delta_c;
      if (a * b >= 0) continue;
      const auto& c = seg[k];
      if (c.eta < eta_grid.front() || c.eta > eta_grid.back() || c.delta_c < delta_grid.front() ||
          c.delta_c > delta_grid.back())
        continue;
      map.markers.push_back({"cusp", c.delta_c, c.eta, c.v});
    }
  }
  return map;
}

}  // namespace cavityband
