#include "cavityband/photon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace cavityband {
namespace {

struct Bracket {
  double a, b, ga, gb;
};

template <class G>
double bisect(Bracket br, G&& g) {
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (br.a + br.b);
    if (std::abs(br.b - br.a) <= 1e-12 * std::max(std::abs(br.a), std::abs(br.b))) return m;
    const double gm = g(m);
    if (gm == 0) return m;
    if ((gm < 0) == (br.ga < 0)) {
      br.a = m;
      br.ga = gm;
    } else {
      br.b = m;
      br.gb = gm;
    }
  }
  return 0.5 * (br.a + br.b);
}

// Roots of g given samples on an ordered node list. Cells whose sign change
// sits next to another one, or that surround a near-zero local extremum,
// are subdivided once before bracketing.
template <class G>
std::vector<double> scan_roots(const std::vector<double>& xs, const std::vector<double>& gs, G&& g,
                               int refine_factor) {
  const std::size_t n = xs.size();
  std::vector<double> exact;
  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i < n; ++i) {
    if (gs[i] == 0) exact.push_back(xs[i]);
    if (i + 1 < n && gs[i] * gs[i + 1] < 0) changes.push_back(i);
  }
  std::set<std::size_t> refine;
  for (std::size_t k = 0; k < changes.size(); ++k) {
    bool close = (k > 0 && changes[k] - changes[k - 1] <= 2) ||
                 (k + 1 < changes.size() && changes[k + 1] - changes[k] <= 2);
    if (close) refine.insert(changes[k]);
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dl = gs[i] - gs[i - 1], dr = gs[i + 1] - gs[i];
    if (dl * dr < 0 && std::abs(gs[i]) <= 4.0 * std::max(std::abs(dl), std::abs(dr))) {
      refine.insert(i - 1);
      refine.insert(i);
    }
  }

  std::vector<Bracket> brackets;
  for (std::size_t i : changes)
    if (!refine.count(i)) brackets.push_back({xs[i], xs[i + 1], gs[i], gs[i + 1]});
  for (std::size_t i : refine) {
    double xa = xs[i], ga = gs[i];
    for (int j = 1; j <= refine_factor; ++j) {
      const double xb = j == refine_factor ? xs[i + 1] : xs[i] + (xs[i + 1] - xs[i]) * j / refine_factor;
      const double gb = j == refine_factor ? gs[i + 1] : g(xb);
      if (gb == 0 && j < refine_factor) exact.push_back(xb);
      if (ga * gb < 0) brackets.push_back({xa, xb, ga, gb});
      xa = xb;
      ga = gb;
    }
  }

  std::vector<double> roots = exact;
  for (const auto& br : brackets) roots.push_back(bisect(br, g));
  std::sort(roots.begin(), roots.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  std::vector<double> out;
  for (double r : roots) {
    if (!out.empty() && std::abs(r - out.back()) <= 1e-6 * std::max(std::abs(r), std::abs(out.back())))
      continue;
    out.push_back(r);
  }
  return out;
}

std::vector<double> linspace_to(double end, int points) {
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = end * i / (points - 1);
  xs.back() = end;
  return xs;
}

double scan_end(const SystemParams& p) { return p.u0 * p.n_max() * (1.0 + 1e-9); }

}  // namespace

OverlapTable make_overlap_table(double q, int band, double v_end, int points, const Execution& ex) {
  OverlapTable t;
  t.q = q;
  t.band = band;
  t.v = linspace_to(v_end, std::max(points, 2));
  t.f = parallel_map(t.v.size(), ex, [&](std::size_t i) { return overlap_value(q, t.v[i], band); });
  return t;
}

double reduced_energy(const BlochState& s, const SystemParams& p) {
  double kin = 0;
  const int R = s.truncation;
  for (int n = -R; n <= R; ++n) {
    const double k = s.q + 2.0 * n;
    kin += k * k * s.coeffs[n + R] * s.coeffs[n + R];
  }
  const double d = (p.delta_c - p.nu0() * overlap_f(s)) / p.kappa;
  return p.n_atoms * kin - p.eta * p.eta / p.kappa * std::atan(d);
}

double state_function_G(double v, const OverlapModel& model, const SystemParams& p) {
  const double D = p.delta_c - p.nu0() * model.f(v);
  return v * p.kappa * p.kappa + v * D * D - p.eta * p.eta * p.u0;
}

double state_function_G(double v, double q, const SystemParams& p, int band) {
  return state_function_G(v, BlochOverlap(q, band), p);
}

std::vector<double> find_depths(const OverlapModel& model, const SystemParams& p, const ScanOptions& opt) {
  require_valid(p);
  if (p.eta == 0) return {0.0};
  const auto xs = linspace_to(scan_end(p), std::max(opt.grid_points, 3));
  auto g = [&](double v) { return state_function_G(v, model, p); };
  std::vector<double> gs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) gs[i] = g(xs[i]);
  return scan_roots(xs, gs, g, opt.refine_factor);
}

std::vector<double> find_depths(const OverlapTable& table, const SystemParams& p, const ScanOptions& opt) {
  require_valid(p);
  if (p.eta == 0) return {0.0};
  const double end = scan_end(p);
  if (table.v.empty() || std::abs(table.v.back()) < std::abs(end) || table.v.back() * end < 0)
    throw Error(ErrorKind::internal, "overlap table does not cover the scan range");
  BlochOverlap model(table.q, table.band);
  auto g = [&](double v) { return state_function_G(v, model, p); };
  std::vector<double> xs, gs;
  for (std::size_t i = 0; i < table.v.size() && std::abs(table.v[i]) < std::abs(end); ++i) {
    const double D = p.delta_c - p.nu0() * table.f[i];
    xs.push_back(table.v[i]);
    gs.push_back(table.v[i] * p.kappa * p.kappa + table.v[i] * D * D - p.eta * p.eta * p.u0);
  }
  xs.push_back(end);
  gs.push_back(g(end));
  return scan_roots(xs, gs, g, opt.refine_factor);
}

PhotonBranch make_branch(double v, const OverlapModel& model, const SystemParams& p) {
  PhotonBranch b;
  b.v = v;
  b.n_ph = std::max(0.0, v / p.u0);
  if (model.has_state()) {
    BlochState s = model.state(v);
    b.f = overlap_f(s);
    b.mu = s.mu;
    b.energy_total = reduced_energy(s, p);
  } else {
    b.f = model.f(v);
    b.mu = std::numeric_limits<double>::quiet_NaN();
    b.energy_total = std::numeric_limits<double>::quiet_NaN();
  }
  b.phase = std::atan((p.delta_c - p.nu0() * b.f) / p.kappa);
  return b;
}

BranchSet find_branches(const OverlapModel& model, double q, const SystemParams& p, int band,
                        const ScanOptions& opt) {
  BranchSet set;
  set.q = q;
  set.params = p;
  set.band = band;
  for (double v : find_depths(model, p, opt)) set.branches.push_back(make_branch(v, model, p));
  if (set.branches.empty()) throw Error(ErrorKind::internal, "no steady state found");
  std::sort(set.branches.begin(), set.branches.end(),
            [](const PhotonBranch& a, const PhotonBranch& b) { return a.n_ph < b.n_ph; });
  return set;
}

BranchSet find_branches(double q, const SystemParams& p, int band, const ScanOptions& opt) {
  QuasiMomentum{q};
  return find_branches(BlochOverlap(q, band), q, p, band, opt);
}

BranchSet find_branches_red_detuned(double q, const SystemParams& p, int band, const ScanOptions& opt) {
  require_valid(p);
  QuasiMomentum{q};
  if (!(p.u0 < 0)) throw Error(ErrorKind::invalid_params, "u0: red-detuned path requires u0 < 0");
  BlochOverlap model(q, band);
  BranchSet set;
  set.q = q;
  set.params = p;
  set.band = band;
  if (p.eta == 0) {
    set.branches.push_back(make_branch(0.0, model, p));
    return set;
  }
  const double au = std::abs(p.u0);
  const double nau = p.n_atoms * au;
  auto g = [&](double w) {
    const double D = p.delta_c + nau * (1.0 - model.f(w));
    return w * p.kappa * p.kappa + w * D * D - p.eta * p.eta * au;
  };
  const auto xs = linspace_to(au * p.n_max() * (1.0 + 1e-9), std::max(opt.grid_points, 3));
  std::vector<double> gs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) gs[i] = g(xs[i]);
  for (double w : scan_roots(xs, gs, g, opt.refine_factor)) set.branches.push_back(make_branch(-w, model, p));
  if (set.branches.empty()) throw Error(ErrorKind::internal, "no steady state found");
  std::sort(set.branches.begin(), set.branches.end(),
            [](const PhotonBranch& a, const PhotonBranch& b) { return a.n_ph < b.n_ph; });
  return set;
}

void hysteresis_traces(Lineshape& ls) {
  const std::size_t n = ls.sets.size();
  ls.trace_up.assign(n, 0.0);
  ls.trace_down.assign(n, 0.0);
  if (n == 0) return;
  auto follow = [](const BranchSet& s, double cur) {
    double best = s.branches.front().n_ph, dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < s.branches.size(); k += 2) {
      const double d = std::abs(s.branches[k].n_ph - cur);
      if (d < dist) {
        dist = d;
        best = s.branches[k].n_ph;
      }
    }
    return best;
  };
  double cur = ls.sets.front().branches.front().n_ph;
  for (std::size_t i = 0; i < n; ++i) ls.trace_up[i] = cur = follow(ls.sets[i], cur);
  cur = ls.sets.back().branches.back().n_ph;
  for (std::size_t i = n; i-- > 0;) ls.trace_down[i] = cur = follow(ls.sets[i], cur);
}

Lineshape lineshape_sweep(const SystemParams& p, double q, int band, const std::vector<double>& delta_grid,
                          const Execution& ex) {
  require_valid(p);
  if (!std::is_sorted(delta_grid.begin(), delta_grid.end()))
    throw Error(ErrorKind::invalid_params, "delta_grid: must be sorted");
  Lineshape ls;
  ls.delta_c = delta_grid;
  ls.sets = parallel_map(delta_grid.size(), ex, [&](std::size_t i) {
    SystemParams pi = p;
    pi.delta_c = delta_grid[i];
    return find_branches(q, pi, band);
  });
  hysteresis_traces(ls);
  return ls;
}

std::vector<InputOutputPoint> input_output_curve(const SystemParams& p, const OverlapModel& model,
                                                 const std::vector<double>& n_ph_grid) {
  std::vector<InputOutputPoint> out;
  out.reserve(n_ph_grid.size());
  for (double n : n_ph_grid) {
    InputOutputPoint pt;
    pt.n_ph = n;
    pt.f = model.f(p.u0 * n);
    const double d = (p.delta_c - p.nu0() * pt.f) / p.kappa;
    pt.n_max = n * (1.0 + d * d);
    out.push_back(pt);
  }
  return out;
}

std::vector<InputOutputPoint> input_output_curve(const SystemParams& p, double q, int band,
                                                 const std::vector<double>& n_ph_grid) {
  return input_output_curve(p, BlochOverlap(q, band), n_ph_grid);
}

}  // namespace cavityband
