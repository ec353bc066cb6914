#include "cavityband/band.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace cavityband {
namespace {

Eigen::VectorXd kinetic_diag(double q, int R) {
  Eigen::VectorXd K(2 * R + 1);
  for (int i = 0; i <= 2 * R; ++i) {
    const double k = q + 2.0 * (i - R);
    K[i] = k * k;
  }
  return K;
}

Eigen::VectorXd cos2_apply(const Eigen::VectorXd& a) {
  Eigen::VectorXd out = 0.5 * a;
  for (Eigen::Index i = 0; i + 1 < a.size(); ++i) {
    out[i] += 0.25 * a[i + 1];
    out[i + 1] += 0.25 * a[i];
  }
  return out;
}

Eigen::MatrixXd cos2_matrix(int dim) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    M(i, i) = 0.5;
    if (i + 1 < dim) M(i, i + 1) = M(i + 1, i) = 0.25;
  }
  return M;
}

struct SphereEval {
  double v, mu, rho, gnorm;
  Eigen::VectorXd g, w;
};

SphereEval sphere_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& K, const SystemParams& p) {
  SphereEval e;
  e.w = cos2_apply(a);
  const double F = a.dot(e.w);
  const double d = (p.delta_c - p.nu0() * F) / p.kappa;
  const double k2 = p.kappa * p.kappa;
  e.v = p.u0 * p.eta * p.eta / (k2 * (1.0 + d * d));
  e.rho = p.eta * p.eta * p.n_atoms * p.u0 * p.u0 * d / (k2 * p.kappa * (1.0 + d * d) * (1.0 + d * d));
  Eigen::VectorXd Ha = K.cwiseProduct(a) + e.v * e.w;
  e.mu = a.dot(Ha);
  e.g = Ha - e.mu * a;
  e.gnorm = e.g.norm();
  return e;
}

struct NewtonResult {
  bool converged = false;
  Eigen::VectorXd a;
  SphereEval ev;
};

NewtonResult sphere_newton(Eigen::VectorXd a, double q, const SystemParams& p, int max_iter, double tol) {
  const int dim = static_cast<int>(a.size());
  const int R = (dim - 1) / 2;
  const Eigen::VectorXd K = kinetic_diag(q, R);
  const Eigen::MatrixXd M = cos2_matrix(dim);
  a.normalize();
  NewtonResult res;
  SphereEval ev = sphere_eval(a, K, p);
  for (int it = 0; it < max_iter && ev.gnorm >= tol; ++it) {
    Eigen::MatrixXd Hs = ev.v * M + 4.0 * ev.rho * ev.w * ev.w.transpose();
    Hs.diagonal() += K - Eigen::VectorXd::Constant(dim, ev.mu);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd B = Q.rightCols(dim - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B.transpose() * Hs * B);
    const Eigen::VectorXd gt = B.transpose() * ev.g;
    const double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim - 1);
    for (int k = 0; k < dim - 1; ++k) {
      const double lam = es.eigenvalues()[k];
      if (std::abs(lam) <= 1e-14 * lmax) continue;
      x -= es.eigenvectors().col(k) * (es.eigenvectors().col(k).dot(gt) / lam);
    }
    const Eigen::VectorXd delta = B * x;
    double alpha = 1.0;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      Eigen::VectorXd an = (a + alpha * delta).normalized();
      SphereEval en = sphere_eval(an, K, p);
      if (en.gnorm < ev.gnorm || ls == 29) {
        a = an;
        ev = en;
        break;
      }
    }
  }
  res.converged = ev.gnorm < tol;
  res.a = a;
  res.ev = ev;
  return res;
}

int band_of(double q, double v, double mu, int R) {
  const Eigen::VectorXd ev = bloch_spectrum(q, v, R, false).values;
  Eigen::Index k = 0;
  (ev.array() - mu).abs().minCoeff(&k);
  return static_cast<int>(k);
}

std::size_t count_at(double q, const SystemParams& p, int band) {
  return find_depths(BlochOverlap(q, band), p).size();
}

}  // namespace

const char* to_string(BranchLabel l) {
  switch (l) {
    case BranchLabel::lower: return "lower";
    case BranchLabel::middle: return "middle";
    case BranchLabel::upper: return "upper";
  }
  return "lower";
}

double energy_functional(double q, const Eigen::VectorXd& a, const SystemParams& p) {
  const int R = static_cast<int>(a.size() / 2);
  const Eigen::VectorXd K = kinetic_diag(q, R);
  const double kin = K.dot(a.cwiseAbs2());
  const double F = a.dot(cos2_apply(a));
  const double d = (p.delta_c - p.nu0() * F) / p.kappa;
  return p.n_atoms * kin - p.eta * p.eta / p.kappa * std::atan(d);
}

BranchEnergy energy_of_branch(const PhotonBranch& branch, const BlochState& state, const SystemParams& p) {
  BranchEnergy out;
  out.energy = reduced_energy(state, p);
  const int R = state.truncation;
  double kin = 0;
  for (int n = -R; n <= R; ++n) {
    const double k = state.q + 2.0 * n;
    kin += k * k * state.coeffs[n + R] * state.coeffs[n + R];
  }
  out.mu = kin + p.u0 * branch.n_ph * overlap_f(state);
  return out;
}

std::vector<Extremum> method1_extremize(double q, const SystemParams& p, int R, const Method1Options& opt) {
  require_valid(p);
  QuasiMomentum{q};
  if (R < 4) throw Error(ErrorKind::truncation, "method 1 needs R >= 4");
  const int dim = 2 * R + 1;
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<Eigen::VectorXd> seeds;
  for (const auto& b : find_branches(q, p, opt.band).branches) {
    Eigen::VectorXd a = solve_bloch_fixed(q, b.v, opt.band, R).coeffs;
    for (int i = 0; i < dim; ++i) a[i] += opt.seed_noise * gauss(rng);
    seeds.push_back(a);
  }
  for (int k = 0; k < opt.random_starts; ++k) {
    Eigen::VectorXd a(dim);
    for (int i = 0; i < dim; ++i) a[i] = gauss(rng);
    seeds.push_back(a);
  }

  std::vector<Extremum> out;
  for (const auto& s : seeds) {
    NewtonResult r = sphere_newton(s, q, p, opt.max_iter, opt.grad_tol);
    if (!r.converged) continue;
    Eigen::VectorXd a = r.a;
    Eigen::Index imax = 0;
    a.cwiseAbs().maxCoeff(&imax);
    if (a[imax] < 0) a = -a;
    bool dup = false;
    const double energy = energy_functional(q, a, p);
    const double n_ph = std::max(0.0, r.ev.v / p.u0);
    for (const auto& e : out) {
      if (std::abs(e.state.coeffs.dot(a)) > 1.0 - 1e-10) dup = true;
      // degenerate high bands: same energy and depth, different vector
      if (std::abs(e.energy - energy) <= 1e-10 * std::max(1.0, std::abs(energy)) &&
          std::abs(e.n_ph - n_ph) <= 1e-8 * std::max(1.0, n_ph))
        dup = true;
    }
    if (dup) continue;
    Extremum e;
    e.v = r.ev.v;
    e.n_ph = n_ph;
    e.mu = r.ev.mu;
    e.grad_norm = r.ev.gnorm;
    e.energy = energy;
    e.band = band_of(q, e.v, e.mu, R);
    e.state.q = q;
    e.state.band = e.band;
    e.state.v = e.v;
    e.state.coeffs = a;
    e.state.mu = e.mu;
    e.state.truncation = R;
    out.push_back(std::move(e));
  }
  if (out.empty()) throw Error(ErrorKind::extremization_failure, "no extremum converged");
  std::sort(out.begin(), out.end(), [](const Extremum& x, const Extremum& y) {
    return x.band != y.band ? x.band < y.band : x.n_ph < y.n_ph;
  });
  return out;
}

BandDiagram band_sweep(const SystemParams& p, int band, const std::vector<double>& q_grid, const Execution& ex,
                       const BandSweepOptions& opt) {
  require_valid(p);
  if (!std::is_sorted(q_grid.begin(), q_grid.end()))
    throw Error(ErrorKind::invalid_params, "q_grid: must be sorted");
  for (double q : q_grid) QuasiMomentum{q};
  BandDiagram dia;
  dia.params = p;
  dia.band = band;
  dia.q_grid = q_grid;
  auto sets = parallel_map(q_grid.size(), ex, [&](std::size_t i) { return find_branches(q_grid[i], p, band); });

  for (std::size_t i = 0; i < sets.size(); ++i) {
    dia.q_offsets.push_back(dia.points.size());
    const auto& br = sets[i].branches;
    std::vector<std::size_t> order(br.size());
    for (std::size_t k = 0; k < br.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return br[x].energy_total < br[y].energy_total; });
    std::vector<int> rank(br.size());
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
    for (std::size_t k = 0; k < br.size(); ++k) {
      BandPoint pt;
      pt.q = q_grid[i];
      pt.energy_total = br[k].energy_total;
      pt.energy_per_atom = br[k].energy_total / p.n_atoms;
      pt.n_ph = br[k].n_ph;
      pt.v = br[k].v;
      pt.mu = br[k].mu;
      const int rk = rank[k];
      pt.label = rk == 0 ? BranchLabel::lower
                         : (rk == static_cast<int>(br.size()) - 1 ? BranchLabel::upper : BranchLabel::middle);
      dia.points.push_back(pt);
    }
  }
  dia.q_offsets.push_back(dia.points.size());

  // continuation: greedy nearest pairs in (E/N, log(1+n_ph))
  for (std::size_t i = 0; i < q_grid.size(); ++i) {
    const std::size_t b = dia.q_offsets[i], e = dia.q_offsets[i + 1];
    if (i == 0) {
      for (std::size_t k = b; k < e; ++k) {
        dia.points[k].track = static_cast<int>(dia.tracks.size());
        dia.tracks.push_back({{k}, false});
      }
      continue;
    }
    const std::size_t pb = dia.q_offsets[i - 1], pe = b;
    struct Pair { double d; std::size_t prev, cur; };
    std::vector<Pair> pairs;
    for (std::size_t x = pb; x < pe; ++x)
      for (std::size_t y = b; y < e; ++y) {
        const double dE = dia.points[x].energy_per_atom - dia.points[y].energy_per_atom;
        const double dn = std::log1p(dia.points[x].n_ph) - std::log1p(dia.points[y].n_ph);
        pairs.push_back({std::hypot(dE, dn), x, y});
      }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& s, const Pair& t) {
      return s.d != t.d ? s.d < t.d : (s.prev != t.prev ? s.prev < t.prev : s.cur < t.cur);
    });
    std::vector<bool> used_prev(pe - pb, false);
    for (const auto& pr : pairs) {
      if (used_prev[pr.prev - pb] || dia.points[pr.cur].track >= 0) continue;
      used_prev[pr.prev - pb] = true;
      const int t = dia.points[pr.prev].track;
      dia.points[pr.cur].track = t;
      dia.tracks[t].points.push_back(pr.cur);
    }
    for (std::size_t k = b; k < e; ++k)
      if (dia.points[k].track < 0) {
        dia.points[k].track = static_cast<int>(dia.tracks.size());
        dia.tracks.push_back({{k}, false});
      }
  }
  const double q_first = q_grid.empty() ? 0 : q_grid.front(), q_last = q_grid.empty() ? 0 : q_grid.back();
  for (auto& t : dia.tracks) {
    for (std::size_t k : t.points)
      if (dia.points[k].q == q_first || dia.points[k].q == q_last) t.reaches_edge = true;
    for (std::size_t k : t.points) dia.points[k].detached = !t.reaches_edge;
  }

  if (opt.refine_endpoints) {
    for (std::size_t i = 0; i + 1 < q_grid.size(); ++i) {
      std::size_t ca = sets[i].count(), cb = sets[i + 1].count();
      if (ca == cb) continue;
      double a = q_grid[i], b = q_grid[i + 1];
      while (std::abs(b - a) > opt.endpoint_q_tol) {
        const double m = 0.5 * (a + b);
        if (count_at(m, p, band) == ca) a = m; else b = m;
      }
      const double q_more = ca > cb ? a : b;
      auto depths = find_depths(BlochOverlap(q_more, band), p);
      std::sort(depths.begin(), depths.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
      LoopEndpoint ep;
      ep.q = 0.5 * (a + b);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k + 1 < depths.size(); ++k) {
        const double n1 = depths[k] / p.u0, n2 = depths[k + 1] / p.u0;
        const double gap = std::abs(n2 - n1);
        if (gap / std::max(n1, n2) < best) {
          best = gap / std::max(n1, n2);
          ep.n_ph = 0.5 * (n1 + n2);
          ep.gap = gap;
        }
      }
      dia.endpoints.push_back(ep);
    }
  }
  return dia;
}

CrossValidation cross_validate(const std::vector<double>& q_grid, const SystemParams& p, int band,
                               const Execution& ex) {
  struct PerQ { double rel; std::size_t count; };
  auto res = parallel_map(q_grid.size(), ex, [&](std::size_t i) {
    const double q = q_grid[i];
    BranchSet m2 = find_branches(q, p, band);
    Method1Options mo;
    mo.band = band;
    std::vector<Extremum> m1;
    for (auto& e : method1_extremize(q, p, default_truncation, mo))
      if (e.band == band) m1.push_back(std::move(e));
    if (m1.size() != m2.count()) {
      std::ostringstream os;
      os << "branch count mismatch at q=" << q << ": method 1 found " << m1.size() << ", method 2 found "
         << m2.count();
      throw Error(ErrorKind::validation_failure, os.str());
    }
    double rel = 0;
    for (std::size_t k = 0; k < m1.size(); ++k) {
      const double e2 = m2.branches[k].energy_total;
      rel = std::max(rel, std::abs(m1[k].energy - e2) / std::max(1.0, std::abs(e2)));
    }
    return PerQ{rel, m2.count()};
  });
  CrossValidation cv;
  for (std::size_t i = 0; i < res.size(); ++i) {
    cv.counts.push_back(res[i].count);
    if (res[i].rel >= cv.max_rel_discrepancy) {
      cv.max_rel_discrepancy = res[i].rel;
      cv.worst_q = q_grid[i];
    }
  }
  return cv;
}

}  // namespace cavityband
