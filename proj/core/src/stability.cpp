#include "cavityband/stability.hpp"

#include <cmath>

namespace cavityband {

namespace {

Eigen::VectorXd cos2(const Eigen::VectorXd& a) {
  const Eigen::Index n = a.size();
  Eigen::VectorXd out = 0.5 * a;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    out[i] += 0.25 * a[i + 1];
    out[i + 1] += 0.25 * a[i];
  }
  return out;
}

// Orthonormal basis of the complement of u.
Eigen::MatrixXd complement(const Eigen::VectorXd& u) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(u);
  Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(u.size() - 1);
}

}  // namespace

StabilityMatrix build_stability_matrix(const PhotonBranch& branch, const BlochState& state, const SystemParams& p,
                                       int J) {
  const int R = state.truncation;
  if (J < 0) J = R - 4;
  if (J < 1 || J >= R)
    throw Error(ErrorKind::truncation, "stability window J must satisfy 1 <= J < R");

  const int dim = 2 * J + 1;
  const int off = R - J;
  const Eigen::VectorXd w_full = cos2(state.coeffs);
  const double F = state.coeffs.dot(w_full);
  const double d = (p.delta_c - p.nu0() * F) / p.kappa;
  const double k3 = p.kappa * p.kappa * p.kappa;

  StabilityMatrix s;
  s.J = J;
  s.mu = state.mu;
  s.rho = p.eta * p.eta * p.n_atoms * p.u0 * p.u0 * d / (k3 * (1.0 + d * d) * (1.0 + d * d));
  s.w = w_full.segment(off, dim);
  s.a = state.coeffs.segment(off, dim).normalized();

  Eigen::MatrixXd h = build_hamiltonian(state.q, branch.v, J);
  h.diagonal().array() -= state.mu;
  const Eigen::MatrixXd W = 2.0 * s.rho * s.w * s.w.transpose();
  s.A.resize(2 * dim, 2 * dim);
  s.A.topLeftCorner(dim, dim) = h + W;
  s.A.bottomRightCorner(dim, dim) = h + W;
  s.A.topRightCorner(dim, dim) = W;
  s.A.bottomLeftCorner(dim, dim) = W;
  return s;
}

StabilityReport classify_branch(double q, const PhotonBranch& branch, const SystemParams& p, int band, int J,
                                int R0) {
  const BlochState state = solve_bloch(q, branch.v, band, R0);
  const StabilityMatrix m = build_stability_matrix(branch, state, p, J);
  const int dim = 2 * m.J + 1;

  StabilityReport r;
  r.q = q;
  r.n_ph = branch.n_ph;
  r.energy_total = branch.energy_total;
  r.J = m.J;
  r.tolerance = 1e-8 * m.A.norm();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(m.A, Eigen::EigenvaluesOnly);
  r.min_eig_A_full = full.eigenvalues()[0];

  // number-conserving fluctuations b with b . a = 0 in both components
  const Eigen::MatrixXd B0 = complement(m.a);
  const int k = dim - 1;
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * dim, 2 * k);
  B.topLeftCorner(dim, k) = B0;
  B.bottomRightCorner(dim, k) = B0;
  const Eigen::MatrixXd Ap = B.transpose() * m.A * B;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> proj(Ap, Eigen::EigenvaluesOnly);
  r.min_eig_A = proj.eigenvalues()[0];

  Eigen::MatrixXd sA = Ap;
  sA.bottomRows(k) *= -1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> dyn(sA, false);
  r.max_abs_imag = dyn.eigenvalues().imag().cwiseAbs().maxCoeff();

  r.energetically_stable = r.min_eig_A >= -r.tolerance;
  r.dynamically_stable = r.max_abs_imag <= r.tolerance;
  r.stable_energy_unstable_dynamics = r.energetically_stable && !r.dynamically_stable;
  return r;
}

BranchStability classify_branches(const BranchSet& set, int J, const Execution& ex, int R0) {
  BranchStability out;
  out.reports = parallel_map(set.count(), ex, [&](std::size_t i) {
    StabilityReport r = classify_branch(set.q, set.branches[i], set.params, set.band, J, R0);
    r.branch = i;
    return r;
  });
  for (const auto& r : out.reports)
    if (r.energetically_stable && r.dynamically_stable) ++out.stable_count;
  if (set.count() == 5) out.note = "paper-anticipated";
  return out;
}

std::vector<StabilityReport> classify_band(const BandDiagram& diagram, int J, const Execution& ex, int R0) {
  return parallel_map(diagram.points.size(), ex, [&](std::size_t i) {
    const BandPoint& pt = diagram.points[i];
    PhotonBranch b;
    b.n_ph = pt.n_ph;
    b.v = pt.v;
    b.mu = pt.mu;
    b.energy_total = pt.energy_total;
    StabilityReport r = classify_branch(pt.q, b, diagram.params, diagram.band, J, R0);
    r.branch = i;
    return r;
  });
}

}  // namespace cavityband
