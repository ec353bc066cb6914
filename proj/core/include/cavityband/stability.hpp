#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cavityband/band.hpp"
#include "cavityband/bloch.hpp"
#include "cavityband/photon.hpp"

namespace cavityband {

// Second variation of the per-atom grand potential around a steady state,
// acting on (delta psi, delta psi*) in plane waves n = -J..J.
struct StabilityMatrix {
  Eigen::MatrixXd A;
  Eigen::VectorXd a;  // steady state restricted to the window, renormalised
  Eigen::VectorXd w;  // cos^2 applied to the full state, restricted
  double rho = 0;
  double mu = 0;
  int J = 0;
};

// J < 0 picks state.truncation - 4.
StabilityMatrix build_stability_matrix(const PhotonBranch& branch, const BlochState& state, const SystemParams& p,
                                       int J = -1);

struct StabilityReport {
  double q = 0;
  std::size_t branch = 0;  // index in its branch set or band diagram
  double n_ph = 0;
  double energy_total = 0;
  int J = 0;
  double min_eig_A = 0;        // number-conserving subspace
  double min_eig_A_full = 0;   // whole space
  double max_abs_imag = 0;     // of sigma_z A on the same subspace
  double tolerance = 0;
  bool energetically_stable = false;
  bool dynamically_stable = false;
  bool stable_energy_unstable_dynamics = false;  // should never happen
};

// The Bloch state is re-solved with truncation starting at R0.
StabilityReport classify_branch(double q, const PhotonBranch& branch, const SystemParams& p, int band = 0,
                                int J = -1, int R0 = default_truncation);

struct BranchStability {
  std::vector<StabilityReport> reports;  // same order as the branch set
  int stable_count = 0;
  std::string note;  // "paper-anticipated" on five-branch (tristable) sets
};

BranchStability classify_branches(const BranchSet& set, int J = -1, const Execution& ex = {},
                                  int R0 = default_truncation);

// One report per band point, in diagram order.
std::vector<StabilityReport> classify_band(const BandDiagram& diagram, int J = -1, const Execution& ex = {},
                                           int R0 = default_truncation);

}  // namespace cavityband
