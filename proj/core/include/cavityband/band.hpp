#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cavityband/bloch.hpp"
#include "cavityband/parallel.hpp"
#include "cavityband/photon.hpp"

namespace cavityband {

struct BranchEnergy {
  double energy = 0;  // total, E_R
  double mu = 0;      // chemical potential, E_R
};

BranchEnergy energy_of_branch(const PhotonBranch& branch, const BlochState& state, const SystemParams& p);

// Reduced energy functional on an arbitrary normalised coefficient vector.
double energy_functional(double q, const Eigen::VectorXd& a, const SystemParams& p);

struct Extremum {
  double energy = 0;
  double n_ph = 0;
  double v = 0;
  double mu = 0;
  int band = 0;  // band whose self-consistent eigenvector this is
  double grad_norm = 0;
  BlochState state;
};

struct Method1Options {
  int random_starts = 8;
  double seed_noise = 1e-3;
  std::uint64_t seed = 20240611;
  int max_iter = 100;
  double grad_tol = 1e-9;
  int band = 0;  // band of the method-2 seeds
};

// Stationary points of the reduced energy on the unit sphere in R^(2R+1),
// found by projected Newton iterations with renormalisation every step.
std::vector<Extremum> method1_extremize(double q, const SystemParams& p, int R = default_truncation,
                                        const Method1Options& opt = {});

enum class BranchLabel { lower, middle, upper };
const char* to_string(BranchLabel l);

struct BandPoint {
  double q = 0;
  BranchLabel label = BranchLabel::lower;
  bool detached = false;
  int track = -1;
  double energy_total = 0;
  double energy_per_atom = 0;
  double n_ph = 0;
  double v = 0;
  double mu = 0;
};

struct BandTrack {
  std::vector<std::size_t> points;  // indices into BandDiagram::points, ascending q
  bool reaches_edge = false;
};

// Place where two branches coalesce between two grid points.
struct LoopEndpoint {
  double q = 0;
  double n_ph = 0;  // midpoint of the coalescing pair
  double gap = 0;   // their remaining n_ph separation
};

struct BandDiagram {
  SystemParams params;
  int band = 0;
  std::vector<double> q_grid;
  std::vector<BandPoint> points;           // grouped by q, ascending n_ph within a q
  std::vector<std::size_t> q_offsets;      // points of q_grid[i] are [q_offsets[i], q_offsets[i+1])
  std::vector<BandTrack> tracks;
  std::vector<LoopEndpoint> endpoints;
};

struct BandSweepOptions {
  bool refine_endpoints = true;
  double endpoint_q_tol = 1e-10;
};

BandDiagram band_sweep(const SystemParams& p, int band, const std::vector<double>& q_grid,
                       const Execution& ex = {}, const BandSweepOptions& opt = {});

struct CrossValidation {
  double max_rel_discrepancy = 0;
  double worst_q = 0;
  std::vector<std::size_t> counts;  // per q
};

// Method 1 vs method 2 on every grid point.
CrossValidation cross_validate(const std::vector<double>& q_grid, const SystemParams& p, int band = 0,
                               const Execution& ex = {});

}  // namespace cavityband
