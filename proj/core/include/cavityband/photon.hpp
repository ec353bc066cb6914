#pragma once

#include <vector>

#include "cavityband/bloch.hpp"
#include "cavityband/model.hpp"
#include "cavityband/parallel.hpp"

namespace cavityband {

struct PhotonBranch {
  double n_ph = 0;
  double v = 0;
  double f = 0.5;
  double mu = 0;
  double energy_total = 0;
  double phase = 0;  // arctan((delta_c - N U0 f) / kappa)
};

struct BranchSet {
  double q = 0;
  SystemParams params;
  int band = 0;
  std::vector<PhotonBranch> branches;  // ascending n_ph
  std::size_t count() const { return branches.size(); }
};

struct ScanOptions {
  int grid_points = 4000;
  int refine_factor = 32;
};

// f(v) sampled on a uniform grid from 0 to v_end, shared by many scans
// with the same q (bifurcation maps).
struct OverlapTable {
  double q = 0;
  int band = 0;
  std::vector<double> v;
  std::vector<double> f;
};

OverlapTable make_overlap_table(double q, int band, double v_end, int points, const Execution& ex = {});

// E = N sum_n (q+2n)^2 a_n^2 - (eta^2/kappa) arctan((delta_c - N U0 f)/kappa)
double reduced_energy(const BlochState& s, const SystemParams& p);

// G(v) = v kappa^2 + v (delta_c - N U0 f)^2 - eta^2 U0
double state_function_G(double v, const OverlapModel& model, const SystemParams& p);
double state_function_G(double v, double q, const SystemParams& p, int band = 0);

// Self-consistent depths v (ascending |v|).
std::vector<double> find_depths(const OverlapModel& model, const SystemParams& p, const ScanOptions& opt = {});
std::vector<double> find_depths(const OverlapTable& table, const SystemParams& p, const ScanOptions& opt = {});

BranchSet find_branches(double q, const SystemParams& p, int band = 0, const ScanOptions& opt = {});
BranchSet find_branches(const OverlapModel& model, double q, const SystemParams& p, int band = 0,
                        const ScanOptions& opt = {});

// u0 < 0 through f(-w, q) = 1 - f(w, q): the scan runs over w = |U0| n_ph
// using the positive-depth overlap only.
BranchSet find_branches_red_detuned(double q, const SystemParams& p, int band = 0, const ScanOptions& opt = {});

PhotonBranch make_branch(double v, const OverlapModel& model, const SystemParams& p);

struct Lineshape {
  std::vector<double> delta_c;
  std::vector<BranchSet> sets;
  std::vector<double> trace_up;    // n_ph followed with increasing delta_c
  std::vector<double> trace_down;  // n_ph followed with decreasing delta_c
};

Lineshape lineshape_sweep(const SystemParams& p, double q, int band, const std::vector<double>& delta_grid,
                          const Execution& ex = {});

// Hysteresis traces for an already computed table of branch sets.
void hysteresis_traces(Lineshape& ls);

struct InputOutputPoint {
  double n_ph = 0;
  double n_max = 0;
  double f = 0.5;
};

std::vector<InputOutputPoint> input_output_curve(const SystemParams& p, const OverlapModel& model,
                                                 const std::vector<double>& n_ph_grid);
std::vector<InputOutputPoint> input_output_curve(const SystemParams& p, double q, int band,
                                                 const std::vector<double>& n_ph_grid);

}  // namespace cavityband
