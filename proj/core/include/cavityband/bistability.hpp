#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cavityband/bloch.hpp"
#include "cavityband/parallel.hpp"
#include "cavityband/photon.hpp"

namespace cavityband {

// kappa^2 + D^2 - 2 v D N U0 f'(v), D = delta_c - N U0 f(v).
// Vanishes at the turning points of the input-output curve.
double bistability_residual(double v, double delta_c, const SystemParams& p, const OverlapModel& model);
double bistability_residual(double v, double delta_c, const SystemParams& p, double q, int band = 0);

struct CriticalPoint {
  double q = 0;
  double delta_0 = 0;
  double eta_cr = 0;
  double n_0 = 0;
  double v_0 = 0;
  double residual = 0;     // Eq. residual / kappa^2 at the solution
  double residual_dv = 0;  // its v-derivative / kappa^2
  int iterations = 0;
};

struct CriticalSearch {
  double delta_lo = 0;
  double delta_hi = 0;
  double v_lo = 1e-4;
  double v_hi = 20.0;
  int delta_points = 80;
  int v_points = 400;
};

// Eta in p is ignored.
CriticalPoint critical_point_numeric(double q, const SystemParams& p, const CriticalSearch& search, int band = 0);
CriticalPoint critical_point_numeric(const OverlapModel& model, double q, const SystemParams& p,
                                     const CriticalSearch& search);

struct EtaWindow {
  double eta_1 = 0;
  double eta_2 = 0;
  std::vector<double> fold_eta;   // all turning points, ascending v
  std::vector<double> fold_n_ph;
};

struct WindowOptions {
  double v_lo = 1e-4;
  double v_hi = 50.0;
  int v_points = 2000;
};

std::optional<EtaWindow> eta_window(double q, double delta_c, const SystemParams& p, int band = 0,
                                    const WindowOptions& opt = {});

enum class AnalyticConstant { derivation, printed };

// C sqrt(kappa^3 (1 - q^2) / (3 sqrt3 N U0^2)), C = sqrt(128) or sqrt(8).
double eta_cr_analytic_shallow(double q, const SystemParams& p, AnalyticConstant c = AnalyticConstant::derivation);

struct FoldPolyline {
  double level = 0;                               // count threshold crossed (2 or 4)
  std::vector<std::pair<double, double>> points;  // (delta_c, eta)
};

struct MapMarker {
  std::string kind;  // "cusp"
  double delta_c = 0;
  double eta = 0;
  double v = 0;
};

struct BifurcationMap {
  double q = 0;
  std::vector<double> eta_grid;
  std::vector<double> delta_grid;
  std::vector<std::vector<int>> counts;  // counts[i][j]: eta_grid[i], delta_grid[j]
  std::vector<FoldPolyline> folds;
  std::vector<MapMarker> markers;
};

// Eta and delta_c in p are ignored.
BifurcationMap bifurcation_map(double q, const SystemParams& p, const std::vector<double>& eta_grid,
                               const std::vector<double>& delta_grid, int band = 0, const Execution& ex = {});

// Fold curve of the state equation parametrised by depth: for each v the
// two detunings where v is a turning point, and the matching pump.
struct FoldCurvePoint {
  double v = 0;
  double delta_c = 0;
  double eta = 0;
};
std::vector<std::vector<FoldCurvePoint>> fold_curves(const OverlapModel& model, const SystemParams& p,
                                                      const std::vector<double>& v_grid);

}  // namespace cavityband
