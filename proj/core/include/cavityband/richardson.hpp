#pragma once

#include <array>
#include <functional>

namespace cavityband {

// Derivative tower of a scalar function of one variable by central
// differences and Richardson extrapolation.
struct DerivativeTower {
  static constexpr int max_order = 6;
  double value = 0.0;
  std::array<double, max_order + 1> d{};    // d[k] = k-th derivative, d[0] = value
  std::array<double, max_order + 1> err{};  // error estimates, err[0] = 0
  int order = 0;
};

struct RichardsonOptions {
  double h_min = 1e-3;   // smallest base step, scaled by max(1, |x|)
  double growth = 4.0;   // ratio between candidate base steps
  int candidates = 6;
  int levels = 4;        // rows of the extrapolation tableau
  double h_cap = 0.0;    // if > 0, no candidate base step exceeds this
};

// Differentiates g up to `order` (1..6) at x. For every order the candidate
// base step with the smallest tableau error is kept.
DerivativeTower richardson_tower(const std::function<double(double)>& g, double x, int order,
                                 const RichardsonOptions& opt = {});

}  // namespace cavityband
