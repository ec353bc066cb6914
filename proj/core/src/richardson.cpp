#include "cavityband/richardson.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "cavityband/model.hpp"

namespace cavityband {
namespace {

// Central stencils on offsets -3..3; error series in even powers of h.
constexpr double kStencil[7][7] = {
    {0, 0, 0, 1, 0, 0, 0},
    {0, 0, -0.5, 0, 0.5, 0, 0},
    {0, 0, 1, -2, 1, 0, 0},
    {0, -0.5, 1, 0, -1, 0.5, 0},
    {0, 1, -4, 6, -4, 1, 0},
    {-0.5, 2, -2.5, 0, 2.5, -2, 0.5},
    {1, -6, 15, -20, 15, -6, 1},
};

double stencil_abs_sum(int k) {
  double s = 0;
  for (double c : kStencil[k]) s += std::abs(c);
  return s;
}

}  // namespace

DerivativeTower richardson_tower(const std::function<double(double)>& g, double x, int order,
                                 const RichardsonOptions& opt) {
  if (order < 0 || order > DerivativeTower::max_order)
    throw Error(ErrorKind::internal, "derivative order out of range");
  const int L = opt.levels;
  const int m = order <= 2 ? 1 : (order <= 4 ? 2 : 3);
  const double eps = std::numeric_limits<double>::epsilon();

  std::map<double, double> memo;
  auto eval = [&](double off) {
    auto it = memo.find(off);
    if (it != memo.end()) return it->second;
    double y = g(x + off);
    memo.emplace(off, y);
    return y;
  };

  DerivativeTower out;
  out.order = order;
  out.value = eval(0.0);
  out.d[0] = out.value;
  if (!std::isfinite(out.value))
    throw Error(ErrorKind::derivative_unavailable, "function not finite at expansion point");
  std::array<double, DerivativeTower::max_order + 1> best_err;
  best_err.fill(std::numeric_limits<double>::infinity());

  const double scale = std::max(1.0, std::abs(x));
  for (int c = 0; c < opt.candidates; ++c) {
    const double h0 = opt.h_min * scale * std::pow(opt.growth, c);
    if (opt.h_cap > 0 && h0 > opt.h_cap) break;
    // samples[l][j+3] = g(x + j*h_l)
    std::vector<std::array<double, 7>> samples(L);
    double fmax = std::abs(out.value);
    bool finite = true;
    for (int l = 0; l < L && finite; ++l) {
      const double h = h0 / std::ldexp(1.0, l);
      samples[l][3] = out.value;
      for (int j = 1; j <= m; ++j) {
        samples[l][3 + j] = eval(j * h);
        samples[l][3 - j] = eval(-j * h);
        fmax = std::max({fmax, std::abs(samples[l][3 + j]), std::abs(samples[l][3 - j])});
        finite = finite && std::isfinite(samples[l][3 + j]) && std::isfinite(samples[l][3 - j]);
      }
    }
    if (!finite) continue;
    for (int k = 1; k <= order; ++k) {
      std::vector<std::vector<double>> T(L, std::vector<double>(L, 0.0));
      for (int l = 0; l < L; ++l) {
        const double h = h0 / std::ldexp(1.0, l);
        double s = 0;
        for (int j = 0; j < 7; ++j) s += kStencil[k][j] * samples[l][j];
        T[l][0] = s / std::pow(h, k);
        for (int q = 1; q <= l; ++q) {
          const double r = std::pow(4.0, q);
          T[l][q] = T[l][q - 1] + (T[l][q - 1] - T[l - 1][q - 1]) / (r - 1.0);
        }
      }
      const double est = T[L - 1][L - 1];
      double e = std::abs(est - T[L - 1][L - 2]) + std::abs(est - T[L - 2][L - 2]);
      const double h_last = h0 / std::ldexp(1.0, L - 1);
      e += 4.0 * eps * stencil_abs_sum(k) * fmax / std::pow(h_last, k);
      if (std::isfinite(est) && e < best_err[k]) {
        best_err[k] = e;
        out.d[k] = est;
        out.err[k] = e;
      }
    }
  }
  for (int k = 1; k <= order; ++k)
    if (!std::isfinite(best_err[k]))
      throw Error(ErrorKind::derivative_unavailable, "no usable finite-difference step");
  return out;
}

}  // namespace cavityband
