#include "doctest.h"

#include <cmath>
#include <set>

#include "cavityband/bistability.hpp"
#include "oracles/kerr.hpp"

using namespace cavityband;

TEST_SUITE("bistability") {
  TEST_CASE("residual vanishes at both ends of the window") {
    SystemParams p{350, 1e4, 1, 0, 1500};
    auto w = eta_window(0.0, 1500, p);
    REQUIRE(w);
    CHECK(w->eta_1 < w->eta_2);
    for (double n : w->fold_n_ph) CHECK(std::abs(bistability_residual(n * p.u0, 1500, p, 0.0)) < 1e-6 * 350 * 350);
    CHECK_FALSE(eta_window(0.0, 4500, p));
  }

  TEST_CASE("Kerr oracle is a triple root of the shallow cubic") {
    const double kappa = 350, N = 1e4, U0 = 1;
    const auto k = oracle::kerr_critical(kappa, N, U0);
    ShallowOverlap sh;
    SystemParams p{kappa, N, U0, k.eta_0, k.delta_0};
    const double v0 = U0 * k.n_0;
    // G(v) = a^2 (v - v0)^3 with a = N U0 / 16
    const double a2 = std::pow(N * U0 / 16, 2);
    for (double dv : {-0.3, -0.1, 0.05, 0.2, 0.7})
      CHECK(state_function_G(v0 + dv, sh, p) == doctest::Approx(a2 * dv * dv * dv).epsilon(1e-8));
  }

  TEST_CASE("numeric critical point") {
    SystemParams p{350, 1e4, 1, 0, 0};
    auto c = critical_point_numeric(0.0, p, {3000, 5000});
    const auto k = oracle::kerr_critical(350, 1e4, 1);
    CHECK(c.delta_0 == doctest::Approx(k.delta_0).epsilon(0.01));
    CHECK(c.eta_cr == doctest::Approx(k.eta_0).epsilon(0.02));
    CHECK(c.n_0 == doctest::Approx(k.n_0).epsilon(0.02));
    CHECK(std::abs(c.residual) < 1e-8);
    CHECK(std::abs(c.residual_dv) < 1e-8);
  }

  TEST_CASE("shallow analytic law and the printed constant") {
    SystemParams p{350, 1e4, 1, 0, 0};
    const double d = eta_cr_analytic_shallow(0.0, p);
    CHECK(d == doctest::Approx(oracle::kerr_critical(350, 1e4, 1).eta_0).epsilon(1e-12));
    CHECK(eta_cr_analytic_shallow(0.0, p, AnalyticConstant::printed) == doctest::Approx(d / 4).epsilon(1e-12));
    CHECK(eta_cr_analytic_shallow(0.6, p) == doctest::Approx(d * 0.8).epsilon(1e-12));
  }

  TEST_CASE("small map has a crescent") {
    SystemParams p{350, 1e4, 1, 0, 0};
    std::vector<double> eta, dc;
    for (int i = 0; i < 12; ++i) eta.push_back(150 + 60.0 * i);
    for (int j = 0; j < 12; ++j) dc.push_back(1500 + 300.0 * j);
    auto m = bifurcation_map(0.0, p, eta, dc, 0, Execution{2});
    std::set<int> counts;
    for (auto& r : m.counts) counts.insert(r.begin(), r.end());
    CHECK(counts == std::set<int>{1, 3});
    CHECK_FALSE(m.folds.empty());
    REQUIRE_FALSE(m.markers.empty());
    CHECK(m.markers[0].kind == "cusp");
  }

  TEST_CASE("fold curves satisfy the residual") {
    SystemParams p{350, 1e4, 1, 0, 0};
    BlochOverlap model(0.0);
    auto curves = fold_curves(model, p, {0.8, 1.5, 3.0});
    for (const auto& c : curves)
      for (const auto& pt : c) CHECK(std::abs(bistability_residual(pt.v, pt.delta_c, p, model)) < 1e-6 * 350 * 350);
  }
}
