#include "doctest.h"

#include <cmath>

#include "cavityband/photon.hpp"

using namespace cavityband;

namespace {
SystemParams loop_params() { return {350, 1e4, 1, 909.9, 3140}; }
}

TEST_SUITE("photon") {
  TEST_CASE("roots satisfy the state equation") {
    const auto p = loop_params();
    for (double q : {0.0, 0.6, 1.0}) {
      auto bs = find_branches(q, p);
      REQUIRE(bs.count() >= 1);
      for (const auto& b : bs.branches) {
        CHECK(b.n_ph >= 0);
        CHECK(b.n_ph <= p.n_max() * (1 + 1e-9));
        const double scale = p.eta * p.eta * p.u0;
        CHECK(std::abs(state_function_G(b.v, q, p)) < 1e-9 * scale);
      }
      for (std::size_t i = 1; i < bs.count(); ++i) CHECK(bs.branches[i].n_ph > bs.branches[i - 1].n_ph);
    }
  }

  TEST_CASE("three branches at the zone centre, one at the edge") {
    const auto p = loop_params();
    CHECK(find_branches(0.0, p).count() == 3);
    CHECK(find_branches(1.0, p).count() == 1);
    auto a = p;
    a.delta_c = 1350;
    CHECK(find_branches(0.0, a).count() == 1);
  }

  TEST_CASE("no pump, no photons") {
    auto p = loop_params();
    p.eta = 0;
    auto bs = find_branches(0.3, p);
    REQUIRE(bs.count() == 1);
    CHECK(bs.branches[0].n_ph == 0.0);
  }

  TEST_CASE("linear cavity gives a Lorentzian") {
    SystemParams p{350, 1e4, 1, 50, 0};
    FrozenOverlap fr(0.5);
    for (double dc : {4000.0, 5000.0, 5350.0, 7000.0}) {
      p.delta_c = dc;
      auto bs = find_branches(fr, 0.0, p);
      REQUIRE(bs.count() == 1);
      const double d = (dc - 5000.0) / 350.0;
      CHECK(bs.branches[0].n_ph == doctest::Approx(p.n_max() / (1 + d * d)).epsilon(1e-9));
    }
  }

  TEST_CASE("shared overlap table reproduces the direct scan") {
    const auto p = loop_params();
    auto table = make_overlap_table(0.0, 0, p.u0 * p.n_max() * 1.01, 4000);
    auto a = find_depths(table, p);
    auto b = find_branches(0.0, p);
    REQUIRE(a.size() == b.count());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b.branches[i].v).epsilon(1e-6));
  }

  TEST_CASE("red-detuned route") {
    SystemParams p{350, 1e4, -1, 909.9, -7400};
    auto bs = find_branches_red_detuned(0.0, p);
    REQUIRE(bs.count() >= 1);
    for (const auto& b : bs.branches) {
      CHECK(b.v <= 0);
      CHECK(b.n_ph == doctest::Approx(-b.v));
    }
    CHECK_THROWS_AS(find_branches_red_detuned(0.0, loop_params()), Error);
  }

  TEST_CASE("lineshape and hysteresis") {
    SystemParams p{350, 1e4, 1, 3.5 * 325, 0};
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(2000 + 100.0 * i);
    auto ls = lineshape_sweep(p, 0.0, 0, grid, Execution{2});
    std::size_t folded = 0;
    for (const auto& s : ls.sets) folded += s.count() == 3;
    CHECK(folded > 0);
    bool differ = false;
    for (std::size_t i = 0; i < grid.size(); ++i) differ |= ls.trace_up[i] != ls.trace_down[i];
    CHECK(differ);

    p.eta = 0.5 * 325;
    auto thin = lineshape_sweep(p, 0.0, 0, grid);
    for (const auto& s : thin.sets) CHECK(s.count() == 1);
  }

  TEST_CASE("input-output curve") {
    SystemParams p{350, 1e4, 1, 0, 1500};
    std::vector<double> n;
    for (int i = 0; i <= 400; ++i) n.push_back(0.05 * i);
    auto io = input_output_curve(p, 0.0, 0, n);
    int turns = 0;
    for (std::size_t i = 2; i < io.size(); ++i)
      turns += (io[i].n_max - io[i - 1].n_max) * (io[i - 1].n_max - io[i - 2].n_max) < 0;
    CHECK(turns == 2);

    auto lin = input_output_curve(p, FrozenOverlap(0.5), n);
    for (std::size_t i = 1; i < lin.size(); ++i) CHECK(lin[i].n_max > lin[i - 1].n_max);
  }
}
