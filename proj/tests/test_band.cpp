#include "doctest.h"

#include <cmath>

#include "cavityband/band.hpp"
#include "oracles/free_particle.hpp"

using namespace cavityband;

TEST_SUITE("band") {
  TEST_CASE("energy of a branch equals the functional on its state") {
    SystemParams p{350, 1e4, 1, 909.9, 3140};
    auto bs = find_branches(0.0, p);
    for (const auto& b : bs.branches) {
      auto st = solve_bloch(0.0, b.v);
      auto e = energy_of_branch(b, st, p);
      CHECK(e.energy == doctest::Approx(energy_functional(0.0, st.coeffs, p)).epsilon(1e-12));
      CHECK(e.mu == doctest::Approx(st.mu).epsilon(1e-10));
    }
  }

  TEST_CASE("method 1 stationary points are self-consistent") {
    SystemParams p{350, 1e4, 1, 909.9, 3140};
    std::vector<Extremum> ext;
    for (auto& e : method1_extremize(0.0, p))
      if (e.band == 0) ext.push_back(e);
    REQUIRE(ext.size() == 3);
    for (const auto& e : ext) {
      CHECK(e.grad_norm < 1e-8);
      CHECK(std::abs(state_function_G(e.v, 0.0, p)) < 1e-6 * p.eta * p.eta);
    }
  }

  TEST_CASE("free band") {
    SystemParams p{350, 1e4, 1, 0, 3140};
    std::vector<double> q;
    for (int i = 0; i <= 10; ++i) q.push_back(-1 + 0.2 * i);
    auto d = band_sweep(p, 0, q);
    REQUIRE(d.points.size() == q.size());
    for (const auto& pt : d.points) CHECK(pt.energy_per_atom == doctest::Approx(oracle::free_band_energy(pt.q)));
    CHECK(d.endpoints.empty());
  }

  TEST_CASE("loop diagram structure") {
    SystemParams p{350, 1e4, 1, 909.9, 3140};
    std::vector<double> q;
    for (int i = 0; i <= 20; ++i) q.push_back(-1 + 0.1 * i);
    auto d = band_sweep(p, 0, q, Execution{2});
    int detached = 0;
    for (const auto& t : d.tracks) detached += !t.reaches_edge;
    CHECK(detached == 2);
    REQUIRE(d.endpoints.size() == 2);
    CHECK(d.endpoints[0].q == doctest::Approx(-d.endpoints[1].q));
    for (std::size_t i = 0; i + 1 < d.q_offsets.size(); ++i) {
      const auto n = d.q_offsets[i + 1] - d.q_offsets[i];
      CHECK((n == 1 || n == 3));
    }
  }

  TEST_CASE("labels") {
    CHECK(std::string(to_string(BranchLabel::middle)) == "middle");
  }
}
