#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cavityband/catastrophe.hpp"
#include "cavityband/photon.hpp"
#include "oracles/kerr.hpp"

using namespace cavityband;

TEST_SUITE("catastrophe") {
  TEST_CASE("uncertain arithmetic") {
    Uncertain a{2, 0.1}, b{4, 0.2};
    auto s = a + b;
    CHECK(s.value == 6);
    CHECK(s.error == doctest::Approx(0.3));
    auto d = a - b;
    CHECK(d.error == doctest::Approx(0.3));
    auto m = a * b;
    CHECK(m.value == 8);
    CHECK(m.error == doctest::Approx(2 * 0.2 + 4 * 0.1));
    auto q = a / b;
    CHECK(q.value == 0.5);
    CHECK(q.error == doctest::Approx((0.1 + 0.5 * 0.2) / 4));
    CHECK((-3.0 * a).error == doctest::Approx(0.3));
  }

  TEST_CASE("cusp coordinates vanish at the Kerr point") {
    const auto k = oracle::kerr_critical(350, 1e4, 1);
    SystemParams p{350, 1e4, 1, k.eta_0, k.delta_0};
    auto c = cusp_reduce_shallow(p);
    const double scale = c.b1 * c.b1;
    CHECK(std::abs(c.c1) < 1e-9 * scale);
    CHECK(std::abs(c.c2) < 1e-9 * scale * std::abs(c.b1));
  }

  TEST_CASE("cubic roots match the shallow branch scan") {
    SystemParams p{350, 1e4, 1, 900, 3600};
    auto c = cusp_reduce_shallow(p);
    auto roots = c.real_roots();
    std::sort(roots.begin(), roots.end());
    ShallowOverlap sh;
    auto bs = find_branches(sh, 0.0, p);
    REQUIRE(roots.size() == bs.count());
    for (std::size_t i = 0; i < roots.size(); ++i) CHECK(roots[i] == doctest::Approx(bs.branches[i].v).epsilon(1e-6));
  }

  TEST_CASE("two points at q = 0.69") {
    auto pts = swallowtail_scan(0.69);
    REQUIRE(pts.size() == 2);
    const auto& pt = pts[1];
    CHECK(pt.v == doctest::Approx(7.75).epsilon(0.01));
    CHECK(std::abs(pt.residual3.value) <= std::max(3 * pt.residual3.error, 1e-8));
    auto bf = butterfly_check(pt);
    CHECK(bf.verdict == ButterflyVerdict::no_butterfly);
    auto tr = transversality_rank_check(pt);
    CHECK(tr.rank == 4);
    CHECK(transversality_rank_check(pt, true).rank == 3);
  }

  TEST_CASE("scaled coordinates do not depend on the atom number") {
    SwallowtailScanOptions a, b;
    b.n_atoms = 1e4;
    b.kappa = 350;
    auto pa = swallowtail_scan(0.7, a);
    auto pb = swallowtail_scan(0.7, b);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
      CHECK(pa[i].v == doctest::Approx(pb[i].v).epsilon(1e-12));
      CHECK(pa[i].delta_over_NU0 == doctest::Approx(pb[i].delta_over_NU0).epsilon(1e-12));
      auto m = map_swallowtail(pa[i], 1e4, 350);
      CHECK(m.u0 == doctest::Approx(pb[i].u0).epsilon(1e-12));
      CHECK(m.delta_c == doctest::Approx(pb[i].delta_c).epsilon(1e-12));
      CHECK(m.eta == doctest::Approx(pb[i].eta).epsilon(1e-12));
    }
  }

  TEST_CASE("mapped parameters put a triple root at the point") {
    auto pts = swallowtail_scan(0.69);
    REQUIRE_FALSE(pts.empty());
    const auto p = swallowtail_params(pts.back());
    BlochOverlap model(0.69);
    const double scale = p.eta * p.eta * std::abs(p.u0);
    CHECK(std::abs(state_function_G(pts.back().v, model, p)) < 1e-6 * scale);
  }

  TEST_CASE("no point below the threshold momentum") {
    CHECK(swallowtail_scan(0.5).empty());
    CHECK_FALSE(swallowtail_scan(0.6).empty());
  }

  TEST_CASE("a quintic overlap has a vanishing fourth residual") {
    // chosen so the state function is (v - 1)^5 after the scaling
    FunctionOverlap fo([](double v) { return 1.0 - std::sqrt((2.0 - v + 0.01 * std::pow(v - 1.0, 5)) / v); });
    SwallowtailPoint pt;
    pt.q = 0;
    pt.v = 1.0;
    auto r = butterfly_check(pt, fo);
    CHECK(r.verdict == ButterflyVerdict::vanishing);
    CHECK(std::string(to_string(ButterflyVerdict::no_butterfly)) == "no_butterfly");
  }
}
