#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "cavityband/model.hpp"

using namespace cavityband;

TEST_SUITE("model") {
  TEST_CASE("valid parameters pass") {
    SystemParams p{350, 1e4, 1, 909.9, 3140};
    CHECK(validate_params(p).empty());
    CHECK(p.n_max() == doctest::Approx(909.9 * 909.9 / (350.0 * 350.0)));
    CHECK(p.nu0() == 1e4);
  }

  TEST_CASE("every violation is listed by field") {
    SystemParams p{0, 0.5, 0, -1, 0};
    auto errs = validate_params(p);
    std::vector<std::string> fields;
    for (auto& e : errs) fields.push_back(e.field);
    CHECK(std::find(fields.begin(), fields.end(), "kappa") != fields.end());
    CHECK(std::find(fields.begin(), fields.end(), "n_atoms") != fields.end());
    CHECK(std::find(fields.begin(), fields.end(), "u0") != fields.end());
    CHECK(std::find(fields.begin(), fields.end(), "eta") != fields.end());
    try {
      require_valid(p);
      FAIL("expected invalid_params");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::invalid_params);
    }
  }

  TEST_CASE("quasi-momentum range") {
    CHECK(QuasiMomentum(1.0).value() == 1.0);
    CHECK(QuasiMomentum(-1.0).value() == -1.0);
    CHECK_THROWS_AS(QuasiMomentum(1.0000001), Error);
    CHECK_THROWS_AS(QuasiMomentum(std::nan("")), Error);
  }

  TEST_CASE("photon number from depth") {
    SystemParams p{350, 1e4, 1, 0, 0};
    CHECK(n_ph_from_depth({0.0}, p) == 0.0);
    CHECK(n_ph_from_depth({4.13}, p) == doctest::Approx(4.13));
    p.u0 = -1;
    CHECK(n_ph_from_depth({-7.5}, p) == doctest::Approx(7.5));
    try {
      n_ph_from_depth({7.5}, p);
      FAIL("expected inconsistent_sign");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::inconsistent_sign);
    }
  }
}
