#include <doctest.h>
#include <rotorsim/product_basis.hpp>

#include "support.hpp"

using namespace rotorsim;

TEST_CASE("binomial handles the census sizes") {
  CHECK(binomial(5, 0) == 1);
  CHECK(binomial(6, 3) == 20);
  CHECK(binomial(10, 5) == 252);
  CHECK(binomial(11, 5) == 462);
}

TEST_CASE("six-rotor energy truncation keeps whole polyads") {
  const auto rotor = testing::confined_rotor();
  const auto basis = ProductBasis::energy_truncated(*rotor, 6, 154.0, 7);
  REQUIRE(basis.dimension() == 924);
  CHECK(basis.max_polyad() == 6);
  // a polyad with p quanta over 6 rotors has C(p+5, 5) configurations
  for (int p = 0; p <= 6; ++p) CHECK(basis.polyad_count(p) == binomial(p + 5, 5));
  CHECK(basis.cumulative_polyad_count(5) == 462);
  CHECK(basis.cumulative_polyad_count(6) == 924);

  // at this cutoff the energy rule and the polyad rule agree state by state
  const auto capped = ProductBasis::polyad_capped(*rotor, 6, 6, 7);
  REQUIRE(capped.dimension() == basis.dimension());
  for (int s = 0; s < basis.dimension(); ++s)
    for (int i = 0; i < 6; ++i) CHECK(basis.level(s, i) == capped.level(s, i));
}

TEST_CASE("states are sorted by zero-order energy with lexicographic ties") {
  const auto rotor = testing::confined_rotor(10);
  const auto basis = ProductBasis::polyad_capped(*rotor, 3, 4, 5);
  for (int s = 1; s < basis.dimension(); ++s) {
    const double prev = basis.zero_order_energy(s - 1);
    const double cur = basis.zero_order_energy(s);
    CHECK(prev <= cur);
    if (prev == cur) {
      bool less = false;
      for (int i = 0; i < 3; ++i) {
        if (basis.level(s - 1, i) != basis.level(s, i)) {
          less = basis.level(s - 1, i) < basis.level(s, i);
          break;
        }
      }
      CHECK(less);
    }
  }
}

TEST_CASE("find inverts the level tuples and rejects truncated ones") {
  const auto rotor = testing::confined_rotor(10);
  const auto basis = ProductBasis::polyad_capped(*rotor, 2, 3, 4);
  REQUIRE(basis.dimension() == 10);
  for (int s = 0; s < basis.dimension(); ++s) CHECK(basis.find(basis.levels(s)) == s);
  const std::uint8_t gone[2] = {3, 3};  // polyad 6, truncated away
  CHECK(basis.find(gone) == -1);
}

TEST_CASE("zero-order energies are the level sums") {
  const auto rotor = testing::confined_rotor(10);
  const auto basis = ProductBasis::polyad_capped(*rotor, 2, 3, 4);
  for (int s = 0; s < basis.dimension(); ++s) {
    double sum = 0.0;
    int polyad = 0;
    for (int i = 0; i < 2; ++i) {
      sum += rotor->energy(basis.level(s, i));
      polyad += basis.level(s, i);
    }
    CHECK(basis.zero_order_energy(s) == doctest::Approx(sum).epsilon(1e-14));
    CHECK(basis.polyad(s) == polyad);
  }
}

TEST_CASE("level cap truncates even when the energy cutoff would not") {
  const auto rotor = testing::confined_rotor(10);
  const auto basis = ProductBasis::energy_truncated(*rotor, 1, 1e6, 3);
  CHECK(basis.dimension() == 3);
  for (int s = 0; s < basis.dimension(); ++s) CHECK(basis.level(s, 0) < 3);
}
