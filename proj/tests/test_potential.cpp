#include <cmath>

#include <doctest.h>
#include <rotorsim/random_potential.hpp>
#include <rotorsim/units.hpp>

using namespace rotorsim;

TEST_CASE("trigonometric interpolation passes through the mean-free nodes") {
  // dropping l = 0 subtracts the node mean; at the nodes themselves the
  // interpolation must reproduce the shifted draws exactly
  const auto pot = RandomPotential::generate(100, 1.0, 31);
  const auto& nodes = pot.node_values();
  REQUIRE(static_cast<int>(nodes.size()) == 201);
  double mean = 0.0;
  for (double v : nodes) mean += v;
  mean /= nodes.size();
  for (int k = 0; k < 201; ++k) {
    const double theta = two_pi * k / 201.0;
    CHECK(std::abs(pot.value(theta) - (nodes[k] - mean)) < 1e-10);
  }
}

TEST_CASE("components obey conjugate symmetry and have no mean term") {
  const auto pot = RandomPotential::generate(12, 2.0, 7);
  CHECK(pot.component(0) == Complex{0.0, 0.0});
  for (int l = 1; l <= 12; ++l)
    CHECK(std::abs(pot.component(-l) - std::conj(pot.component(l))) < 1e-15);
  // the imaginary residue of the full sum stays at rounding level
  for (double q : {0.1, 1.3, 4.4})
    CHECK(std::abs(pot.value_complex(q).imag()) < 1e-12);
}

TEST_CASE("node draws carry the requested variance") {
  // average the sample variance over many realizations; the relative
  // standard error of the estimate is sqrt(2 / (201 * 50)) ~ 1.4%
  const double sigma = 1.7;
  double acc = 0.0;
  const int realizations = 50;
  for (int r = 0; r < realizations; ++r) {
    const auto pot = RandomPotential::generate(100, sigma, 1000 + r);
    const auto& nodes = pot.node_values();
    double mean = 0.0;
    for (double v : nodes) mean += v;
    mean /= nodes.size();
    double var = 0.0;
    for (double v : nodes) var += (v - mean) * (v - mean);
    acc += var / (nodes.size() - 1);
  }
  CHECK(acc / realizations == doctest::Approx(sigma * sigma).epsilon(0.05));
}

TEST_CASE("realizations are seed-deterministic") {
  const auto a = RandomPotential::generate(20, 1.0, 17);
  const auto b = RandomPotential::generate(20, 1.0, 17);
  const auto c = RandomPotential::generate(20, 1.0, 18);
  CHECK(a.node_values() == b.node_values());
  CHECK(a.node_values() != c.node_values());
  CHECK(a.value(2.5) == b.value(2.5));
}

TEST_CASE("zero strength collapses the potential") {
  const auto pot = RandomPotential::generate(10, 0.0, 3);
  for (double q = 0.0; q < two_pi; q += 0.37) CHECK(pot.value(q) == 0.0);
}
