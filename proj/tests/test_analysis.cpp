#include <cmath>
#include <vector>

#include <doctest.h>
#include <rotorsim/analysis.hpp>
#include <rotorsim/rng.hpp>
#include <rotorsim/units.hpp>

using namespace rotorsim;

TEST_CASE("histograms count exactly and wrap their input") {
  const std::vector<double> series{0.1, 0.1 + two_pi, -0.1, 3.2, 3.3, 3.2, 3.3, 6.2};
  const auto h = angle_histogram(series, 4);
  CHECK(h.total == 8);
  CHECK(h.bin_width == doctest::Approx(pi / 2));
  CHECK(h.fraction[0] == doctest::Approx(0.25));   // 0.1 twice
  CHECK(h.fraction[2] == doctest::Approx(0.5));    // the 3.2 / 3.3 cluster
  CHECK(h.fraction[3] == doctest::Approx(0.25));   // -0.1 and 6.2
  CHECK(h.fraction[1] == 0.0);
  double mass = 0.0;
  for (double f : h.fraction) mass += f;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(h.density()[2] == doctest::Approx(0.5 / h.bin_width));
}

TEST_CASE("the convergence gap separates settled from drifting records") {
  RandomStream rng(4);
  std::vector<double> settled(20000), drifting(20000);
  for (std::size_t s = 0; s < settled.size(); ++s) {
    settled[s] = rng.uniform(0.0, two_pi);
    drifting[s] = (s < settled.size() / 2) ? rng.uniform(0.5, 1.5) : rng.uniform(3.5, 4.5);
  }
  CHECK(angle_histogram(settled, 50).convergence_gap < 0.02);
  CHECK(angle_histogram(drifting, 50).convergence_gap > 0.3);
}

TEST_CASE("wrap detection fires on cross-boundary jumps only") {
  CHECK_FALSE(wrap_detected({3.0, 3.4, 2.8, 3.1}));
  CHECK(wrap_detected({0.2, 6.1}));  // the short way crosses 0
}

TEST_CASE("white noise decorrelates after one lag") {
  RandomStream rng(9);
  std::vector<double> series(40000);
  for (auto& x : series) x = rng.uniform(1.0, 2.0);
  const auto curve = autocorrelation(series, 0.5, 50);
  CHECK_FALSE(curve.wrap_flag);
  CHECK(curve.g0() == doctest::Approx(1.0 / 12.0).epsilon(0.03));
  for (std::size_t k = 1; k < curve.values.size(); ++k)
    CHECK(std::abs(curve.values[k]) < 3e-3);
  CHECK(curve.correlation_time(0.2) == doctest::Approx(0.5));
}

TEST_CASE("an AR(1) record decays at its known rate") {
  RandomStream rng(21);
  const double rho = 0.9;
  std::vector<double> series(200000);
  double x = 0.0;
  for (auto& out : series) {
    x = rho * x + rng.gaussian();
    out = x;
  }
  const auto curve = autocorrelation(series, 1.0, 40);
  for (int lag : {1, 5, 10, 20})
    CHECK(std::abs(curve.values[lag] / curve.g0() - std::pow(rho, lag)) < 0.03);
  // G/G0 crosses 0.2 between lag 15 and 16
  const double tau = curve.correlation_time(0.2);
  CHECK(tau >= 14.0);
  CHECK(tau <= 18.0);
}

TEST_CASE("conditional histograms recover a markov kernel") {
  // three-state chain mapped onto thirds of the circle
  const double third = two_pi / 3.0;
  Eigen::MatrixXd kernel(3, 3);
  kernel << 0.6, 0.3, 0.1,
            0.2, 0.5, 0.3,
            0.25, 0.25, 0.5;
  RandomStream rng(77);
  std::vector<double> series(60000);
  int state = 0;
  for (auto& out : series) {
    out = (state + 0.2 + 0.6 * rng.uniform()) * third;  // stay inside the arc
    const double u = rng.uniform();
    state = u < kernel(state, 0) ? 0 : (u < kernel(state, 0) + kernel(state, 1) ? 1 : 2);
  }

  const auto fam = conditional_distribution(series, 1, 3, 3, 100);
  for (int s = 0; s < 3; ++s) {
    CHECK(fam.adequate[s] == 1);
    CHECK(fam.probability.row(s).sum() == doctest::Approx(1.0).epsilon(1e-12));
    for (int t = 0; t < 3; ++t)
      CHECK(std::abs(fam.probability(s, t) - kernel(s, t)) < 0.02);
  }
  double marginal_mass = 0.0;
  for (double m : fam.marginal) marginal_mass += m;
  CHECK(marginal_mass == doctest::Approx(1.0).epsilon(1e-12));

  // the same chain satisfies the composition identity
  const auto ck = chapman_kolmogorov_check(series, 1, 3, 100);
  CHECK(ck.compared_sources == 3);
  CHECK(ck.residual < 0.03);
}

TEST_CASE("a hidden phase breaks the composition identity") {
  // observable alternates A A B B A A B B ...: one-step statistics look
  // symmetric but the two-step motion is deterministic
  std::vector<double> series(20000);
  for (std::size_t s = 0; s < series.size(); ++s)
    series[s] = ((s / 2) % 2 == 0) ? 1.0 : 4.0;
  const auto ck = chapman_kolmogorov_check(series, 1, 4, 100);
  CHECK(ck.compared_sources == 2);
  CHECK(ck.residual > 0.4);
}

TEST_CASE("distance helpers match hand values") {
  CHECK(sup_distance({0.2, 0.5, 0.3}, {0.25, 0.45, 0.3}) == doctest::Approx(0.05));
  // cumulative gaps: 0.05, 0.0, 0.0
  CHECK(kolmogorov_distance({0.2, 0.5, 0.3}, {0.25, 0.45, 0.3}) == doctest::Approx(0.05));
  CHECK_THROWS_AS(sup_distance({0.1}, {0.1, 0.2}), std::invalid_argument);

  Eigen::VectorXd p(4), w(4);
  p << 1.0, 1.0, 0.0, 0.0;
  w << 0.0, 0.0, 1.0, 1.0;
  const double spacing = 0.5;  // both integrate to 1
  CHECK(total_variation(p, w, spacing) == doctest::Approx(1.0));
  CHECK(total_variation(p, p, spacing) == 0.0);
  w << 1.0, 0.0, 1.0, 0.0;
  CHECK(total_variation(p, w, spacing) == doctest::Approx(0.5));
}

TEST_CASE("rebinning merges adjacent fractions") {
  const std::vector<double> fine{0.1, 0.2, 0.3, 0.25, 0.05, 0.1};
  const auto coarse = rebin_fractions(fine, 3);
  REQUIRE(coarse.size() == 2);
  CHECK(coarse[0] == doctest::Approx(0.6));
  CHECK(coarse[1] == doctest::Approx(0.4));
  CHECK_THROWS_AS(rebin_fractions(fine, 4), std::invalid_argument);
}
