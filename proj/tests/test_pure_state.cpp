#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>
#include <rotorsim/pure_state.hpp>
#include <rotorsim/units.hpp>

#include "support.hpp"

using namespace rotorsim;

TEST_CASE("samples are normalized, in range, and reproducible") {
  const auto a = sample_rpse(462, 99);
  const auto b = sample_rpse(462, 99);
  const auto c = sample_rpse(462, 100);
  CHECK(a.populations == b.populations);
  CHECK(a.phases == b.phases);
  CHECK(a.populations != c.populations);

  CHECK(std::abs(a.populations.sum() - 1.0) < 1e-14);
  CHECK(a.populations.minCoeff() > 0.0);
  CHECK(a.phases.minCoeff() >= 0.0);
  CHECK(a.phases.maxCoeff() < two_pi);
}

TEST_CASE("population moments follow the flat simplex measure") {
  // on the (N-1)-simplex each weight has mean 1/N and variance
  // (N - 1) / (N^2 (N + 1))
  const int dim = 5;
  const int draws = 20000;
  double mean0 = 0.0, var0 = 0.0;
  for (int d = 0; d < draws; ++d) {
    const auto s = sample_rpse(dim, 5000 + d);
    mean0 += s.populations(0);
    var0 += s.populations(0) * s.populations(0);
  }
  mean0 /= draws;
  var0 = var0 / draws - mean0 * mean0;
  const double expect_var = double(dim - 1) / (double(dim) * dim * (dim + 1));
  CHECK(std::abs(mean0 - 1.0 / dim) < 4.0 * std::sqrt(expect_var / draws));
  // standard error of a sample variance is roughly var * sqrt(2 / M) for
  // mildly skewed laws; allow a generous multiple
  CHECK(std::abs(var0 - expect_var) < 8.0 * expect_var * std::sqrt(2.0 / draws));
}

TEST_CASE("phases are uniform on the circle") {
  const auto s = sample_rpse(20000, 31);
  std::vector<double> sorted(s.phases.data(), s.phases.data() + s.phases.size());
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  const int count = static_cast<int>(sorted.size());
  for (int i = 0; i < count; ++i) {
    const double u = sorted[i] / two_pi;
    ks = std::max(ks, std::abs(u - double(i) / count));
    ks = std::max(ks, std::abs(u - double(i + 1) / count));
  }
  CHECK(ks < 1.63 / std::sqrt(double(count)));  // 1% Kolmogorov gate
}

TEST_CASE("coefficients follow the stationary phase rule") {
  const auto sys = testing::make_pair_system();
  const auto state = testing::make_pair_state(sys);

  const auto c0 = state.coefficients_at(0.0);
  REQUIRE(c0.size() == sys.active.dimension);
  CHECK(std::abs(c0.squaredNorm() - 1.0) < 1e-13);
  for (int k = 0; k < c0.size(); ++k) {
    const Complex expected =
        std::sqrt(state.populations()(k)) * std::polar(1.0, -state.initial_phases()(k));
    CHECK(std::abs(c0(k) - expected) < 1e-14);
  }

  const double tau = 0.83;
  const auto ct = state.coefficients_at(tau);
  for (int k = 0; k < ct.size(); ++k) {
    const Complex rotated =
        c0(k) * std::polar(1.0, -phase_rate * state.active_energies()(k) * tau);
    CHECK(std::abs(ct(k) - rotated) < 1e-13);
  }
}

TEST_CASE("spectral propagation agrees with integrating the raw hamiltonian") {
  // march i dc/dtau = 2 pi H c in the product basis with a small fixed step
  // and compare against the closed-form evolution through the eigenbasis
  const auto sys = testing::make_pair_system();
  const auto state = testing::make_pair_state(sys);
  const Eigen::MatrixXcd h = assemble_hamiltonian(sys.basis(), *sys.rotor, sys.couplings);

  Eigen::VectorXcd d = state.product_amplitudes_at(0.0);
  const Complex minus_i{0.0, -1.0};
  auto rhs = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
    return minus_i * phase_rate * (h * v);
  };
  const double tau = 0.05;
  const double step = 2e-5;
  const long steps = std::lround(tau / step);
  for (long s = 0; s < steps; ++s) {
    const Eigen::VectorXcd k1 = rhs(d);
    const Eigen::VectorXcd k2 = rhs(d + 0.5 * step * k1);
    const Eigen::VectorXcd k3 = rhs(d + 0.5 * step * k2);
    const Eigen::VectorXcd k4 = rhs(d + step * k3);
    d += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  const Eigen::VectorXcd exact = state.product_amplitudes_at(tau);
  CHECK((d - exact).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("product amplitudes are the rotated eigenvector mix") {
  const auto sys = testing::make_pair_system();
  const auto state = testing::make_pair_state(sys, 23);
  const double tau = 1.7;
  const Eigen::VectorXcd direct =
      sys.spectrum->vectors.leftCols(sys.active.dimension) * state.coefficients_at(tau);
  CHECK((state.product_amplitudes_at(tau) - direct).cwiseAbs().maxCoeff() < 1e-14);
  // unit norm is preserved because the truncated columns are orthonormal
  CHECK(std::abs(state.product_amplitudes_at(tau).squaredNorm() - 1.0) < 1e-13);
}
