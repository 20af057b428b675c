#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>
#include <rotorsim/many_body.hpp>

#include "support.hpp"

using namespace rotorsim;

namespace {

// brute-force matrix elements of the same model by 2D trapezoid quadrature;
// every factor is band-limited far below the grid frequency, so the rule is
// exact up to rounding
Eigen::MatrixXcd quadrature_hamiltonian(const ProductBasis& basis, const RotorSpectrum& spec,
                                        const CouplingSet& couplings) {
  const int grid = 256;
  const double dq = two_pi / grid;
  const int levels = basis.level_cap();

  std::vector<std::vector<Complex>> phi(levels, std::vector<Complex>(grid));
  for (int m = 0; m < levels; ++m)
    for (int g = 0; g < grid; ++g) phi[m][g] = spec.eval(m, g * dq).value;

  std::vector<double> v0(grid), v1(grid), vpair(grid);
  for (int g = 0; g < grid; ++g) {
    v0[g] = couplings.one_body[0].value(g * dq);
    v1[g] = couplings.one_body[1].value(g * dq);
    vpair[g] = couplings.pair_between(0, 1).value(g * dq);
  }

  const int dim = basis.dimension();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int c = 0; c < dim; ++c) {
      const int a = basis.level(r, 0), b = basis.level(r, 1);
      const int ap = basis.level(c, 0), bp = basis.level(c, 1);

      if (r == c) h(r, c) += basis.zero_order_energy(r);

      Complex o0{0.0, 0.0}, o1{0.0, 0.0}, pair{0.0, 0.0};
      for (int g = 0; g < grid; ++g) {
        o0 += std::conj(phi[a][g]) * v0[g] * phi[ap][g] * dq;
        o1 += std::conj(phi[b][g]) * v1[g] * phi[bp][g] * dq;
      }
      Complex norm0{0.0, 0.0}, norm1{0.0, 0.0};
      for (int g = 0; g < grid; ++g) {
        norm0 += std::conj(phi[a][g]) * phi[ap][g] * dq;
        norm1 += std::conj(phi[b][g]) * phi[bp][g] * dq;
      }
      h(r, c) += o0 * norm1 + norm0 * o1;

      for (int g0 = 0; g0 < grid; ++g0) {
        Complex inner{0.0, 0.0};
        for (int g1 = 0; g1 < grid; ++g1)
          inner += std::conj(phi[b][g1]) * vpair[(g0 - g1 + grid) % grid] * phi[bp][g1] * dq;
        pair += std::conj(phi[a][g0]) * phi[ap][g0] * inner * dq;
      }
      h(r, c) += pair;
    }
  return h;
}

}  // namespace

TEST_CASE("assembled hamiltonian matches direct quadrature") {
  const auto rotor = testing::confined_rotor(10);
  const auto couplings = CouplingSet::generate(2, 6, 1.0, 5);
  const auto basis = ProductBasis::polyad_capped(*rotor, 2, 3, 4);

  const Eigen::MatrixXcd fast = assemble_hamiltonian(basis, *rotor, couplings);
  const Eigen::MatrixXcd slow = quadrature_hamiltonian(basis, *rotor, couplings);
  CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("assembled hamiltonian is exactly hermitian") {
  const auto rotor = testing::confined_rotor(10);
  const auto couplings = CouplingSet::generate(3, 6, 1.0, 9);
  const auto basis = ProductBasis::polyad_capped(*rotor, 3, 2, 3);
  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, *rotor, couplings);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("uncoupled rotors add their level energies") {
  const auto rotor = testing::confined_rotor(10);
  const auto couplings = CouplingSet::generate(2, 6, 0.0, 5);
  const auto basis = ProductBasis::polyad_capped(*rotor, 2, 3, 4);
  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, *rotor, couplings);
  const auto spec = diagonalize_full(rotor, basis, h);

  std::vector<double> expected;
  for (int s = 0; s < basis.dimension(); ++s) expected.push_back(basis.zero_order_energy(s));
  std::sort(expected.begin(), expected.end());
  for (int k = 0; k < spec.dimension(); ++k)
    CHECK(std::abs(spec.energies(k) - expected[k]) < 1e-9);
}

TEST_CASE("diagonalization reconstructs the matrix") {
  const auto sys = testing::make_pair_system();
  const Eigen::MatrixXcd h = assemble_hamiltonian(sys.basis(), *sys.rotor, sys.couplings);
  const Eigen::MatrixXcd rebuilt = sys.spectrum->vectors *
                                   sys.spectrum->energies.asDiagonal() *
                                   sys.spectrum->vectors.adjoint();
  CHECK((h - rebuilt).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(sys.spectrum->min_gap() > 0.0);

  // the deterministic phase rule: largest component of each column is real
  // and positive
  for (int k = 0; k < sys.spectrum->dimension(); ++k) {
    int lead = 0;
    sys.spectrum->vectors.col(k).cwiseAbs().maxCoeff(&lead);
    const Complex top = sys.spectrum->vectors(lead, k);
    CHECK(top.real() > 0.0);
    CHECK(std::abs(top.imag()) < 1e-12 * top.real());
  }
}

TEST_CASE("truncation audit of a spectrum against itself is zero") {
  const auto sys = testing::make_pair_system();
  const auto audit = truncation_audit(*sys.spectrum, *sys.spectrum);
  int total = 0;
  for (const auto& row : audit.rows) {
    CHECK(row.max_abs_shift == 0.0);
    CHECK(row.max_rel_shift == 0.0);
    total += row.states;
  }
  CHECK(total == sys.spectrum->dimension());
}

TEST_CASE("enlarging the basis only nudges the retained polyads") {
  const auto rotor = testing::confined_rotor(10);
  const auto couplings = CouplingSet::generate(2, 6, 1.0, 5);
  const auto small_basis = ProductBasis::polyad_capped(*rotor, 2, 3, 4);
  const auto large_basis = ProductBasis::polyad_capped(*rotor, 2, 5, 6);
  const auto small_spec = diagonalize_full(
      rotor, small_basis, assemble_hamiltonian(small_basis, *rotor, couplings));
  const auto large_spec = diagonalize_full(
      rotor, large_basis, assemble_hamiltonian(large_basis, *rotor, couplings));

  const auto audit = truncation_audit(small_spec, large_spec);
  REQUIRE(audit.rows.size() == 4);
  for (const auto& row : audit.rows) {
    CHECK(row.max_abs_shift >= 0.0);
    CHECK(row.max_rel_shift < 0.05);  // variational motion, not reshuffling
  }
  CHECK(audit.max_rel_shift(0, 3) ==
        std::max({audit.rows[0].max_rel_shift, audit.rows[1].max_rel_shift,
                  audit.rows[2].max_rel_shift, audit.rows[3].max_rel_shift}));
}

TEST_CASE("active-space selection guards its cutoff") {
  const auto sys = testing::make_pair_system();
  CHECK(sys.active.dimension == 7);
  CHECK_THROWS_AS(select_active_space(*sys.spectrum, sys.spectrum->energies(0) - 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_active_space(*sys.spectrum, sys.spectrum->energies(3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      select_active_space(*sys.spectrum,
                          sys.spectrum->energies(sys.spectrum->dimension() - 1) + 1.0),
      std::invalid_argument);
}

TEST_CASE("pair indexing walks the upper triangle") {
  CHECK(CouplingSet::pair_index(4, 0, 1) == 0);
  CHECK(CouplingSet::pair_index(4, 0, 3) == 2);
  CHECK(CouplingSet::pair_index(4, 1, 2) == 3);
  CHECK(CouplingSet::pair_index(4, 2, 3) == 5);
  const auto couplings = CouplingSet::generate(4, 4, 1.0, 2);
  CHECK(couplings.pair.size() == 6);
  CHECK(&couplings.pair_between(2, 3) == &couplings.pair[5]);
}
