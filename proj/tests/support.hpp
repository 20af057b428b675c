#pragma once

// Small fixtures shared by the unit tests.  Everything here is sized so a
// single test binary builds its models in well under a second.

#include <memory>

#include <rotorsim/many_body.hpp>
#include <rotorsim/pure_state.hpp>

namespace rotorsim::testing {

inline std::shared_ptr<const RotorSpectrum> confined_rotor(int j_max = 20, double u = 300.0) {
  return std::make_shared<const RotorSpectrum>(RotorSpectrum::solve(u, FourierBasis{j_max}));
}

// Two coupled rotors over a polyad-capped basis, small enough for brute-force
// cross-checks against the planned reduction paths.
struct PairSystem {
  std::shared_ptr<const RotorSpectrum> rotor;
  CouplingSet couplings;
  std::shared_ptr<const ManyBodySpectrum> spectrum;
  ActiveSpace active;

  const ProductBasis& basis() const { return spectrum->basis; }
};

inline PairSystem make_pair_system(double sigma = 1.0, std::uint64_t seed = 5,
                                   int polyad_cap = 3, int level_cap = 4,
                                   int active_dimension = 7) {
  PairSystem sys;
  sys.rotor = confined_rotor(10);
  sys.couplings = CouplingSet::generate(2, 6, sigma, seed);
  const ProductBasis basis = ProductBasis::polyad_capped(*sys.rotor, 2, polyad_cap, level_cap);
  const Eigen::MatrixXcd h = assemble_hamiltonian(basis, *sys.rotor, sys.couplings);
  sys.spectrum =
      std::make_shared<const ManyBodySpectrum>(diagonalize_full(sys.rotor, basis, h));
  const double cutoff = 0.5 * (sys.spectrum->energies(active_dimension - 1) +
                               sys.spectrum->energies(active_dimension));
  sys.active = select_active_space(*sys.spectrum, cutoff);
  return sys;
}

inline PureState make_pair_state(const PairSystem& sys, std::uint64_t seed = 11) {
  return PureState(sys.spectrum, sys.active, sample_rpse(sys.active.dimension, seed));
}

}  // namespace rotorsim::testing
