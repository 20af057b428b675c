#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "rotorsim/product_basis.hpp"
#include "rotorsim/random_potential.hpp"
#include "rotorsim/rotor_spectrum.hpp"

namespace rotorsim {

// All random potentials of an n-rotor model: one per rotor and one per
// unordered pair.  Each draws from its own seed sub-stream, so realizations
// are stable against changes elsewhere in the model.
struct CouplingSet {
  int rotor_count = 0;
  std::vector<RandomPotential> one_body;  // index i
  std::vector<RandomPotential> pair;      // index pair_index(i, j), i < j

  static CouplingSet generate(int rotor_count, int resolution, double sigma,
                              std::uint64_t master_seed);
  static int pair_index(int rotor_count, int i, int j);
  const RandomPotential& pair_between(int i, int j) const;
};

// H = H0 + sum_i V_i(q_i) + sum_{i<j} V_ij(q_i - q_j) over the product basis.
// One-body elements are Fourier-coefficient convolutions of the single-rotor
// eigenfunctions; pair elements factor into two shift-operator matrices with
// opposite Fourier index.
Eigen::MatrixXcd assemble_hamiltonian(const ProductBasis& basis, const RotorSpectrum& spec,
                                      const CouplingSet& couplings);

struct ManyBodySpectrum {
  std::shared_ptr<const RotorSpectrum> rotor;  // the levels the basis is built from
  ProductBasis basis;
  Eigen::VectorXd energies;    // ascending
  Eigen::MatrixXcd vectors;    // column k = eigenstate k over the basis
  std::vector<int> polyads;    // polyad of the dominant basis component

  int dimension() const { return static_cast<int>(energies.size()); }
  // smallest gap between adjacent eigenvalues (rational-independence proxy)
  double min_gap() const;
};

ManyBodySpectrum diagonalize_full(std::shared_ptr<const RotorSpectrum> rotor,
                                  const ProductBasis& basis, const Eigen::MatrixXcd& h);

// Eigenvalue shifts between two truncations of the same model, matched by
// eigenvalue order inside each polyad of the smaller spectrum.
struct TruncationAudit {
  struct PolyadRow {
    int polyad = 0;
    int states = 0;
    double max_abs_shift = 0.0;
    double max_rel_shift = 0.0;
  };
  std::vector<PolyadRow> rows;
  double max_rel_shift(int polyad_from, int polyad_to) const;
};

TruncationAudit truncation_audit(const ManyBodySpectrum& small_spec,
                                 const ManyBodySpectrum& large_spec);

struct ActiveSpace {
  double cutoff = 0.0;
  int dimension = 0;  // members are eigenstates 0 .. dimension-1
};

// Eigenstates below the cutoff; the cutoff must fall strictly between two
// eigenvalues (margin 1e-10) or an error is raised.
ActiveSpace select_active_space(const ManyBodySpectrum& spec, double cutoff);

}  // namespace rotorsim
