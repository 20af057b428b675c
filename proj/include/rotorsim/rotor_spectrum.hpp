#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

#include "rotorsim/fourier_basis.hpp"

namespace rotorsim {

struct EigensolverError : std::runtime_error {
  explicit EigensolverError(int dim)
      : std::runtime_error("eigensolver failed to converge on a " + std::to_string(dim) + "x" +
                           std::to_string(dim) + " matrix"),
        dimension(dim) {}
  int dimension;
};

// One confined rotor,  H = -d^2/dq^2 + (u/2)(1 + cos q),  in the plane-wave
// basis: diagonal entries j^2 + u/2, first off-diagonals u/4.  The matrix is
// real symmetric.
Eigen::MatrixXd build_rotor_hamiltonian(double barrier_height, const FourierBasis& basis);

// Eigenpairs of a single rotor.  Levels are ordered by energy; eigenvector
// columns carry a fixed phase (largest-magnitude coefficient real positive)
// so repeated runs produce identical spectra.
class RotorSpectrum {
 public:
  static RotorSpectrum diagonalize(const Eigen::MatrixXd& hamiltonian, double barrier_height,
                                   const FourierBasis& basis);
  static RotorSpectrum solve(double barrier_height, const FourierBasis& basis);
  // u = 0 with the exact momentum eigenbasis (j = 0, +1, -1, +2, -2, ...);
  // the generic path would return arbitrary mixtures within each degenerate
  // pair, which is inconvenient for ballistic checks
  static RotorSpectrum free_rotor(const FourierBasis& basis);

  double barrier_height() const { return barrier_height_; }
  const FourierBasis& basis() const { return basis_; }
  int level_count() const { return static_cast<int>(energies_.size()); }
  double energy(int level) const { return energies_(level); }
  const Eigen::VectorXd& energies() const { return energies_; }
  // column m holds the coefficients of level m over the plane-wave basis
  const Eigen::MatrixXcd& coefficients() const { return coefficients_; }

  struct ValueDeriv {
    Complex value;
    Complex deriv;
  };
  // eigenfunction level m and its angular derivative at one angle
  ValueDeriv eval(int level, double angle) const;
  // same for levels 0 .. count-1 at once; values/derivs must hold count slots
  void eval_levels(double angle, int count, Complex* values, Complex* derivs) const;

  // matrix of the shift operator exp(i l q) over the first `count` levels,
  // entries <m| e^{ilq} |m'>; exact within the plane-wave truncation
  Eigen::MatrixXcd shift_operator(int shift, int count) const;

 private:
  RotorSpectrum() = default;
  double barrier_height_ = 0.0;
  FourierBasis basis_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd coefficients_;
};

// rotates each column so its largest-magnitude entry is real and positive
void fix_eigenvector_phases(Eigen::MatrixXcd& vectors);

}  // namespace rotorsim
