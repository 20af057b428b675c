#pragma once

#include <cstdint>
#include <memory>

#include "rotorsim/many_body.hpp"

namespace rotorsim {

struct RpseSample {
  Eigen::VectorXd populations;  // non-negative, sums to 1
  Eigen::VectorXd phases;       // in [0, 2 pi)
};

// Draw from the random pure-state ensemble: populations uniform on the
// (N-1)-simplex (normalized standard exponentials), phases uniform on the
// circle, everything reproducible from the seed.
RpseSample sample_rpse(int dimension, std::uint64_t seed);

// A pure state on the active space of a spectrum, evolving under the exact
// phase rule c_k(tau) = sqrt(P_k) exp(-i [alpha_k + 2 pi e_k tau]).
class PureState {
 public:
  PureState(std::shared_ptr<const ManyBodySpectrum> spectrum, ActiveSpace active,
            RpseSample sample);

  const ManyBodySpectrum& spectrum() const { return *spectrum_; }
  std::shared_ptr<const ManyBodySpectrum> spectrum_ptr() const { return spectrum_; }
  const ActiveSpace& active_space() const { return active_; }
  int active_dimension() const { return active_.dimension; }
  const Eigen::VectorXd& populations() const { return sample_.populations; }
  const Eigen::VectorXd& initial_phases() const { return sample_.phases; }
  // active-space eigenvalues, used for the phase rule
  const Eigen::VectorXd& active_energies() const { return energies_; }

  Eigen::VectorXcd coefficients_at(double time) const;        // over eigenstates
  Eigen::VectorXcd product_amplitudes_at(double time) const;  // over basis states

 private:
  std::shared_ptr<const ManyBodySpectrum> spectrum_;
  ActiveSpace active_;
  RpseSample sample_;
  Eigen::VectorXd energies_;
  Eigen::VectorXcd initial_coefficients_;
};

}  // namespace rotorsim
