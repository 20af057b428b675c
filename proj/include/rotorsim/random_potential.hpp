#pragma once

#include <cstdint>
#include <vector>

#include "rotorsim/fourier_basis.hpp"

namespace rotorsim {

// Smooth random 2pi-periodic potential.  Independent Gaussian values are
// drawn on the 2L+1 equidistant nodes theta_k = 2 pi k / (2L+1), turned into
// Fourier components by a discrete transform, and the l = 0 component is
// dropped so every realization has zero mean.  Evaluation anywhere on the
// circle is the trigonometric interpolation through the remaining modes.
class RandomPotential {
 public:
  static RandomPotential generate(int resolution, double sigma, std::uint64_t seed);

  int resolution() const { return resolution_; }  // L
  int node_count() const { return 2 * resolution_ + 1; }
  double sigma() const { return sigma_; }
  std::uint64_t seed() const { return seed_; }

  // Fourier component for |l| <= L; components obey conj symmetry exactly
  Complex component(int l) const { return components_[l + resolution_]; }

  double value(double angle) const { return value_complex(angle).real(); }
  // full complex sum; the imaginary part is a rounding residue
  Complex value_complex(double angle) const;

  // Gaussian node values the realization was built from (diagnostics/tests)
  const std::vector<double>& node_values() const { return nodes_; }

 private:
  int resolution_ = 0;
  double sigma_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<Complex> components_;  // index l + L
  std::vector<double> nodes_;
};

}  // namespace rotorsim
