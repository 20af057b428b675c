#pragma once

#include <cmath>
#include <complex>

#include "rotorsim/units.hpp"

namespace rotorsim {

using Complex = std::complex<double>;

// Plane-wave basis chi_j(q) = exp(i j q) / sqrt(2 pi) on [0, 2 pi), truncated
// at |j| <= j_max.  Storage order runs j = -j_max .. +j_max.
struct FourierBasis {
  int j_max = 20;

  int dimension() const { return 2 * j_max + 1; }
  int index_of(int j) const { return j + j_max; }
  int momentum_at(int index) const { return index - j_max; }
};

inline Complex fourier_mode(int j, double angle) {
  static const double norm = 1.0 / std::sqrt(two_pi);
  return std::polar(norm, j * angle);
}

}  // namespace rotorsim
