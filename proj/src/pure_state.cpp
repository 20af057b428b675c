#include "rotorsim/pure_state.hpp"

#include <cmath>
#include <stdexcept>

#include "rotorsim/rng.hpp"
#include "rotorsim/units.hpp"

namespace rotorsim {

RpseSample sample_rpse(int dimension, std::uint64_t seed) {
  if (dimension < 1) throw std::invalid_argument("ensemble dimension must be at least 1");
  RandomStream rng(seed);
  RpseSample s;
  s.populations.resize(dimension);
  s.phases.resize(dimension);
  double total = 0.0;
  for (int k = 0; k < dimension; ++k) {
    // normalized exponential spacings are flat on the simplex
    const double x = -std::log(1.0 - rng.uniform());
    s.populations(k) = x;
    total += x;
  }
  s.populations /= total;
  for (int k = 0; k < dimension; ++k) s.phases(k) = rng.uniform(0.0, two_pi);
  return s;
}

PureState::PureState(std::shared_ptr<const ManyBodySpectrum> spectrum, ActiveSpace active,
                     RpseSample sample)
    : spectrum_(std::move(spectrum)), active_(active), sample_(std::move(sample)) {
  const int n = active_.dimension;
  if (sample_.populations.size() != n || sample_.phases.size() != n)
    throw std::invalid_argument("sample dimension differs from the active space");
  if (n > spectrum_->dimension())
    throw std::invalid_argument("active space exceeds the spectrum dimension");
  const double norm_gap = std::abs(sample_.populations.sum() - 1.0);
  if (norm_gap > 1e-12) throw std::invalid_argument("populations do not sum to 1");

  energies_ = spectrum_->energies.head(n);
  initial_coefficients_.resize(n);
  for (int k = 0; k < n; ++k)
    initial_coefficients_(k) =
        std::polar(std::sqrt(sample_.populations(k)), -sample_.phases(k));
}

Eigen::VectorXcd PureState::coefficients_at(double time) const {
  const int n = active_.dimension;
  Eigen::VectorXcd c(n);
  for (int k = 0; k < n; ++k)
    c(k) = initial_coefficients_(k) * std::polar(1.0, -phase_rate * energies_(k) * time);
  return c;
}

Eigen::VectorXcd PureState::product_amplitudes_at(double time) const {
  return spectrum_->vectors.leftCols(active_.dimension) * coefficients_at(time);
}

}  // namespace rotorsim
