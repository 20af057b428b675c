#include "rotorsim/random_potential.hpp"

#include <cmath>

#include "rotorsim/rng.hpp"
#include "rotorsim/units.hpp"

namespace rotorsim {

RandomPotential RandomPotential::generate(int resolution, double sigma, std::uint64_t seed) {
  RandomPotential p;
  p.resolution_ = resolution;
  p.sigma_ = sigma;
  p.seed_ = seed;

  const int nodes = 2 * resolution + 1;
  RandomStream rng(seed);
  p.nodes_.resize(nodes);
  for (double& v : p.nodes_) v = sigma * rng.gaussian();

  // V~_l = (1/(2L+1)) sum_k V_k exp(-i l theta_k); the mean (l = 0) is
  // removed and the variance of the others is left as drawn
  p.components_.assign(2 * resolution + 1, Complex{0.0, 0.0});
  for (int l = 1; l <= resolution; ++l) {
    Complex sum{0.0, 0.0};
    for (int k = 0; k < nodes; ++k) {
      const double theta = two_pi * k / nodes;
      sum += p.nodes_[k] * std::polar(1.0, -l * theta);
    }
    sum /= static_cast<double>(nodes);
    p.components_[resolution + l] = sum;
    p.components_[resolution - l] = std::conj(sum);
  }
  return p;
}

Complex RandomPotential::value_complex(double angle) const {
  const Complex step = std::polar(1.0, angle);
  Complex mode{1.0, 0.0};  // e^{i l angle}, chained upward from l = 0
  Complex sum = components_[resolution_];
  for (int l = 1; l <= resolution_; ++l) {
    mode *= step;
    sum += components_[resolution_ + l] * mode + components_[resolution_ - l] * std::conj(mode);
  }
  return sum;
}

}  // namespace rotorsim
