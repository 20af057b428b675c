#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rotorsim {

// Stable 64-bit hash (FNV-1a).  Used for seed derivation and config hashes.
std::uint64_t fnv1a(std::string_view text) noexcept;

// Derives the seed of a named sub-stream from a master seed.  Every random
// object in a model (each one-body potential, each pair potential, the state
// draw, ...) gets its own label, so adding a rotor never shifts the draws of
// the others.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label) noexcept;

// Deterministic random stream.  The transforms from raw engine output to
// doubles are spelled out here instead of using std::*_distribution, whose
// algorithms differ between standard libraries; with mt19937_64 underneath,
// the same seed gives the same draws on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform();
  // uniform in [a, b)
  double uniform(double a, double b);
  // standard normal via the Box-Muller transform (two uniforms per draw)
  double gaussian();

 private:
  std::mt19937_64 engine_;
};

}  // namespace rotorsim
