#pragma once

#include <cstdint>
#include <vector>

#include "rotorsim/rotor_spectrum.hpp"

namespace rotorsim {

// Product basis |l> = |l_1 ... l_n> of single-rotor levels, kept when the
// zero-order energy sum(eps_{l_i}) lies below a cutoff (or when the polyad
// sum(l_i) does not exceed a cap).  States are sorted by ascending zero-order
// energy, ties broken lexicographically so the order is reproducible.
class ProductBasis {
 public:
  static ProductBasis energy_truncated(const RotorSpectrum& spec, int rotor_count,
                                       double energy_cutoff, int level_cap);
  static ProductBasis polyad_capped(const RotorSpectrum& spec, int rotor_count, int polyad_cap,
                                    int level_cap);

  int rotor_count() const { return rotor_count_; }
  int level_cap() const { return level_cap_; }
  int dimension() const { return static_cast<int>(energies_.size()); }

  // pointer to the n level indices of state s
  const std::uint8_t* levels(int state) const { return levels_.data() + state * rotor_count_; }
  int level(int state, int rotor) const { return levels_[state * rotor_count_ + rotor]; }
  double zero_order_energy(int state) const { return energies_[state]; }
  int polyad(int state) const { return polyads_[state]; }
  int max_polyad() const;

  // number of kept states in polyad p
  int polyad_count(int p) const;
  // number of kept states with polyad <= p
  int cumulative_polyad_count(int p) const;

  // index of a level tuple, -1 if it was truncated away
  int find(const std::uint8_t* levels) const;

 private:
  ProductBasis() = default;
  static ProductBasis build(const RotorSpectrum& spec, int rotor_count, double energy_cutoff,
                            int polyad_cap, int level_cap);

  int rotor_count_ = 0;
  int level_cap_ = 0;
  std::vector<std::uint8_t> levels_;  // dimension x rotor_count, row-major
  std::vector<double> energies_;
  std::vector<int> polyads_;
};

// binomial coefficient as a double-checked integer; used for polyad census
long binomial(int n, int k);

}  // namespace rotorsim
