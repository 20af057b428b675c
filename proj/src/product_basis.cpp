#include "rotorsim/product_basis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rotorsim {

long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

ProductBasis ProductBasis::energy_truncated(const RotorSpectrum& spec, int rotor_count,
                                            double energy_cutoff, int level_cap) {
  return build(spec, rotor_count, energy_cutoff, std::numeric_limits<int>::max(), level_cap);
}

ProductBasis ProductBasis::polyad_capped(const RotorSpectrum& spec, int rotor_count,
                                         int polyad_cap, int level_cap) {
  return build(spec, rotor_count, std::numeric_limits<double>::infinity(), polyad_cap,
               level_cap);
}

ProductBasis ProductBasis::build(const RotorSpectrum& spec, int rotor_count,
                                 double energy_cutoff, int polyad_cap, int level_cap) {
  if (rotor_count < 1) throw std::invalid_argument("rotor count must be at least 1");
  level_cap = std::min(level_cap, spec.level_count());
  if (level_cap > 255) throw std::invalid_argument("level cap exceeds 8-bit storage");

  const double ground = spec.energy(0);
  if (rotor_count * ground >= energy_cutoff && polyad_cap > 0 &&
      energy_cutoff != std::numeric_limits<double>::infinity())
    throw std::invalid_argument("cutoff excludes the ground product state");

  struct Entry {
    std::vector<std::uint8_t> levels;
    double energy;
    int polyad;
  };
  std::vector<Entry> kept;
  std::vector<std::uint8_t> current(rotor_count, 0);

  // depth-first enumeration with energy pruning; levels are energy-ordered,
  // so once a slot value is too expensive every larger value is too
  auto recurse = [&](auto&& self, int slot, double energy, int polyad) -> void {
    if (slot == rotor_count) {
      kept.push_back({current, energy, polyad});
      return;
    }
    const double rest = (rotor_count - slot - 1) * ground;
    for (int m = 0; m < level_cap; ++m) {
      const double e = energy + spec.energy(m);
      if (e + rest >= energy_cutoff) break;
      if (polyad + m > polyad_cap) break;
      current[slot] = static_cast<std::uint8_t>(m);
      self(self, slot + 1, e, polyad + m);
    }
  };
  recurse(recurse, 0, 0.0, 0);

  std::sort(kept.begin(), kept.end(), [](const Entry& a, const Entry& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.levels < b.levels;
  });

  ProductBasis basis;
  basis.rotor_count_ = rotor_count;
  basis.level_cap_ = level_cap;
  basis.levels_.reserve(kept.size() * rotor_count);
  basis.energies_.reserve(kept.size());
  basis.polyads_.reserve(kept.size());
  for (const Entry& e : kept) {
    basis.levels_.insert(basis.levels_.end(), e.levels.begin(), e.levels.end());
    basis.energies_.push_back(e.energy);
    basis.polyads_.push_back(e.polyad);
  }
  return basis;
}

int ProductBasis::max_polyad() const {
  int out = 0;
  for (int p : polyads_) out = std::max(out, p);
  return out;
}

int ProductBasis::polyad_count(int p) const {
  return static_cast<int>(std::count(polyads_.begin(), polyads_.end(), p));
}

int ProductBasis::cumulative_polyad_count(int p) const {
  return static_cast<int>(
      std::count_if(polyads_.begin(), polyads_.end(), [p](int q) { return q <= p; }));
}

int ProductBasis::find(const std::uint8_t* levels) const {
  for (int s = 0; s < dimension(); ++s)
    if (std::equal(levels, levels + rotor_count_, this->levels(s))) return s;
  return -1;
}

}  // namespace rotorsim
