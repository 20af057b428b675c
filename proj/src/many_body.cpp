#include "rotorsim/many_body.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rotorsim/rng.hpp"

namespace rotorsim {

CouplingSet CouplingSet::generate(int rotor_count, int resolution, double sigma,
                                  std::uint64_t master_seed) {
  CouplingSet set;
  set.rotor_count = rotor_count;
  set.one_body.reserve(rotor_count);
  for (int i = 0; i < rotor_count; ++i) {
    const std::uint64_t seed = derive_seed(master_seed, "onebody/" + std::to_string(i));
    set.one_body.push_back(RandomPotential::generate(resolution, sigma, seed));
  }
  for (int i = 0; i < rotor_count; ++i)
    for (int j = i + 1; j < rotor_count; ++j) {
      const std::uint64_t seed =
          derive_seed(master_seed, "pair/" + std::to_string(i) + "-" + std::to_string(j));
      set.pair.push_back(RandomPotential::generate(resolution, sigma, seed));
    }
  return set;
}

int CouplingSet::pair_index(int rotor_count, int i, int j) {
  // row-major upper triangle without the diagonal
  return i * rotor_count - i * (i + 1) / 2 + (j - i - 1);
}

const RandomPotential& CouplingSet::pair_between(int i, int j) const {
  return pair[pair_index(rotor_count, i, j)];
}

namespace {

// one-body operator sum_l V~_l <m|e^{ilq}|m'> over the kept levels
Eigen::MatrixXcd one_body_operator(const RandomPotential& pot,
                                   const std::vector<Eigen::MatrixXcd>& shifts, int shift_max,
                                   int levels) {
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(levels, levels);
  for (int l = -shift_max; l <= shift_max; ++l) {
    if (l == 0) continue;  // zero-mean potentials have no l = 0 component
    op += pot.component(l) * shifts[l + shift_max];
  }
  return op;
}

// pair tensor T[(a,b),(c,d)] = sum_l V~_l <a|e^{ilq}|b> <c|e^{-ilq}|d>
Eigen::MatrixXcd pair_tensor(const RandomPotential& pot,
                             const std::vector<Eigen::MatrixXcd>& shifts, int shift_max,
                             int levels) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(levels * levels, levels * levels);
  for (int l = -shift_max; l <= shift_max; ++l) {
    if (l == 0) continue;
    const Eigen::MatrixXcd& plus = shifts[l + shift_max];
    const Eigen::MatrixXcd& minus = shifts[-l + shift_max];
    const Complex weight = pot.component(l);
    for (int a = 0; a < levels; ++a)
      for (int b = 0; b < levels; ++b) {
        const Complex left = weight * plus(a, b);
        if (left == Complex{0.0, 0.0}) continue;
        for (int c = 0; c < levels; ++c)
          for (int d = 0; d < levels; ++d) t(a * levels + b, c * levels + d) += left * minus(c, d);
      }
  }
  return t;
}

}  // namespace

Eigen::MatrixXcd assemble_hamiltonian(const ProductBasis& basis, const RotorSpectrum& spec,
                                      const CouplingSet& couplings) {
  const int n = basis.rotor_count();
  if (couplings.rotor_count != n)
    throw std::invalid_argument("potential set was generated for a different rotor count");
  const int levels = basis.level_cap();
  const int dim = basis.dimension();

  // the random potentials carry modes up to L, but shifts beyond the basis
  // support move every plane wave out of range and contribute exactly zero
  const int shift_max =
      std::min(2 * spec.basis().j_max, couplings.one_body.front().resolution());

  std::vector<Eigen::MatrixXcd> shifts;
  shifts.reserve(2 * shift_max + 1);
  for (int l = -shift_max; l <= shift_max; ++l)
    shifts.push_back(spec.shift_operator(l, levels));

  std::vector<Eigen::MatrixXcd> w;  // one-body operators
  w.reserve(n);
  for (int i = 0; i < n; ++i)
    w.push_back(one_body_operator(couplings.one_body[i], shifts, shift_max, levels));

  std::vector<Eigen::MatrixXcd> t;  // pair tensors, indexed like couplings.pair
  t.reserve(couplings.pair.size());
  for (const RandomPotential& pot : couplings.pair)
    t.push_back(pair_tensor(pot, shifts, shift_max, levels));

  auto tensor_at = [&](int i, int j, int a, int b, int c, int d) -> Complex {
    return t[CouplingSet::pair_index(n, i, j)](a * levels + b, c * levels + d);
  };

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<int> diff;
  diff.reserve(3);
  for (int r = 0; r < dim; ++r) {
    const std::uint8_t* lr = basis.levels(r);
    for (int c = r; c < dim; ++c) {
      const std::uint8_t* lc = basis.levels(c);
      diff.clear();
      for (int i = 0; i < n && diff.size() <= 2; ++i)
        if (lr[i] != lc[i]) diff.push_back(i);
      if (diff.size() > 2) continue;

      Complex element{0.0, 0.0};
      if (diff.empty()) {
        element = basis.zero_order_energy(r);
        for (int i = 0; i < n; ++i) element += w[i](lr[i], lr[i]);
        for (int i = 0; i < n; ++i)
          for (int j = i + 1; j < n; ++j) element += tensor_at(i, j, lr[i], lr[i], lr[j], lr[j]);
      } else if (diff.size() == 1) {
        const int i = diff[0];
        element = w[i](lr[i], lc[i]);
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          element += (i < j) ? tensor_at(i, j, lr[i], lc[i], lr[j], lr[j])
                             : tensor_at(j, i, lr[j], lr[j], lr[i], lc[i]);
        }
      } else {
        const int i = diff[0];
        const int j = diff[1];
        element = tensor_at(i, j, lr[i], lc[i], lr[j], lc[j]);
      }

      if (c == r) {
        // diagonal entries are expectations of real potentials; their
        // imaginary rounding residue is not physical
        h(r, r) = element.real();
      } else {
        h(r, c) = element;
        h(c, r) = std::conj(element);  // exact Hermiticity
      }
    }
  }
  return h;
}

ManyBodySpectrum diagonalize_full(std::shared_ptr<const RotorSpectrum> rotor,
                                  const ProductBasis& basis, const Eigen::MatrixXcd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw EigensolverError(static_cast<int>(h.rows()));

  ManyBodySpectrum spec{std::move(rotor), basis, solver.eigenvalues(), solver.eigenvectors(), {}};
  fix_eigenvector_phases(spec.vectors);

  spec.polyads.resize(spec.dimension());
  for (int k = 0; k < spec.dimension(); ++k) {
    int lead = 0;
    spec.vectors.col(k).cwiseAbs().maxCoeff(&lead);
    spec.polyads[k] = basis.polyad(lead);
  }
  return spec;
}

double ManyBodySpectrum::min_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k < dimension(); ++k) gap = std::min(gap, energies(k) - energies(k - 1));
  return gap;
}

TruncationAudit truncation_audit(const ManyBodySpectrum& small_spec,
                                 const ManyBodySpectrum& large_spec) {
  TruncationAudit audit;
  const int polyad_cap = small_spec.basis.max_polyad();
  for (int p = 0; p <= polyad_cap; ++p) {
    std::vector<double> es, el;
    for (int k = 0; k < small_spec.dimension(); ++k)
      if (small_spec.polyads[k] == p) es.push_back(small_spec.energies(k));
    for (int k = 0; k < large_spec.dimension(); ++k)
      if (large_spec.polyads[k] == p) el.push_back(large_spec.energies(k));

    TruncationAudit::PolyadRow row;
    row.polyad = p;
    row.states = static_cast<int>(es.size());
    if (es.size() != el.size())
      throw std::runtime_error("polyad " + std::to_string(p) +
                               " has a different state count in the two spectra");
    for (std::size_t k = 0; k < es.size(); ++k) {
      const double shift = std::abs(el[k] - es[k]);
      row.max_abs_shift = std::max(row.max_abs_shift, shift);
      row.max_rel_shift = std::max(row.max_rel_shift, shift / std::abs(es[k]));
    }
    audit.rows.push_back(row);
  }
  return audit;
}

double TruncationAudit::max_rel_shift(int polyad_from, int polyad_to) const {
  double out = 0.0;
  for (const PolyadRow& row : rows)
    if (row.polyad >= polyad_from && row.polyad <= polyad_to)
      out = std::max(out, row.max_rel_shift);
  return out;
}

ActiveSpace select_active_space(const ManyBodySpectrum& spec, double cutoff) {
  int n = 0;
  while (n < spec.dimension() && spec.energies(n) < cutoff) ++n;
  if (n == 0) throw std::invalid_argument("active-space cutoff lies below the ground state");
  if (n == spec.dimension())
    throw std::invalid_argument("active-space cutoff lies above the whole computed spectrum");
  const double below = cutoff - spec.energies(n - 1);
  const double above = spec.energies(n) - cutoff;
  if (below < 1e-10 || above < 1e-10)
    throw std::invalid_argument("active-space cutoff collides with an eigenvalue");
  return ActiveSpace{cutoff, n};
}

}  // namespace rotorsim
