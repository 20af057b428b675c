#include "rotorsim/reduced_dynamics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "rotorsim/units.hpp"

namespace rotorsim {

PartialTracePlan::PartialTracePlan(const ProductBasis& basis, int subsystem, int levels)
    : subsystem_(subsystem), levels_(levels) {
  if (subsystem < 0 || subsystem >= basis.rotor_count())
    throw std::invalid_argument("subsystem index outside the rotor range");
  if (levels < basis.level_cap())
    throw std::invalid_argument("plan must cover every level the basis can populate");

  const int n = basis.rotor_count();
  std::map<std::vector<std::uint8_t>, std::vector<int>> groups;
  std::vector<std::uint8_t> env(n - 1);
  for (int s = 0; s < basis.dimension(); ++s) {
    const std::uint8_t* l = basis.levels(s);
    int at = 0;
    for (int r = 0; r < n; ++r)
      if (r != subsystem) env[at++] = l[r];
    groups[env].push_back(s);
  }

  offsets_.push_back(0);
  for (const auto& [key, states] : groups) {
    for (int s : states) {
      entry_state_.push_back(s);
      entry_level_.push_back(basis.level(s, subsystem));
    }
    offsets_.push_back(static_cast<int>(entry_state_.size()));
  }
}

Eigen::MatrixXcd PartialTracePlan::reduce(const Eigen::VectorXcd& amplitudes) const {
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(levels_, levels_);
  const int groups = static_cast<int>(offsets_.size()) - 1;
  for (int g = 0; g < groups; ++g) {
    for (int a = offsets_[g]; a < offsets_[g + 1]; ++a) {
      const Complex da = amplitudes(entry_state_[a]);
      for (int b = offsets_[g]; b < offsets_[g + 1]; ++b)
        sigma(entry_level_[a], entry_level_[b]) += da * std::conj(amplitudes(entry_state_[b]));
    }
  }
  return sigma;
}

Eigen::MatrixXcd PartialTracePlan::apply_subsystem_operator(
    const Eigen::MatrixXcd& op, const Eigen::MatrixXcd& columns) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(columns.rows(), columns.cols());
  const int groups = static_cast<int>(offsets_.size()) - 1;
  for (int g = 0; g < groups; ++g)
    for (int a = offsets_[g]; a < offsets_[g + 1]; ++a)
      for (int b = offsets_[g]; b < offsets_[g + 1]; ++b)
        out.row(entry_state_[a]) +=
            op(entry_level_[a], entry_level_[b]) * columns.row(entry_state_[b]);
  return out;
}

std::vector<Eigen::MatrixXcd> eigenstate_rdms(const PartialTracePlan& plan,
                                              const ManyBodySpectrum& spec, int count) {
  std::vector<Eigen::MatrixXcd> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) out.push_back(plan.reduce(spec.vectors.col(k)));
  return out;
}

Eigen::MatrixXcd rdm_at(const PureState& state, double time, const PartialTracePlan& plan) {
  return plan.reduce(state.product_amplitudes_at(time));
}

Eigen::MatrixXcd equilibrium_rdm(const PureState& state, const PartialTracePlan& plan) {
  const int n = state.active_dimension();
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(plan.levels(), plan.levels());
  for (int k = 0; k < n; ++k)
    sigma += state.populations()(k) * plan.reduce(state.spectrum().vectors.col(k));
  return sigma;
}

Eigen::MatrixXcd ensemble_average_rdm(const ManyBodySpectrum& spec, const ActiveSpace& active,
                                      const PartialTracePlan& plan) {
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(plan.levels(), plan.levels());
  for (int k = 0; k < active.dimension; ++k) sigma += plan.reduce(spec.vectors.col(k));
  return sigma / static_cast<double>(active.dimension);
}

Eigen::VectorXd canonical_populations(const RotorSpectrum& spec, double beta, int levels) {
  if (beta <= 0.0) throw std::invalid_argument("inverse temperature must be positive");
  Eigen::VectorXd p(levels);
  for (int m = 0; m < levels; ++m) p(m) = std::exp(-beta * spec.energy(m));
  return p / p.sum();
}

Eigen::MatrixXcd canonical_rdm(const RotorSpectrum& spec, double beta, int levels) {
  return canonical_populations(spec, beta, levels).cast<Complex>().asDiagonal();
}

MarginalDensity marginal_density(const Eigen::MatrixXcd& rdm, const RotorSpectrum& spec,
                                 int points) {
  const int levels = static_cast<int>(rdm.rows());
  MarginalDensity out;
  out.spacing = two_pi / points;
  out.grid.resize(points);
  out.density.resize(points);
  std::vector<Complex> values(levels), derivs(levels);
  for (int i = 0; i < points; ++i) {
    const double q = (i + 0.5) * out.spacing;
    out.grid(i) = q;
    spec.eval_levels(q, levels, values.data(), derivs.data());
    Complex p{0.0, 0.0};
    for (int m = 0; m < levels; ++m)
      for (int mp = 0; mp < levels; ++mp)
        p += rdm(m, mp) * values[m] * std::conj(values[mp]);
    out.density(i) = p.real();
    out.max_imag = std::max(out.max_imag, std::abs(p.imag()));
  }
  return out;
}

double hermiticity_gap(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double trace_gap(const Eigen::MatrixXcd& m) { return std::abs(m.trace() - Complex{1.0, 0.0}); }

double min_eigenvalue(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (m + m.adjoint()));
  if (solver.info() != Eigen::Success) throw EigensolverError(static_cast<int>(m.rows()));
  return solver.eigenvalues().minCoeff();
}

OffDiagonalReport off_diagonal_report(const Eigen::MatrixXcd& rdm) {
  OffDiagonalReport report;
  for (int m = 0; m < rdm.rows(); ++m)
    for (int mp = m + 1; mp < rdm.cols(); ++mp) {
      const double mag = std::abs(rdm(m, mp));
      const double lo = std::min(rdm(m, m).real(), rdm(mp, mp).real());
      const double hi = std::max(rdm(m, m).real(), rdm(mp, mp).real());
      report.max_abs = std::max(report.max_abs, mag);
      if (lo > 0.0) report.max_over_min_diag = std::max(report.max_over_min_diag, mag / lo);
      if (hi > 0.0) report.max_over_max_diag = std::max(report.max_over_max_diag, mag / hi);
    }
  return report;
}

Eigen::MatrixXcd project_subsystem_operator(const PartialTracePlan& plan,
                                            const ManyBodySpectrum& spec, int count,
                                            const Eigen::MatrixXcd& op) {
  const auto u = spec.vectors.leftCols(count);
  return u.adjoint() * plan.apply_subsystem_operator(op, u);
}

double spectral_variance_bound(const Eigen::VectorXd& eigenvalues) {
  const double n = static_cast<double>(eigenvalues.size());
  const double mean = eigenvalues.mean();
  const double d2 = (eigenvalues.array() - mean).square().sum();
  return d2 / (n + 1.0);
}

Eigen::MatrixXcd coordinate_window_operator(const RotorSpectrum& spec, double lo, double hi,
                                            int levels) {
  if (!(lo < hi)) throw std::invalid_argument("coordinate window must have lo < hi");
  const FourierBasis& basis = spec.basis();
  const int dim = basis.dimension();
  // <chi_j | chi_window | chi_j'> = (1 / 2 pi) integral_lo^hi e^{i (j'-j) q} dq
  Eigen::MatrixXcd fourier(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const int delta = basis.momentum_at(b) - basis.momentum_at(a);
      if (delta == 0) {
        fourier(a, b) = Complex{(hi - lo) / two_pi, 0.0};
      } else {
        const Complex upper = std::polar(1.0, delta * hi);
        const Complex lower = std::polar(1.0, delta * lo);
        fourier(a, b) = (upper - lower) / Complex{0.0, delta * two_pi};
      }
    }
  const Eigen::MatrixXcd kept = spec.coefficients().leftCols(levels);
  Eigen::MatrixXcd op = kept.adjoint() * fourier * kept;
  return 0.5 * (op + op.adjoint().eval());
}

FluctuationReport fluctuation_bound_check(const PureState& state,
                                          const Eigen::MatrixXcd& observable,
                                          const std::vector<double>& time_grid,
                                          const PartialTracePlan& plan) {
  if (hermiticity_gap(observable) > 1e-12)
    throw std::invalid_argument("observable must be Hermitian");
  const int n = state.active_dimension();
  const ManyBodySpectrum& spec = state.spectrum();

  const Eigen::MatrixXcd compressed = project_subsystem_operator(plan, spec, n, observable);
  const Eigen::MatrixXcd ensemble = ensemble_average_rdm(spec, state.active_space(), plan);

  FluctuationReport report;
  report.equilibrium_value = 0.0;
  for (int k = 0; k < n; ++k)
    report.equilibrium_value += state.populations()(k) * compressed(k, k).real();
  report.ensemble_value = (observable * ensemble).trace().real();
  report.typicality_term =
      (report.equilibrium_value - report.ensemble_value) *
      (report.equilibrium_value - report.ensemble_value);

  double accum = 0.0;
  for (double t : time_grid) {
    const Eigen::VectorXcd c = state.coefficients_at(t);
    const double a = (c.adjoint() * compressed * c)(0, 0).real();
    const double d = a - report.equilibrium_value;
    accum += d * d;
  }
  report.time_variance = time_grid.empty() ? 0.0 : accum / static_cast<double>(time_grid.size());

  // infinite-time limit of the variance, available in closed form because
  // the populations are constants of motion
  for (int k = 0; k < n; ++k)
    for (int kp = 0; kp < n; ++kp) {
      if (k == kp) continue;
      report.exact_time_variance += state.populations()(k) * state.populations()(kp) *
                                    std::norm(compressed(k, kp));
    }

  const double first = (observable * observable * ensemble).trace().real();
  const double second = (observable * ensemble).trace().real();
  report.bound = (first - second * second) / (n + 1.0);
  report.within_bound = report.typicality_term + report.exact_time_variance <= report.bound;
  return report;
}

}  // namespace rotorsim
