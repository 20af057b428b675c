#pragma once

#include <string>
#include <vector>

#include "rotorsim/pure_state.hpp"

namespace rotorsim {

// Precomputed reduction from product-basis amplitudes to the density matrix
// of one rotor.  Basis states are grouped by their environment configuration
// (all levels except the traced rotor), so a partial trace is one contiguous
// pass over the groups.
class PartialTracePlan {
 public:
  PartialTracePlan(const ProductBasis& basis, int subsystem, int levels);

  int subsystem() const { return subsystem_; }
  int levels() const { return levels_; }

  // sigma_{mm'} = sum_e d_{(m,e)} conj(d_{(m',e)})
  Eigen::MatrixXcd reduce(const Eigen::VectorXcd& amplitudes) const;

  // applies a subsystem operator to every column: out = (op x identity) in
  Eigen::MatrixXcd apply_subsystem_operator(const Eigen::MatrixXcd& op,
                                            const Eigen::MatrixXcd& columns) const;

 private:
  int subsystem_ = 0;
  int levels_ = 0;
  // flattened groups: entries_ lists (basis state, level) pairs, group g
  // covering entries offsets_[g] .. offsets_[g+1]
  std::vector<int> entry_state_;
  std::vector<int> entry_level_;
  std::vector<int> offsets_;
};

// partial traces of the active eigenstate projectors |E_k><E_k|
std::vector<Eigen::MatrixXcd> eigenstate_rdms(const PartialTracePlan& plan,
                                              const ManyBodySpectrum& spec, int count);

Eigen::MatrixXcd rdm_at(const PureState& state, double time, const PartialTracePlan& plan);

// time-averaged density matrix: populations weight the eigenstate traces,
// the phases drop out
Eigen::MatrixXcd equilibrium_rdm(const PureState& state, const PartialTracePlan& plan);

// RPSE average over states: every active eigenstate weighted 1/N
Eigen::MatrixXcd ensemble_average_rdm(const ManyBodySpectrum& spec, const ActiveSpace& active,
                                      const PartialTracePlan& plan);

// thermal populations exp(-beta eps_m)/Z over the first `levels` levels
Eigen::VectorXd canonical_populations(const RotorSpectrum& spec, double beta, int levels);
Eigen::MatrixXcd canonical_rdm(const RotorSpectrum& spec, double beta, int levels);

struct MarginalDensity {
  Eigen::VectorXd grid;     // bin centers on [0, 2 pi)
  Eigen::VectorXd density;  // real part of <q|sigma|q>
  double spacing = 0.0;
  double max_imag = 0.0;    // largest imaginary residue seen on the grid
};

MarginalDensity marginal_density(const Eigen::MatrixXcd& rdm, const RotorSpectrum& spec,
                                 int points);

// validation helpers shared by tests and the analyze command
double hermiticity_gap(const Eigen::MatrixXcd& m);
double trace_gap(const Eigen::MatrixXcd& m);        // |tr m - 1|
double min_eigenvalue(const Eigen::MatrixXcd& m);   // of the Hermitian part

// off-diagonal magnitudes of an equilibrium RDM measured against the two
// associated diagonals; both normalizations are reported because diagonals
// span many orders of magnitude
struct OffDiagonalReport {
  double max_over_min_diag = 0.0;  // max |sigma_mm'| / min(sigma_mm, sigma_m'm')
  double max_over_max_diag = 0.0;  // max |sigma_mm'| / max(sigma_mm, sigma_m'm')
  double max_abs = 0.0;
};
OffDiagonalReport off_diagonal_report(const Eigen::MatrixXcd& rdm);

// matrix elements of the window indicator chi_[lo,hi](q) between rotor
// levels, evaluated analytically through the Fourier expansion
Eigen::MatrixXcd coordinate_window_operator(const RotorSpectrum& spec, double lo, double hi,
                                            int levels);

// compressed matrix elements <E_k| a x identity |E_k'> over active states
Eigen::MatrixXcd project_subsystem_operator(const PartialTracePlan& plan,
                                            const ManyBodySpectrum& spec, int count,
                                            const Eigen::MatrixXcd& op);

// spectral-variance bound D2/(N+1) with D2 = sum_k (lambda_k - D1)^2
double spectral_variance_bound(const Eigen::VectorXd& eigenvalues);

struct FluctuationReport {
  double equilibrium_value = 0.0;     // time average of a(t) for this state
  double ensemble_value = 0.0;        // RPSE average of the same
  double typicality_term = 0.0;       // (equilibrium - ensemble)^2
  double time_variance = 0.0;         // grid average of (a(t) - equilibrium)^2
  double exact_time_variance = 0.0;   // sum_{k!=k'} P_k P_k' |a_kk'|^2
  double bound = 0.0;                 // [tr(a^2 <s>) - tr(a <s>)^2] / (N+1)
  bool within_bound = false;          // typicality + exact variance vs bound
};

// checks the subsystem fluctuation inequality for one sampled state: the
// typicality term plus the time variance must stay below the bound built
// from the ensemble-averaged density matrix
FluctuationReport fluctuation_bound_check(const PureState& state,
                                          const Eigen::MatrixXcd& observable,
                                          const std::vector<double>& time_grid,
                                          const PartialTracePlan& plan);

}  // namespace rotorsim
