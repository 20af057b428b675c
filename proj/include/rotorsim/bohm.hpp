#pragma once

#include <stdexcept>

#include "rotorsim/pure_state.hpp"
#include "rotorsim/trajectory.hpp"

namespace rotorsim {

struct NodeProximityError : std::runtime_error {
  NodeProximityError(double density_, double time_)
      : std::runtime_error("wave-function density too small for a safe velocity"),
        density(density_),
        time(time_) {}
  double density;
  double time;
};

struct NodeUnresolvableError : std::runtime_error {
  NodeUnresolvableError(double density_, double time_)
      : std::runtime_error("node could not be resolved by step halving"),
        density(density_),
        time(time_) {}
  double density;
  double time;
};

// The guiding wave evaluated along a trajectory.
//
// Psi(Q, tau) = sum_l d_l(tau) prod_i phi_{l_i}(Q_i).  The amplitudes d(tau)
// do not depend on Q, so the integrator fetches them once per stage time
// (batched as one matrix product over many future times) and then samples
// the field at whatever configurations the stages visit.
class PilotField {
 public:
  explicit PilotField(const PureState& state);

  int rotor_count() const { return basis_->rotor_count(); }
  int basis_dimension() const { return basis_->dimension(); }

  // product-basis amplitudes at one time
  Eigen::VectorXcd amplitudes_at(double time) const;
  // columns hold the amplitudes at times start + k*spacing, k = 0..count-1
  Eigen::MatrixXcd amplitudes_grid(double start, double spacing, int count) const;

  struct Sample {
    Complex value;
    Eigen::VectorXcd gradient;  // per rotor
    double density = 0.0;
  };
  Sample sample(const Eigen::VectorXcd& amplitudes, const Eigen::VectorXd& angles) const;

  // convenience: amplitudes + sample in one call
  Sample eval(const Eigen::VectorXd& angles, double time) const;

 private:
  Eigen::VectorXcd eigen_coefficients_at(double time) const;

  std::shared_ptr<const ManyBodySpectrum> spectrum_;
  const ProductBasis* basis_;
  int active_ = 0;
  Eigen::VectorXd energies_;
  Eigen::VectorXcd initial_coefficients_;
};

// v_i = 4 pi Im[grad_i Psi / Psi]; throws NodeProximityError below threshold
Eigen::VectorXd bohm_velocity(const PilotField::Sample& sample, double node_threshold,
                              double time);

struct IntegratorSettings {
  double time_step = 0.01;
  // node threshold as a fraction of the mean density (2 pi)^-n
  double node_threshold_scale = 1e-12;
  int max_halvings = 20;
  // stage times of this many grid steps are batched into one matrix product
  int block_steps = 512;
  // largest displacement (radians) a single stage may request; a faster stage
  // halves the step so the discrete flow cannot skip across the density's
  // spatial features.  Zero disables the guard.
  double max_stage_move = 0.25;
};

// Fixed-step classical 4th-order integration of dQ/dtau = v(Q, tau) from
// tau = 0 to t_end.  Any stage falling below the node threshold triggers
// recursive halving of that grid step; the uniform recording grid is
// unaffected.  Angles are wrapped after every step.
TrajectoryRecord integrate_trajectory(const PureState& state, const Eigen::VectorXd& start,
                                      double t_end, const IntegratorSettings& settings,
                                      TrajectoryDiagnostics* diagnostics = nullptr);

}  // namespace rotorsim
