#include "rotorsim/bohm.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rotorsim/units.hpp"

namespace rotorsim {

PilotField::PilotField(const PureState& state)
    : spectrum_(state.spectrum_ptr()),
      basis_(&spectrum_->basis),
      active_(state.active_dimension()),
      energies_(state.active_energies()) {
  if (!spectrum_->rotor)
    throw std::invalid_argument("spectrum carries no single-rotor eigenfunctions");
  initial_coefficients_ = state.coefficients_at(0.0);
}

Eigen::VectorXcd PilotField::eigen_coefficients_at(double time) const {
  Eigen::VectorXcd c(active_);
  for (int k = 0; k < active_; ++k)
    c(k) = initial_coefficients_(k) * std::polar(1.0, -phase_rate * energies_(k) * time);
  return c;
}

Eigen::VectorXcd PilotField::amplitudes_at(double time) const {
  return spectrum_->vectors.leftCols(active_) * eigen_coefficients_at(time);
}

Eigen::MatrixXcd PilotField::amplitudes_grid(double start, double spacing, int count) const {
  Eigen::MatrixXcd coeffs(active_, count);
  for (int c = 0; c < count; ++c)
    coeffs.col(c) = eigen_coefficients_at(start + c * spacing);
  return spectrum_->vectors.leftCols(active_) * coeffs;
}

PilotField::Sample PilotField::sample(const Eigen::VectorXcd& amplitudes,
                                      const Eigen::VectorXd& angles) const {
  const int n = basis_->rotor_count();
  const int levels = basis_->level_cap();
  const RotorSpectrum& rotor = *spectrum_->rotor;

  // per-rotor tables of phi_m(Q_i) and phi_m'(Q_i), one evaluation per call
  thread_local std::vector<Complex> values, derivs, prefix, suffix;
  values.resize(n * levels);
  derivs.resize(n * levels);
  prefix.resize(n + 1);
  suffix.resize(n + 1);
  for (int i = 0; i < n; ++i)
    rotor.eval_levels(angles(i), levels, values.data() + i * levels, derivs.data() + i * levels);

  Sample out;
  out.gradient = Eigen::VectorXcd::Zero(n);
  out.value = Complex{0.0, 0.0};
  for (int s = 0; s < basis_->dimension(); ++s) {
    const std::uint8_t* l = basis_->levels(s);
    // prefix/suffix products let each gradient slot reuse the other factors
    prefix[0] = Complex{1.0, 0.0};
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] * values[i * levels + l[i]];
    suffix[n] = Complex{1.0, 0.0};
    for (int i = n - 1; i >= 0; --i) suffix[i] = suffix[i + 1] * values[i * levels + l[i]];

    const Complex d = amplitudes(s);
    out.value += d * prefix[n];
    for (int i = 0; i < n; ++i)
      out.gradient(i) += d * prefix[i] * derivs[i * levels + l[i]] * suffix[i + 1];
  }
  out.density = std::norm(out.value);
  return out;
}

PilotField::Sample PilotField::eval(const Eigen::VectorXd& angles, double time) const {
  return sample(amplitudes_at(time), angles);
}

Eigen::VectorXd bohm_velocity(const PilotField::Sample& sample, double node_threshold,
                              double time) {
  if (!(sample.density >= node_threshold)) throw NodeProximityError(sample.density, time);
  const int n = static_cast<int>(sample.gradient.size());
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = velocity_prefactor * (sample.gradient(i) / sample.value).imag();
  return v;
}

namespace {

double wrap_angle(double q) {
  q = std::fmod(q, two_pi);
  return q < 0.0 ? q + two_pi : q;
}

// internal refinement request raised when a stage moves faster than the
// configured displacement cap
struct StageOverrunError {
  double density;
  double time;
};

struct Stepper {
  const PilotField& field;
  double threshold;
  int max_halvings;
  double max_stage_move;
  TrajectoryDiagnostics* diag;
  // amplitudes precomputed on a uniform time grid; stage times that fall off
  // the grid (deep refinements) are transformed on demand
  const Eigen::MatrixXcd* cache = nullptr;
  double cache_start = 0.0;
  double cache_spacing = 1.0;

  Eigen::VectorXcd amplitude(double time) {
    if (cache) {
      const double pos = (time - cache_start) / cache_spacing;
      const double idx = std::round(pos);
      if (idx >= 0.0 && idx < static_cast<double>(cache->cols()) && std::abs(pos - idx) < 1e-9)
        return cache->col(static_cast<long>(idx));
    }
    if (diag) ++diag->substep_evals;
    return field.amplitudes_at(time);
  }

  Eigen::VectorXd velocity_at(const Eigen::VectorXcd& amplitudes, const Eigen::VectorXd& q,
                              double t, double h) {
    const PilotField::Sample s = field.sample(amplitudes, q);
    if (diag) diag->min_density = std::min(diag->min_density, s.density);
    Eigen::VectorXd v = bohm_velocity(s, threshold, t);
    if (max_stage_move > 0.0 && v.lpNorm<Eigen::Infinity>() * h > max_stage_move)
      throw StageOverrunError{s.density, t};
    return v;
  }

  // one classical 4-stage step over [t, t + h]
  Eigen::VectorXd rk4(const Eigen::VectorXd& q, double t, double h) {
    const Eigen::VectorXcd amp0 = amplitude(t);
    const Eigen::VectorXcd amp_mid = amplitude(t + 0.5 * h);
    const Eigen::VectorXcd amp1 = amplitude(t + h);
    const Eigen::VectorXd k1 = velocity_at(amp0, q, t, h);
    const Eigen::VectorXd k2 = velocity_at(amp_mid, q + 0.5 * h * k1, t + 0.5 * h, h);
    const Eigen::VectorXd k3 = velocity_at(amp_mid, q + 0.5 * h * k2, t + 0.5 * h, h);
    const Eigen::VectorXd k4 = velocity_at(amp1, q + h * k3, t + h, h);
    return q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  // recursive halving around nodes and velocity bursts; returns the
  // configuration at t + h
  Eigen::VectorXd advance(const Eigen::VectorXd& q, double t, double h, int depth) {
    double density = 0.0;
    double when = 0.0;
    try {
      return rk4(q, t, h);
    } catch (const NodeProximityError& node) {
      density = node.density;
      when = node.time;
    } catch (const StageOverrunError& burst) {
      density = burst.density;
      when = burst.time;
    }
    if (depth >= max_halvings) throw NodeUnresolvableError(density, when);
    if (diag) {
      if (depth == 0) ++diag->refined_steps;
      diag->max_depth = std::max(diag->max_depth, depth + 1);
    }
    const double hh = 0.5 * h;
    const Eigen::VectorXd mid = advance(q, t, hh, depth + 1);
    return advance(mid, t + hh, hh, depth + 1);
  }
};

}  // namespace

TrajectoryRecord integrate_trajectory(const PureState& state, const Eigen::VectorXd& start,
                                      double t_end, const IntegratorSettings& settings,
                                      TrajectoryDiagnostics* diagnostics) {
  const PilotField field(state);
  const int n = field.rotor_count();
  if (start.size() != n) throw std::invalid_argument("start configuration has wrong size");
  if (settings.time_step <= 0.0) throw std::invalid_argument("time step must be positive");

  const double h = settings.time_step;
  const long steps = static_cast<long>(std::llround(t_end / h));
  const double threshold =
      settings.node_threshold_scale * std::pow(two_pi, -static_cast<double>(n));

  TrajectoryDiagnostics local;
  local.min_density = std::numeric_limits<double>::infinity();
  Stepper stepper{field, threshold, settings.max_halvings, settings.max_stage_move, &local};

  TrajectoryRecord record;
  record.time_step = h;
  record.rotor_count = n;
  record.angles.reserve((steps + 1) * n);

  Eigen::VectorXd q(n);
  for (int i = 0; i < n; ++i) q(i) = wrap_angle(start(i));
  for (int i = 0; i < n; ++i) record.angles.push_back(q(i));

  // stage times of plain and once-halved steps live on the quarter-step
  // grid, so the amplitude transforms are batched as one dense product per
  // block; only deeper refinements transform on demand
  const int block = std::max(1, settings.block_steps);
  Eigen::MatrixXcd amps;
  for (long step0 = 0; step0 < steps; step0 += block) {
    const int count = static_cast<int>(std::min<long>(block, steps - step0));
    amps = field.amplitudes_grid(step0 * h, 0.25 * h, 4 * count + 1);
    stepper.cache = &amps;
    stepper.cache_start = step0 * h;
    stepper.cache_spacing = 0.25 * h;
    for (int k = 0; k < count; ++k) {
      const double t = (step0 + k) * h;
      q = stepper.advance(q, t, h, 0);
      for (int i = 0; i < n; ++i) q(i) = wrap_angle(q(i));
      for (int i = 0; i < n; ++i) record.angles.push_back(q(i));
    }
  }

  if (diagnostics) *diagnostics = local;
  return record;
}

}  // namespace rotorsim
