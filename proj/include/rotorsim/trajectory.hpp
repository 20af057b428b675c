#pragma once

#include <vector>

namespace rotorsim {

// A single trajectory sampled on a uniform time grid, sample s at time
// s * time_step, angles stored row-major (sample, rotor), all in [0, 2 pi).
struct TrajectoryRecord {
  double time_step = 0.0;
  int rotor_count = 0;
  std::vector<double> angles;

  long sample_count() const {
    return rotor_count ? static_cast<long>(angles.size()) / rotor_count : 0;
  }
  double at(long sample, int rotor) const { return angles[sample * rotor_count + rotor]; }

  std::vector<double> rotor_series(int rotor) const {
    std::vector<double> out(sample_count());
    for (long s = 0; s < sample_count(); ++s) out[s] = at(s, rotor);
    return out;
  }
};

// integration diagnostics accumulated along a run
struct TrajectoryDiagnostics {
  double min_density = 0.0;   // smallest |Psi|^2 seen at any stage
  long refined_steps = 0;     // grid steps that needed at least one halving
  long substep_evals = 0;     // amplitude transforms that missed the block grid
  int max_depth = 0;          // deepest halving level reached
};

}  // namespace rotorsim
