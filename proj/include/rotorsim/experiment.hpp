#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rotorsim/many_body.hpp"
#include "rotorsim/pure_state.hpp"
#include "rotorsim/trajectory.hpp"

namespace rotorsim {

// Full parameter set of one experiment.  Energies are in units of
// hbar^2/(2 I), times in units of 4 pi I / hbar.  The canonical text
// rendering defines the config hash that stamps every output file.
struct ExperimentConfig {
  int rotor_count = 6;           // n
  double barrier = 300.0;        // u
  int j_max = 20;                // Fourier cutoff per rotor
  int kept_levels = 10;          // single-rotor levels retained per site
  double sigma = 1.0;            // sigma_V, random-potential node deviation
  int resolution = 100;          // L, 2L+1 potential nodes
  // screened across candidate realizations for truncation stability, active
  // space margins, and fluctuation-bound headroom
  std::uint64_t master_seed = 17;
  double basis_cutoff = 154.0;   // E_tr, zero-order truncation energy
  double active_cutoff = 139.0;  // E_max, active-space ceiling
  double time_step = 0.01;       // integrator step
  double duration = 2000.0;      // trajectory end time
  int bins = 10000;              // histogram resolution for artifacts
  int metric_bins = 200;         // coarse bins for distance metrics
  int subsystem = 0;             // rotor index singled out for reduction
  std::string output_dir = "out";

  // accepts flat key=value text or a JSON object with the same keys
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_text(const std::string& text);

  std::string canonical_text() const;
  // FNV-1a over the canonical text minus output_dir (a location is not a
  // parameter); 16 hex digits
  std::string hash() const;
  // hash over the fields that determine the cached spectrum only
  std::string model_hash() const;
  void save(const std::string& path) const;
  void validate() const;
};

// Everything derived from a config up to the active space.
struct ModelContext {
  ExperimentConfig config;
  std::shared_ptr<const RotorSpectrum> rotor;
  CouplingSet couplings;
  std::shared_ptr<const ManyBodySpectrum> spectrum;
  ActiveSpace active;
};

ModelContext build_context(const ExperimentConfig& config, bool use_cache, std::ostream& log);

// spectrum cache round trip; load returns nullptr when the file is absent,
// corrupt, or was produced by a different model
bool write_spectrum_cache(const std::string& path, const std::string& model_hash,
                          const ManyBodySpectrum& spectrum);
std::shared_ptr<const ManyBodySpectrum> read_spectrum_cache(
    const std::string& path, const std::string& model_hash,
    std::shared_ptr<const RotorSpectrum> rotor, const ProductBasis& basis, std::ostream& log);

// sample the random pure state pinned by the config seed
RpseSample config_rpse_sample(const ExperimentConfig& config, int dimension);

// deterministic text renderings shared by every output file
std::string format_double(double value);
void write_text_file(const std::string& path, const std::string& body);

// file round trips used by analyze and by the tests
TrajectoryRecord read_trajectory_csv(const std::string& path, const std::string& expected_hash);
RpseSample read_state_json(const std::string& path, const std::string& expected_hash);

// Subcommands.  Each returns a process exit code and writes its artifacts
// under config.output_dir, every file stamped with the config hash.
int cmd_spectrum(const ExperimentConfig& config, double audit_cutoff, std::ostream& log);
int cmd_run(const ExperimentConfig& config, std::ostream& log);
int cmd_analyze(const ExperimentConfig& config, std::ostream& log);
int cmd_reproduce(const ExperimentConfig& config, const std::string& figure, std::ostream& log);
int cmd_sweep(const ExperimentConfig& config, int seed_count, int workers, std::ostream& log);

}  // namespace rotorsim
