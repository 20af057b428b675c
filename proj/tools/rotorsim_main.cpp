#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "rotorsim/experiment.hpp"

namespace {

using rotorsim::ExperimentConfig;

// command-line values are collected separately so that a --config file can be
// loaded first and individual flags override it afterwards
struct Overrides {
  std::optional<int> n, j_max, kept_levels, L, bins, metric_bins, subsystem;
  std::optional<double> u, sigma_V, E_tr, E_max, dt, t_end;
  std::optional<std::uint64_t> master_seed;
  std::optional<std::string> output_dir;
};

void add_config_flags(CLI::App* cmd, Overrides& o, std::string& config_path) {
  cmd->add_option("-c,--config", config_path, "config file (key=value lines or JSON)");
  cmd->add_option("--n", o.n, "number of rotors");
  cmd->add_option("--u", o.u, "confining barrier height [hbar^2/(2 I)]");
  cmd->add_option("--j_max", o.j_max, "Fourier cutoff per rotor");
  cmd->add_option("--kept_levels", o.kept_levels, "single-rotor levels kept per site");
  cmd->add_option("--sigma_V", o.sigma_V, "random-potential node deviation");
  cmd->add_option("--L", o.L, "potential resolution (2L+1 nodes)");
  cmd->add_option("--master_seed", o.master_seed, "seed for every random draw");
  cmd->add_option("--E_tr", o.E_tr, "zero-order basis truncation energy");
  cmd->add_option("--E_max", o.E_max, "active-space energy ceiling");
  cmd->add_option("--dt", o.dt, "integrator time step [4 pi I / hbar]");
  cmd->add_option("--t_end", o.t_end, "trajectory end time");
  cmd->add_option("--bins", o.bins, "histogram bins for artifacts");
  cmd->add_option("--metric_bins", o.metric_bins, "coarse bins for distance metrics");
  cmd->add_option("--subsystem", o.subsystem, "rotor singled out for reduction");
  cmd->add_option("--output_dir", o.output_dir, "directory for all artifacts");
}

ExperimentConfig resolve(const std::string& config_path, const Overrides& o) {
  ExperimentConfig c =
      config_path.empty() ? ExperimentConfig{} : ExperimentConfig::from_file(config_path);
  if (o.n) c.rotor_count = *o.n;
  if (o.u) c.barrier = *o.u;
  if (o.j_max) c.j_max = *o.j_max;
  if (o.kept_levels) c.kept_levels = *o.kept_levels;
  if (o.sigma_V) c.sigma = *o.sigma_V;
  if (o.L) c.resolution = *o.L;
  if (o.master_seed) c.master_seed = *o.master_seed;
  if (o.E_tr) c.basis_cutoff = *o.E_tr;
  if (o.E_max) c.active_cutoff = *o.E_max;
  if (o.dt) c.time_step = *o.dt;
  if (o.t_end) c.duration = *o.t_end;
  if (o.bins) c.bins = *o.bins;
  if (o.metric_bins) c.metric_bins = *o.metric_bins;
  if (o.subsystem) c.subsystem = *o.subsystem;
  if (o.output_dir) c.output_dir = *o.output_dir;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coupled confined rotors: spectra, Bohm trajectories, and their statistics"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  double audit_cutoff = 0.0;
  std::string figure;
  int seed_count = 4;
  int workers = static_cast<int>(std::thread::hardware_concurrency());

  CLI::App* spectrum = app.add_subcommand(
      "spectrum", "diagonalize the model, cache the spectrum, write level tables");
  add_config_flags(spectrum, overrides, config_path);
  spectrum->add_option("--audit", audit_cutoff,
                       "also diagonalize at this larger E_tr and report eigenvalue shifts");

  CLI::App* run = app.add_subcommand(
      "run", "sample the random pure state and integrate one Bohm trajectory");
  add_config_flags(run, overrides, config_path);

  CLI::App* analyze = app.add_subcommand(
      "analyze", "turn a finished trajectory into histograms, correlations and checks");
  add_config_flags(analyze, overrides, config_path);

  CLI::App* reproduce = app.add_subcommand(
      "reproduce", "write the plot-ready data bundle for one named artifact");
  add_config_flags(reproduce, overrides, config_path);
  reproduce->add_option("figure", figure, "fig1..fig7, table1 or table2")->required();

  CLI::App* sweep =
      app.add_subcommand("sweep", "repeat run+analyze over consecutive master seeds");
  add_config_flags(sweep, overrides, config_path);
  sweep->add_option("--seeds", seed_count, "number of consecutive seeds");
  sweep->add_option("--workers", workers, "parallel worker threads");

  CLI11_PARSE(app, argc, argv);

  try {
    const ExperimentConfig config = resolve(config_path, overrides);
    std::cout << "config hash " << config.hash() << '\n';
    if (spectrum->parsed()) return rotorsim::cmd_spectrum(config, audit_cutoff, std::cout);
    if (run->parsed()) return rotorsim::cmd_run(config, std::cout);
    if (analyze->parsed()) return rotorsim::cmd_analyze(config, std::cout);
    if (reproduce->parsed()) return rotorsim::cmd_reproduce(config, figure, std::cout);
    if (sweep->parsed()) return rotorsim::cmd_sweep(config, seed_count, workers, std::cout);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << '\n';
    return 1;
  }
  return 1;
}
