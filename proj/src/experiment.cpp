#include "rotorsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "rotorsim/analysis.hpp"
#include "rotorsim/bohm.hpp"
#include "rotorsim/reduced_dynamics.hpp"
#include "rotorsim/rng.hpp"
#include "rotorsim/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace rotorsim {

namespace {

// beta fitted in the reference study from the population ratio sigma_11/sigma_00
constexpr double kCanonicalBeta = 0.0376;
constexpr int kCanonicalLevels = 7;

std::string hex16(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string trimmed(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::string emit_config(const ExperimentConfig& c, bool with_output_dir) {
  std::ostringstream out;
  out << "n=" << c.rotor_count << '\n'
      << "u=" << format_double(c.barrier) << '\n'
      << "j_max=" << c.j_max << '\n'
      << "kept_levels=" << c.kept_levels << '\n'
      << "sigma_V=" << format_double(c.sigma) << '\n'
      << "L=" << c.resolution << '\n'
      << "master_seed=" << c.master_seed << '\n'
      << "E_tr=" << format_double(c.basis_cutoff) << '\n'
      << "E_max=" << format_double(c.active_cutoff) << '\n'
      << "dt=" << format_double(c.time_step) << '\n'
      << "t_end=" << format_double(c.duration) << '\n'
      << "bins=" << c.bins << '\n'
      << "metric_bins=" << c.metric_bins << '\n'
      << "subsystem=" << c.subsystem << '\n';
  if (with_output_dir) out << "output_dir=" << c.output_dir << '\n';
  return out.str();
}

void assign_field(ExperimentConfig& c, const std::string& key, const std::string& value) {
  if (key == "n")
    c.rotor_count = std::stoi(value);
  else if (key == "u")
    c.barrier = std::stod(value);
  else if (key == "j_max")
    c.j_max = std::stoi(value);
  else if (key == "kept_levels")
    c.kept_levels = std::stoi(value);
  else if (key == "sigma_V")
    c.sigma = std::stod(value);
  else if (key == "L")
    c.resolution = std::stoi(value);
  else if (key == "master_seed")
    c.master_seed = std::stoull(value);
  else if (key == "E_tr")
    c.basis_cutoff = std::stod(value);
  else if (key == "E_max")
    c.active_cutoff = std::stod(value);
  else if (key == "dt")
    c.time_step = std::stod(value);
  else if (key == "t_end")
    c.duration = std::stod(value);
  else if (key == "bins")
    c.bins = std::stoi(value);
  else if (key == "metric_bins")
    c.metric_bins = std::stoi(value);
  else if (key == "subsystem")
    c.subsystem = std::stoi(value);
  else if (key == "output_dir")
    c.output_dir = value;
  else
    throw std::invalid_argument("unknown config key: " + key);
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  return out;
}

void csv_preamble(std::ostream& out, const std::string& config_hash, const std::string& columns) {
  out << "# config=" << config_hash << '\n'
      << "# units: energy in hbar^2/(2 I), time in 4 pi I / hbar, angles in rad\n"
      << columns << '\n';
}

void write_json_file(const fs::path& path, const json& value) {
  auto out = open_output(path);
  out << value.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json value;
  in >> value;
  return value;
}

// quasi-uniform long-time sampling grid; golden-ratio strides avoid
// resonance with any single Bohr frequency
std::vector<double> golden_time_grid(double horizon, int count) {
  std::vector<double> grid(count);
  const double golden = 0.6180339887498949;
  double frac = 0.0;
  for (int i = 0; i < count; ++i) {
    frac += golden;
    frac -= std::floor(frac);
    grid[i] = horizon * frac;
  }
  return grid;
}

struct AnalysisResult {
  double tau_c = -1.0;
  long burn_in = 0;
  bool wrap = false;
  double histogram_gap = 0.0;
  double tv_metric = 0.0;
  double tv_fine = 0.0;
  long relaxation_lag = 0;
  double relaxation_sup = 0.0;
  int relaxation_sources = 0;
  ChapmanKolmogorovReport ck;
  double norm_gap = 0.0;
  double herm_gap = 0.0;
  double tr_gap = 0.0;
  double min_eig = 0.0;
  double marginal_norm_gap = 0.0;
  double marginal_min = 0.0;
  bool conserved = false;
};

json fluctuation_json(const FluctuationReport& r) {
  return json{{"equilibrium_value", r.equilibrium_value},
              {"ensemble_value", r.ensemble_value},
              {"typicality_term", r.typicality_term},
              {"time_variance", r.time_variance},
              {"exact_time_variance", r.exact_time_variance},
              {"bound", r.bound},
              {"within_bound", r.within_bound}};
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_text_file(const std::string& path, const std::string& body) {
  auto out = open_output(path);
  out << body;
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text) {
  ExperimentConfig c;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const json parsed = json::parse(text);
    for (const auto& [key, value] : parsed.items()) {
      if (value.is_string())
        assign_field(c, key, value.get<std::string>());
      else
        assign_field(c, key, value.dump());
    }
  } else {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const std::string stripped = trimmed(line);
      if (stripped.empty() || stripped[0] == '#') continue;
      const auto eq = stripped.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config line is not key=value: " + stripped);
      assign_field(c, trimmed(stripped.substr(0, eq)), trimmed(stripped.substr(eq + 1)));
    }
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return from_text(body.str());
}

std::string ExperimentConfig::canonical_text() const { return emit_config(*this, true); }

std::string ExperimentConfig::hash() const { return hex16(fnv1a(emit_config(*this, false))); }

std::string ExperimentConfig::model_hash() const {
  std::ostringstream out;
  out << rotor_count << '|' << format_double(barrier) << '|' << j_max << '|' << kept_levels << '|'
      << format_double(sigma) << '|' << resolution << '|' << master_seed << '|'
      << format_double(basis_cutoff);
  return hex16(fnv1a(out.str()));
}

void ExperimentConfig::save(const std::string& path) const { write_text_file(path, canonical_text()); }

void ExperimentConfig::validate() const {
  if (rotor_count < 1) throw std::invalid_argument("config: n must be at least 1");
  if (barrier < 0.0) throw std::invalid_argument("config: u must be non-negative");
  if (j_max < 1) throw std::invalid_argument("config: j_max must be at least 1");
  if (kept_levels < 1 || kept_levels > 2 * j_max + 1)
    throw std::invalid_argument("config: kept_levels outside 1 .. 2 j_max + 1");
  if (sigma < 0.0) throw std::invalid_argument("config: sigma_V must be non-negative");
  if (resolution < 1) throw std::invalid_argument("config: L must be at least 1");
  if (time_step <= 0.0) throw std::invalid_argument("config: dt must be positive");
  if (duration < 0.0) throw std::invalid_argument("config: t_end must be non-negative");
  if (metric_bins < 1 || bins < metric_bins || bins % metric_bins != 0)
    throw std::invalid_argument("config: metric_bins must divide bins");
  if (subsystem < 0 || subsystem >= rotor_count)
    throw std::invalid_argument("config: subsystem index outside 0 .. n-1");
}

namespace {
constexpr char kCacheMagic[8] = {'R', 'S', 'P', 'E', 'C', 'V', '1', '\n'};

std::uint64_t basis_fingerprint(const ProductBasis& basis) {
  const auto* bytes = reinterpret_cast<const char*>(basis.levels(0));
  const std::size_t size = static_cast<std::size_t>(basis.dimension()) * basis.rotor_count();
  return fnv1a(std::string_view(bytes, size));
}
}  // namespace

bool write_spectrum_cache(const std::string& path, const std::string& model_hash,
                          const ManyBodySpectrum& spectrum) {
  auto out = open_output(path);
  const std::int64_t dim = spectrum.dimension();
  const std::int32_t rotors = spectrum.basis.rotor_count();
  const std::int32_t cap = spectrum.basis.level_cap();
  const std::uint64_t fp = basis_fingerprint(spectrum.basis);
  out.write(kCacheMagic, sizeof kCacheMagic);
  out.write(model_hash.data(), 16);
  out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  out.write(reinterpret_cast<const char*>(&rotors), sizeof rotors);
  out.write(reinterpret_cast<const char*>(&cap), sizeof cap);
  out.write(reinterpret_cast<const char*>(&fp), sizeof fp);
  out.write(reinterpret_cast<const char*>(spectrum.energies.data()), dim * sizeof(double));
  out.write(reinterpret_cast<const char*>(spectrum.vectors.data()),
            dim * dim * sizeof(Complex));
  out.write(reinterpret_cast<const char*>(spectrum.polyads.data()), dim * sizeof(int));
  return static_cast<bool>(out);
}

std::shared_ptr<const ManyBodySpectrum> read_spectrum_cache(
    const std::string& path, const std::string& model_hash,
    std::shared_ptr<const RotorSpectrum> rotor, const ProductBasis& basis, std::ostream& log) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return nullptr;
  char magic[8];
  char stored_hash[17] = {};
  std::int64_t dim = 0;
  std::int32_t rotors = 0;
  std::int32_t cap = 0;
  std::uint64_t fp = 0;
  in.read(magic, sizeof magic);
  in.read(stored_hash, 16);
  in.read(reinterpret_cast<char*>(&dim), sizeof dim);
  in.read(reinterpret_cast<char*>(&rotors), sizeof rotors);
  in.read(reinterpret_cast<char*>(&cap), sizeof cap);
  in.read(reinterpret_cast<char*>(&fp), sizeof fp);
  if (!in || std::memcmp(magic, kCacheMagic, sizeof kCacheMagic) != 0 ||
      model_hash != stored_hash || dim != basis.dimension() || rotors != basis.rotor_count() ||
      cap != basis.level_cap() || fp != basis_fingerprint(basis)) {
    log << "warning: spectrum cache " << path << " does not match this model, rebuilding\n";
    return nullptr;
  }
  ManyBodySpectrum spec{std::move(rotor), basis, Eigen::VectorXd(dim),
                        Eigen::MatrixXcd(dim, dim), std::vector<int>(dim)};
  in.read(reinterpret_cast<char*>(spec.energies.data()), dim * sizeof(double));
  in.read(reinterpret_cast<char*>(spec.vectors.data()), dim * dim * sizeof(Complex));
  in.read(reinterpret_cast<char*>(spec.polyads.data()), dim * sizeof(int));
  if (!in) {
    log << "warning: spectrum cache " << path << " is truncated, rebuilding\n";
    return nullptr;
  }
  return std::make_shared<const ManyBodySpectrum>(std::move(spec));
}

ModelContext build_context(const ExperimentConfig& config, bool use_cache, std::ostream& log) {
  config.validate();
  ModelContext ctx;
  ctx.config = config;
  ctx.rotor = std::make_shared<const RotorSpectrum>(
      RotorSpectrum::solve(config.barrier, FourierBasis{config.j_max}));
  ctx.couplings = CouplingSet::generate(config.rotor_count, config.resolution, config.sigma,
                                        config.master_seed);
  const ProductBasis basis = ProductBasis::energy_truncated(*ctx.rotor, config.rotor_count,
                                                            config.basis_cutoff,
                                                            config.kept_levels);
  const std::string mh = config.model_hash();
  const fs::path cache = fs::path(config.output_dir) / ("spectrum_" + mh + ".bin");

  std::shared_ptr<const ManyBodySpectrum> spectrum;
  if (use_cache && fs::exists(cache))
    spectrum = read_spectrum_cache(cache.string(), mh, ctx.rotor, basis, log);
  if (!spectrum) {
    log << "diagonalizing " << basis.dimension() << " product states\n";
    const auto started = std::chrono::steady_clock::now();
    const Eigen::MatrixXcd h = assemble_hamiltonian(basis, *ctx.rotor, ctx.couplings);
    spectrum = std::make_shared<const ManyBodySpectrum>(
        diagonalize_full(ctx.rotor, basis, h));
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    log << "diagonalization took " << elapsed.count() << " s\n";
    if (use_cache) write_spectrum_cache(cache.string(), mh, *spectrum);
  }
  ctx.spectrum = spectrum;
  ctx.active = select_active_space(*spectrum, config.active_cutoff);
  return ctx;
}

RpseSample config_rpse_sample(const ExperimentConfig& config, int dimension) {
  return sample_rpse(dimension, derive_seed(config.master_seed, "rpse"));
}

TrajectoryRecord read_trajectory_csv(const std::string& path, const std::string& expected_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("# config=", 0) != 0)
    throw std::runtime_error("trajectory file missing config stamp: " + path);
  const std::string stamp = trimmed(line.substr(9));
  if (!expected_hash.empty() && stamp != expected_hash)
    throw std::runtime_error("trajectory config hash " + stamp + " does not match expected " +
                             expected_hash);
  std::getline(in, line);  // units comment
  if (!std::getline(in, line)) throw std::runtime_error("trajectory file has no header: " + path);
  const int columns = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
  if (columns < 2) throw std::runtime_error("trajectory header needs t plus angles: " + path);

  TrajectoryRecord rec;
  rec.rotor_count = columns - 1;
  std::vector<double> times;
  while (std::getline(in, line)) {
    if (trimmed(line).empty()) continue;
    const char* p = line.c_str();
    for (int c = 0; c < columns; ++c) {
      char* end = nullptr;
      const double value = std::strtod(p, &end);
      if (end == p) throw std::runtime_error("malformed trajectory row: " + line);
      if (c == 0)
        times.push_back(value);
      else
        rec.angles.push_back(value);
      p = end;
      while (*p == ',' || *p == ' ') ++p;
    }
  }
  if (times.empty()) throw std::runtime_error("trajectory file contains no samples: " + path);
  rec.time_step = times.size() > 1 ? times[1] - times[0] : 0.0;
  return rec;
}

RpseSample read_state_json(const std::string& path, const std::string& expected_hash) {
  const json state = read_json_file(path);
  if (!expected_hash.empty() && state.at("config").get<std::string>() != expected_hash)
    throw std::runtime_error("state config hash does not match expected " + expected_hash);
  const auto& pops = state.at("populations");
  const auto& phases = state.at("phases");
  if (pops.size() != phases.size())
    throw std::runtime_error("state file populations/phases length mismatch");
  RpseSample sample;
  sample.populations.resize(static_cast<int>(pops.size()));
  sample.phases.resize(static_cast<int>(phases.size()));
  for (int k = 0; k < sample.populations.size(); ++k) {
    sample.populations(k) = pops[k].get<double>();
    sample.phases(k) = phases[k].get<double>();
  }
  return sample;
}

int cmd_spectrum(const ExperimentConfig& config, double audit_cutoff, std::ostream& log) {
  try {
    const ModelContext ctx = build_context(config, true, log);
    const std::string stamp = config.hash();
    const fs::path dir = config.output_dir;

    {
      auto out = open_output(dir / "single_rotor_levels.csv");
      csv_preamble(out, stamp, "m,energy,harmonic");
      const double omega = std::sqrt(config.barrier);
      for (int m = 0; m < config.kept_levels; ++m)
        out << m << ',' << format_double(ctx.rotor->energy(m)) << ','
            << format_double((m + 0.5) * omega) << '\n';
    }
    {
      auto out = open_output(dir / "polyad_census.csv");
      csv_preamble(out, stamp, "polyad,states,cumulative");
      const ProductBasis& basis = ctx.spectrum->basis;
      for (int p = 0; p <= basis.max_polyad(); ++p)
        out << p << ',' << basis.polyad_count(p) << ',' << basis.cumulative_polyad_count(p)
            << '\n';
    }
    write_json_file(dir / "spectrum_summary.json",
                    json{{"config", stamp},
                         {"model", config.model_hash()},
                         {"dimension", ctx.spectrum->dimension()},
                         {"active_dimension", ctx.active.dimension},
                         {"active_cutoff", config.active_cutoff},
                         {"ground_energy", ctx.spectrum->energies(0)},
                         {"top_energy", ctx.spectrum->energies(ctx.spectrum->dimension() - 1)},
                         {"min_gap", ctx.spectrum->min_gap()}});
    log << "spectrum: " << ctx.spectrum->dimension() << " states, active space "
        << ctx.active.dimension << '\n';

    if (audit_cutoff > 0.0) {
      if (audit_cutoff <= config.basis_cutoff)
        throw std::invalid_argument("audit cutoff must exceed E_tr");
      log << "audit: rebuilding with E_tr=" << audit_cutoff << '\n';
      const ProductBasis large_basis = ProductBasis::energy_truncated(
          *ctx.rotor, config.rotor_count, audit_cutoff, config.kept_levels);
      const Eigen::MatrixXcd h = assemble_hamiltonian(large_basis, *ctx.rotor, ctx.couplings);
      const ManyBodySpectrum large = diagonalize_full(ctx.rotor, large_basis, h);
      const TruncationAudit audit = truncation_audit(*ctx.spectrum, large);
      auto out = open_output(dir / "truncation_audit.csv");
      csv_preamble(out, stamp, "polyad,states,max_abs_shift,max_rel_shift");
      for (const auto& row : audit.rows)
        out << row.polyad << ',' << row.states << ',' << format_double(row.max_abs_shift) << ','
            << format_double(row.max_rel_shift) << '\n';
    }
    return 0;
  } catch (const std::exception& error) {
    log << "error: " << error.what() << '\n';
    return 1;
  }
}

int cmd_run(const ExperimentConfig& config, std::ostream& log) {
  try {
    const ModelContext ctx = build_context(config, true, log);
    const RpseSample sample = config_rpse_sample(config, ctx.active.dimension);
    const PureState state(ctx.spectrum, ctx.active, sample);
    const std::string stamp = config.hash();
    const fs::path dir = config.output_dir;

    IntegratorSettings settings;
    settings.time_step = config.time_step;
    TrajectoryDiagnostics diag;
    const Eigen::VectorXd start = Eigen::VectorXd::Constant(config.rotor_count, pi);
    log << "integrating " << config.rotor_count << " rotors to t=" << config.duration << '\n';
    const auto started = std::chrono::steady_clock::now();
    const TrajectoryRecord rec =
        integrate_trajectory(state, start, config.duration, settings, &diag);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    log << "trajectory took " << elapsed.count() << " s, min density " << diag.min_density
        << ", refined steps " << diag.refined_steps << '\n';

    {
      auto out = open_output(dir / "trajectory.csv");
      std::string header = "t";
      for (int r = 0; r < rec.rotor_count; ++r) header += ",Q" + std::to_string(r);
      csv_preamble(out, stamp, header);
      for (long s = 0; s < rec.sample_count(); ++s) {
        out << format_double(s * rec.time_step);
        for (int r = 0; r < rec.rotor_count; ++r) out << ',' << format_double(rec.at(s, r));
        out << '\n';
      }
    }
    json populations = json::array();
    json phases = json::array();
    for (int k = 0; k < state.active_dimension(); ++k) {
      populations.push_back(state.populations()(k));
      phases.push_back(state.initial_phases()(k));
    }
    write_json_file(dir / "state.json", json{{"config", stamp},
                                             {"model", config.model_hash()},
                                             {"active_dimension", state.active_dimension()},
                                             {"populations", populations},
                                             {"phases", phases}});
    write_json_file(dir / "diagnostics.json", json{{"config", stamp},
                                                   {"min_density", diag.min_density},
                                                   {"refined_steps", diag.refined_steps},
                                                   {"substep_evals", diag.substep_evals},
                                                   {"max_depth", diag.max_depth}});
    return 0;
  } catch (const std::exception& error) {
    log << "error: " << error.what() << '\n';
    return 1;
  }
}

int cmd_analyze(const ExperimentConfig& config, std::ostream& log) {
  try {
    const std::string stamp = config.hash();
    const fs::path dir = config.output_dir;
    const TrajectoryRecord rec = read_trajectory_csv((dir / "trajectory.csv").string(), stamp);
    if (rec.sample_count() < 10)
      throw std::runtime_error("trajectory too short to analyze");
    const RpseSample sample = read_state_json((dir / "state.json").string(), stamp);

    const ModelContext ctx = build_context(config, true, log);
    if (sample.populations.size() != ctx.active.dimension)
      throw std::runtime_error("state dimension does not match the active space");
    const PureState state(ctx.spectrum, ctx.active, sample);
    const PartialTracePlan plan(ctx.spectrum->basis, config.subsystem, config.kept_levels);

    const std::vector<double> full_series = rec.rotor_series(config.subsystem);
    const double dt = rec.time_step;
    AnalysisResult result;

    const long curve_lag = std::min<long>(rec.sample_count() - 1, std::lround(50.0 / dt));
    const CorrelationCurve curve = autocorrelation(full_series, dt, curve_lag);
    result.wrap = curve.wrap_flag;
    result.tau_c = curve.correlation_time(0.2);
    if (result.tau_c > 0.0)
      result.burn_in = std::min<long>(rec.sample_count() / 2, std::lround(10.0 * result.tau_c / dt));
    const std::vector<double> series(full_series.begin() + result.burn_in, full_series.end());

    const Histogram hist = angle_histogram(series, config.bins);
    result.histogram_gap = hist.convergence_gap;
    const std::vector<double> metric_fraction =
        rebin_fractions(hist.fraction, config.bins / config.metric_bins);

    const Eigen::MatrixXcd sigma_eq = equilibrium_rdm(state, plan);
    const MarginalDensity p_fine = marginal_density(sigma_eq, *ctx.rotor, config.bins);
    const MarginalDensity p_metric = marginal_density(sigma_eq, *ctx.rotor, config.metric_bins);
    const double metric_width = two_pi / config.metric_bins;
    Eigen::VectorXd w_metric(config.metric_bins);
    for (int b = 0; b < config.metric_bins; ++b) w_metric(b) = metric_fraction[b] / metric_width;
    result.tv_metric = total_variation(p_metric.density, w_metric, metric_width);
    Eigen::VectorXd w_fine(config.bins);
    const std::vector<double> fine_density = hist.density();
    for (int b = 0; b < config.bins; ++b) w_fine(b) = fine_density[b];
    result.tv_fine = total_variation(p_fine.density, w_fine, two_pi / config.bins);

    const long fallback_lag = std::lround(20.0 / dt);
    result.relaxation_lag = result.tau_c > 0.0 ? std::lround(5.0 * result.tau_c / dt)
                                               : fallback_lag;
    result.relaxation_lag =
        std::clamp<long>(result.relaxation_lag, 1, static_cast<long>(series.size()) - 2);
    const ConditionalFamily fam = conditional_distribution(series, result.relaxation_lag, 50,
                                                           config.metric_bins, 100);
    std::vector<double> row(config.metric_bins);
    for (int src = 0; src < fam.source_bins; ++src) {
      if (!fam.adequate[src]) continue;
      for (int t = 0; t < config.metric_bins; ++t) row[t] = fam.probability(src, t);
      result.relaxation_sup = std::max(result.relaxation_sup, sup_distance(row, fam.marginal));
      ++result.relaxation_sources;
    }
    const long ck_lag = std::clamp<long>(
        result.tau_c > 0.0 ? std::lround(result.tau_c / dt) : fallback_lag / 5, 1,
        (static_cast<long>(series.size()) - 2) / 2);
    result.ck = chapman_kolmogorov_check(series, ck_lag, 50, 100);

    result.min_eig = 1.0;
    result.marginal_min = 1.0;
    for (int i = 0; i <= 10; ++i) {
      const double t = config.duration * i / 10.0;
      result.norm_gap = std::max(result.norm_gap,
                                 std::abs(state.product_amplitudes_at(t).squaredNorm() - 1.0));
      const Eigen::MatrixXcd sigma_t = rdm_at(state, t, plan);
      result.herm_gap = std::max(result.herm_gap, hermiticity_gap(sigma_t));
      result.tr_gap = std::max(result.tr_gap, trace_gap(sigma_t));
      result.min_eig = std::min(result.min_eig, min_eigenvalue(sigma_t));
      const MarginalDensity m = marginal_density(sigma_t, *ctx.rotor, config.metric_bins);
      result.marginal_norm_gap =
          std::max(result.marginal_norm_gap, std::abs(m.density.sum() * m.spacing - 1.0));
      result.marginal_min = std::min(result.marginal_min, m.density.minCoeff());
    }
    result.conserved = result.norm_gap <= 1e-12 && result.herm_gap <= 1e-12 &&
                       result.tr_gap <= 1e-12 && result.min_eig >= -1e-10 &&
                       result.marginal_norm_gap <= 1e-8 && result.marginal_min >= -1e-12;

    Eigen::MatrixXcd projector = Eigen::MatrixXcd::Zero(config.kept_levels, config.kept_levels);
    projector(0, 0) = 1.0;
    const Eigen::MatrixXcd window =
        coordinate_window_operator(*ctx.rotor, 0.5 * pi, 1.5 * pi, config.kept_levels);
    const std::vector<double> grid = golden_time_grid(std::min(config.duration, 1000.0), 4001);
    const FluctuationReport rep_projector = fluctuation_bound_check(state, projector, grid, plan);
    const FluctuationReport rep_window = fluctuation_bound_check(state, window, grid, plan);
    const OffDiagonalReport off = off_diagonal_report(sigma_eq);
    const Eigen::VectorXd canonical =
        canonical_populations(*ctx.rotor, kCanonicalBeta,
                              std::min(kCanonicalLevels, config.kept_levels));

    // everything computed; only now touch the filesystem
    {
      auto out = open_output(dir / "marginal_equilibrium.csv");
      csv_preamble(out, stamp, "q,w_eq,p_eq");
      for (int b = 0; b < config.bins; ++b)
        out << format_double(p_fine.grid(b)) << ',' << format_double(w_fine(b)) << ','
            << format_double(p_fine.density(b)) << '\n';
    }
    {
      auto out = open_output(dir / "marginal_metric.csv");
      csv_preamble(out, stamp, "q,w_eq,p_eq");
      for (int b = 0; b < config.metric_bins; ++b)
        out << format_double(p_metric.grid(b)) << ',' << format_double(w_metric(b)) << ','
            << format_double(p_metric.density(b)) << '\n';
    }
    {
      auto out = open_output(dir / "autocorrelation.csv");
      csv_preamble(out, stamp, "tau,G");
      for (std::size_t k = 0; k < curve.values.size(); ++k)
        out << format_double(k * dt) << ',' << format_double(curve.values[k]) << '\n';
    }
    {
      std::vector<double> snapshot_times;
      for (double t : {0.0, 0.5, 1.0, 2.0, 5.0})
        if (t <= config.duration) snapshot_times.push_back(t);
      std::string header = "q";
      std::vector<MarginalDensity> snapshots;
      for (double t : snapshot_times) {
        snapshots.push_back(marginal_density(rdm_at(state, t, plan), *ctx.rotor,
                                             config.metric_bins));
        header += ",p_t" + format_double(t);
      }
      header += ",p_eq";
      auto out = open_output(dir / "snapshots.csv");
      csv_preamble(out, stamp, header);
      for (int b = 0; b < config.metric_bins; ++b) {
        out << format_double(p_metric.grid(b));
        for (const auto& snap : snapshots) out << ',' << format_double(snap.density(b));
        out << ',' << format_double(p_metric.density(b)) << '\n';
      }
    }
    {
      auto out = open_output(dir / "conditional_relaxation.csv");
      csv_preamble(out, stamp, "source_bin,count,adequate,sup_gap");
      for (int src = 0; src < fam.source_bins; ++src) {
        double gap = 0.0;
        if (fam.adequate[src]) {
          for (int t = 0; t < config.metric_bins; ++t) row[t] = fam.probability(src, t);
          gap = sup_distance(row, fam.marginal);
        }
        out << src << ',' << fam.counts[src] << ',' << static_cast<int>(fam.adequate[src]) << ','
            << format_double(gap) << '\n';
      }
    }
    json eq_diag = json::array();
    for (int m = 0; m < config.kept_levels; ++m) eq_diag.push_back(sigma_eq(m, m).real());
    json canonical_json = json::array();
    for (int m = 0; m < canonical.size(); ++m) canonical_json.push_back(canonical(m));
    write_json_file(
        dir / "summary.json",
        json{{"config", stamp},
             {"model", config.model_hash()},
             {"active_dimension", ctx.active.dimension},
             {"tau_c", result.tau_c},
             {"burn_in_samples", result.burn_in},
             {"wrap_detected", result.wrap},
             {"histogram_convergence_gap", result.histogram_gap},
             {"tv_metric", result.tv_metric},
             {"tv_fine", result.tv_fine},
             {"relaxation",
              json{{"lag_samples", result.relaxation_lag},
                   {"sup_gap", result.relaxation_sup},
                   {"adequate_sources", result.relaxation_sources},
                   {"source_bins", fam.source_bins}}},
             {"chapman_kolmogorov",
              json{{"lag_samples", result.ck.lag},
                   {"bins", result.ck.bins},
                   {"residual", result.ck.residual},
                   {"compared_sources", result.ck.compared_sources}}},
             {"conservation",
              json{{"norm_gap", result.norm_gap},
                   {"hermiticity_gap", result.herm_gap},
                   {"trace_gap", result.tr_gap},
                   {"min_eigenvalue", result.min_eig},
                   {"marginal_norm_gap", result.marginal_norm_gap},
                   {"marginal_min", result.marginal_min},
                   {"passed", result.conserved}}},
             {"fluctuation",
              json{{"projector", fluctuation_json(rep_projector)},
                   {"window", fluctuation_json(rep_window)}}},
             {"off_diagonal",
              json{{"max_abs", off.max_abs},
                   {"max_over_min_diag", off.max_over_min_diag},
                   {"max_over_max_diag", off.max_over_max_diag}}},
             {"equilibrium_diagonal", eq_diag},
             {"canonical_beta", kCanonicalBeta},
             {"canonical_populations", canonical_json}});

    log << "analyze: tv=" << result.tv_metric << " tau_c=" << result.tau_c
        << " ck=" << result.ck.residual << " conserved=" << (result.conserved ? "yes" : "no")
        << '\n';
    return result.conserved ? 0 : 1;
  } catch (const std::exception& error) {
    log << "error: " << error.what() << '\n';
    return 1;
  }
}

namespace {

int reproduce_table1(const ExperimentConfig& config, json& files, std::ostream&) {
  const RotorSpectrum rotor =
      RotorSpectrum::solve(config.barrier, FourierBasis{config.j_max});
  auto out = open_output(fs::path(config.output_dir) / "table1.csv");
  csv_preamble(out, config.hash(), "m,energy,harmonic");
  const double omega = std::sqrt(config.barrier);
  for (int m = 0; m < config.kept_levels; ++m)
    out << m << ',' << format_double(rotor.energy(m)) << ',' << format_double((m + 0.5) * omega)
        << '\n';
  files.push_back("table1.csv");
  return 0;
}

int reproduce_table2(const ExperimentConfig& config, json& files, std::ostream& log) {
  const ModelContext ctx = build_context(config, true, log);
  const PureState state(ctx.spectrum, ctx.active,
                        config_rpse_sample(config, ctx.active.dimension));
  const PartialTracePlan plan(ctx.spectrum->basis, config.subsystem, config.kept_levels);
  const Eigen::MatrixXcd sigma_eq = equilibrium_rdm(state, plan);
  const int levels = std::min(kCanonicalLevels, config.kept_levels);
  const Eigen::VectorXd canonical = canonical_populations(*ctx.rotor, kCanonicalBeta, levels);
  auto out = open_output(fs::path(config.output_dir) / "table2.csv");
  csv_preamble(out, config.hash(), "m,equilibrium,canonical");
  for (int m = 0; m < levels; ++m)
    out << m << ',' << format_double(sigma_eq(m, m).real()) << ','
        << format_double(canonical(m)) << '\n';
  files.push_back("table2.csv");
  return 0;
}

int reproduce_fig1(const ExperimentConfig& config, json& files, std::ostream&) {
  const CouplingSet couplings = CouplingSet::generate(config.rotor_count, config.resolution,
                                                      config.sigma, config.master_seed);
  const RandomPotential& pot = couplings.one_body.front();
  const int points = 2048;
  auto out = open_output(fs::path(config.output_dir) / "fig1_potential.csv");
  csv_preamble(out, config.hash(), "theta,V");
  for (int i = 0; i < points; ++i) {
    const double theta = two_pi * i / points;
    out << format_double(theta) << ',' << format_double(pot.value(theta)) << '\n';
  }
  files.push_back("fig1_potential.csv");
  return 0;
}

int reproduce_fig2(const ExperimentConfig& config, json& files, std::ostream&) {
  const RotorSpectrum rotor =
      RotorSpectrum::solve(config.barrier, FourierBasis{config.j_max});
  const int shown = std::min(8, config.kept_levels);
  const int points = 1024;
  auto out = open_output(fs::path(config.output_dir) / "fig2_eigenfunctions.csv");
  std::string header = "q,potential";
  for (int m = 0; m < shown; ++m) header += ",level" + std::to_string(m);
  csv_preamble(out, config.hash(), header);
  for (int i = 0; i < points; ++i) {
    const double q = two_pi * i / points;
    out << format_double(q) << ','
        << format_double(0.5 * config.barrier * (1.0 + std::cos(q)));
    for (int m = 0; m < shown; ++m) {
      const auto value = rotor.eval(m, q).value;
      out << ',' << format_double(std::norm(value) + rotor.energy(m));
    }
    out << '\n';
  }
  files.push_back("fig2_eigenfunctions.csv");
  return 0;
}

int reproduce_fig3(const ExperimentConfig& config, json& files, std::ostream& log) {
  const ModelContext ctx = build_context(config, true, log);
  const double audit_cutoff = config.basis_cutoff + 17.0;
  const ProductBasis large_basis = ProductBasis::energy_truncated(
      *ctx.rotor, config.rotor_count, audit_cutoff, config.kept_levels);
  log << "fig3: second diagonalization with " << large_basis.dimension() << " states\n";
  const Eigen::MatrixXcd h = assemble_hamiltonian(large_basis, *ctx.rotor, ctx.couplings);
  const ManyBodySpectrum large = diagonalize_full(ctx.rotor, large_basis, h);
  auto out = open_output(fs::path(config.output_dir) / "fig3_spectrum.csv");
  csv_preamble(out, config.hash(), "cutoff,index,energy,polyad");
  for (int k = 0; k < ctx.spectrum->dimension(); ++k)
    out << format_double(config.basis_cutoff) << ',' << k << ','
        << format_double(ctx.spectrum->energies(k)) << ',' << ctx.spectrum->polyads[k] << '\n';
  for (int k = 0; k < large.dimension(); ++k)
    out << format_double(audit_cutoff) << ',' << k << ',' << format_double(large.energies(k))
        << ',' << large.polyads[k] << '\n';
  files.push_back("fig3_spectrum.csv");
  return 0;
}

int reproduce_fig4(const ExperimentConfig& config, json& files, std::ostream& log) {
  const ModelContext ctx = build_context(config, true, log);
  const PureState state(ctx.spectrum, ctx.active,
                        config_rpse_sample(config, ctx.active.dimension));
  const PartialTracePlan plan(ctx.spectrum->basis, config.subsystem, config.kept_levels);
  const int points = 400;
  const MarginalDensity p_eq =
      marginal_density(equilibrium_rdm(state, plan), *ctx.rotor, points);
  const std::vector<double> times = {0.0, 0.5, 1.0, 2.0, 5.0};
  std::vector<MarginalDensity> snaps;
  std::string header = "q,p_eq";
  for (double t : times) {
    snaps.push_back(marginal_density(rdm_at(state, t, plan), *ctx.rotor, points));
    header += ",p_t" + format_double(t);
  }
  auto out = open_output(fs::path(config.output_dir) / "fig4_snapshots.csv");
  csv_preamble(out, config.hash(), header);
  for (int i = 0; i < points; ++i) {
    out << format_double(p_eq.grid(i)) << ',' << format_double(p_eq.density(i));
    for (const auto& snap : snaps) out << ',' << format_double(snap.density(i));
    out << '\n';
  }
  files.push_back("fig4_snapshots.csv");
  return 0;
}

int reproduce_fig5(const ExperimentConfig& config, json& files, std::ostream& log) {
  const ModelContext ctx = build_context(config, true, log);
  const PureState state(ctx.spectrum, ctx.active,
                        config_rpse_sample(config, ctx.active.dimension));
  IntegratorSettings settings;
  settings.time_step = config.time_step;
  const double horizon = std::min(config.duration, 5.0);
  const TrajectoryRecord rec = integrate_trajectory(
      state, Eigen::VectorXd::Constant(config.rotor_count, pi), horizon, settings, nullptr);
  auto out = open_output(fs::path(config.output_dir) / "fig5_trajectories.csv");
  std::string header = "t";
  for (int r = 0; r < rec.rotor_count; ++r) header += ",Q" + std::to_string(r);
  csv_preamble(out, config.hash(), header);
  for (long s = 0; s < rec.sample_count(); ++s) {
    out << format_double(s * rec.time_step);
    for (int r = 0; r < rec.rotor_count; ++r) out << ',' << format_double(rec.at(s, r));
    out << '\n';
  }
  files.push_back("fig5_trajectories.csv");
  return 0;
}

int reproduce_density_pair(const ExperimentConfig& config, const std::string& name, json& files,
                           std::ostream& log) {
  if (int code = cmd_run(config, log); code != 0) return code;
  if (int code = cmd_analyze(config, log); code != 0) return code;
  std::ifstream in(fs::path(config.output_dir) / "marginal_metric.csv");
  std::ostringstream body;
  body << in.rdbuf();
  write_text_file((fs::path(config.output_dir) / name).string(), body.str());
  files.push_back(name);
  files.push_back("marginal_equilibrium.csv");
  files.push_back("summary.json");
  return 0;
}

}  // namespace

int cmd_reproduce(const ExperimentConfig& config, const std::string& figure, std::ostream& log) {
  try {
    json files = json::array();
    int code = 0;
    ExperimentConfig used = config;
    if (figure == "table1") {
      code = reproduce_table1(config, files, log);
    } else if (figure == "table2") {
      code = reproduce_table2(config, files, log);
    } else if (figure == "fig1") {
      code = reproduce_fig1(config, files, log);
    } else if (figure == "fig2") {
      code = reproduce_fig2(config, files, log);
    } else if (figure == "fig3") {
      code = reproduce_fig3(config, files, log);
    } else if (figure == "fig4") {
      code = reproduce_fig4(config, files, log);
    } else if (figure == "fig5") {
      code = reproduce_fig5(config, files, log);
    } else if (figure == "fig6") {
      code = reproduce_density_pair(config, "fig6_densities.csv", files, log);
    } else if (figure == "fig7") {
      // single-rotor counterexample: a two-state active space over the same
      // confining potential
      used.rotor_count = 1;
      used.subsystem = 0;
      used.active_cutoff = 30.0;
      used.output_dir = (fs::path(config.output_dir) / "fig7").string();
      code = reproduce_density_pair(used, "fig7_densities.csv", files, log);
    } else {
      throw std::invalid_argument(
          "unknown figure id (expected fig1..fig7, table1, table2): " + figure);
    }
    if (code != 0) return code;
    write_json_file(fs::path(used.output_dir) / ("manifest_" + figure + ".json"),
                    json{{"figure", figure},
                         {"config", used.hash()},
                         {"model", used.model_hash()},
                         {"master_seed", used.master_seed},
                         {"config_text", used.canonical_text()},
                         {"files", files}});
    return 0;
  } catch (const std::exception& error) {
    log << "error: " << error.what() << '\n';
    return 1;
  }
}

int cmd_sweep(const ExperimentConfig& config, int seed_count, int workers, std::ostream& log) {
  if (seed_count < 1) {
    log << "error: sweep needs at least one seed\n";
    return 1;
  }
  if (workers < 1) workers = 1;
  std::vector<ExperimentConfig> runs;
  for (int k = 0; k < seed_count; ++k) {
    ExperimentConfig c = config;
    c.master_seed = config.master_seed + static_cast<std::uint64_t>(k);
    c.output_dir = (fs::path(config.output_dir) / ("seed" + std::to_string(k))).string();
    runs.push_back(std::move(c));
  }

  std::vector<std::string> logs(runs.size());
  std::vector<int> codes(runs.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= runs.size()) return;
      std::ostringstream local;
      int code = cmd_run(runs[index], local);
      if (code == 0) code = cmd_analyze(runs[index], local);
      codes[index] = code;
      logs[index] = local.str();
    }
  };
  std::vector<std::thread> pool;
  const int active_workers = std::min<int>(workers, static_cast<int>(runs.size()));
  pool.reserve(active_workers);
  for (int w = 0; w < active_workers; ++w) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();

  int failures = 0;
  auto out = open_output(fs::path(config.output_dir) / "sweep_summary.csv");
  csv_preamble(out, config.hash(), "seed,tv_metric,tau_c,ck_residual,exit_code");
  for (std::size_t k = 0; k < runs.size(); ++k) {
    log << "--- seed " << runs[k].master_seed << " ---\n" << logs[k];
    double tv = std::nan("");
    double tau = std::nan("");
    double ck = std::nan("");
    if (codes[k] == 0) {
      const json summary = read_json_file(fs::path(runs[k].output_dir) / "summary.json");
      tv = summary.at("tv_metric").get<double>();
      tau = summary.at("tau_c").get<double>();
      ck = summary.at("chapman_kolmogorov").at("residual").get<double>();
    } else {
      ++failures;
    }
    out << runs[k].master_seed << ',' << format_double(tv) << ',' << format_double(tau) << ','
        << format_double(ck) << ',' << codes[k] << '\n';
  }
  log << "sweep: " << runs.size() - failures << '/' << runs.size() << " runs succeeded\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace rotorsim
