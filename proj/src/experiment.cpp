#include "fsq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fsq/errors.hpp"

namespace fsq {

namespace {

using nlohmann::json;

double get_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string("config key '") + key + "' must be a number");
  return j.at(key).get<double>();
}

bool get_or(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw ConfigError(std::string("config key '") + key + "' must be a boolean");
  return j.at(key).get<bool>();
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file: " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing output file: " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

constexpr double kPicojoule = 1e-12;

}  // namespace

void ExperimentConfig::validate() const {
  physical.validate();
  stepper.validate();
  if (grid.n_points < 16) throw ConfigError("grid.n_points must be >= 16");
  if (!(grid.tau_window > 0)) throw ConfigError("grid.tau_window must be positive");
  if (run.energies.empty()) throw ConfigError("pulse.energy_pj must list at least one energy");
  for (double e : run.energies)
    if (!(e >= 0) || !std::isfinite(e)) throw ConfigError("pulse energies must be >= 0");
  if (run.trajectories < 2) throw ConfigError("run.trajectories must be >= 2");
  if (run.threads < 0) throw ConfigError("run.threads must be >= 0");
  if (raman.enabled && raman.file.empty() && (stepper.raman_response || stepper.raman_noise))
    throw ConfigError("raman.enabled needs raman.file (or disable raman)");
  if (raman.enabled && !raman.file.empty() && !std::filesystem::exists(raman.file))
    throw ConfigError("raman.file does not exist: " + raman.file);
  for (double z : snapshot_zetas)
    if (!(z >= 0)) throw ConfigError("stepper.snapshots positions must be >= 0");
}

ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    if (j.contains("physical")) {
      const auto& p = j.at("physical");
      cfg.physical.t0 = get_or(p, "t0_fs", cfg.physical.t0 / 1e-15) * 1e-15;
      cfg.physical.z0 = get_or(p, "z0_m", cfg.physical.z0);
      cfg.physical.nbar = get_or(p, "nbar", cfg.physical.nbar);
      cfg.physical.lambda0 = get_or(p, "lambda0_um", cfg.physical.lambda0 / 1e-6) * 1e-6;
      cfg.physical.temperature = get_or(p, "temperature_k", cfg.physical.temperature);
      cfg.physical.fiber_length = get_or(p, "fiber_length_m", cfg.physical.fiber_length);
      cfg.physical.loss_fraction = get_or(p, "loss_fraction", cfg.physical.loss_fraction);
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cfg.grid.n_points =
          static_cast<std::size_t>(get_or(g, "n_points", static_cast<double>(cfg.grid.n_points)));
      cfg.grid.tau_window = get_or(g, "tau_window", cfg.grid.tau_window);
    }
    if (j.contains("stepper")) {
      const auto& s = j.at("stepper");
      cfg.stepper.d_zeta = get_or(s, "d_zeta", cfg.stepper.d_zeta);
      cfg.stepper.dispersion = get_or(s, "dispersion", cfg.stepper.dispersion);
      cfg.stepper.nonlinearity = get_or(s, "nonlinearity", cfg.stepper.nonlinearity);
      cfg.stepper.vacuum_noise = get_or(s, "vacuum_noise", cfg.stepper.vacuum_noise);
      cfg.stepper.raman_noise = get_or(s, "raman_noise", cfg.stepper.raman_noise);
      cfg.stepper.raman_response = get_or(s, "raman_response", cfg.stepper.raman_response);
      cfg.stepper.aliasing_threshold =
          get_or(s, "aliasing_threshold", cfg.stepper.aliasing_threshold);
      if (s.contains("snapshots"))
        cfg.snapshot_zetas = s.at("snapshots").get<std::vector<double>>();
    }
    if (j.contains("raman")) {
      const auto& r = j.at("raman");
      if (r.contains("file")) cfg.raman.file = r.at("file").get<std::string>();
      cfg.raman.instantaneous_fraction =
          get_or(r, "instantaneous_fraction", cfg.raman.instantaneous_fraction);
      cfg.raman.enabled = get_or(r, "enabled", cfg.raman.enabled);
    }
    if (j.contains("pulse")) {
      const auto& p = j.at("pulse");
      if (p.contains("energy_pj")) {
        if (p.at("energy_pj").is_array())
          cfg.run.energies = p.at("energy_pj").get<std::vector<double>>();
        else
          cfg.run.energies = {p.at("energy_pj").get<double>()};
        for (double& e : cfg.run.energies) e *= kPicojoule;
      }
      cfg.run.relative_phase = get_or(p, "relative_phase", cfg.run.relative_phase);
    }
    if (j.contains("run")) {
      const auto& r = j.at("run");
      cfg.run.trajectories = static_cast<std::size_t>(
          get_or(r, "trajectories", static_cast<double>(cfg.run.trajectories)));
      cfg.run.seed =
          static_cast<std::uint64_t>(get_or(r, "seed", static_cast<double>(cfg.run.seed)));
      if (r.contains("out_dir")) cfg.run.out_dir = r.at("out_dir").get<std::string>();
      if (r.contains("fibre_label")) cfg.run.fibre_label = r.at("fibre_label").get<std::string>();
      cfg.run.threads = static_cast<int>(get_or(r, "threads", static_cast<double>(cfg.run.threads)));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  if (!cfg.raman.file.empty()) {
    std::filesystem::path p = cfg.raman.file;
    if (p.is_relative()) cfg.raman.file = (base_dir / p).string();
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.has_parent_path() ? path.parent_path() : ".");
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  std::string repr;
  auto push = [&repr](double v) {
    repr += format_double(v);
    repr += '|';
  };
  push(c.physical.t0);
  push(c.physical.z0);
  push(c.physical.nbar);
  push(c.physical.lambda0);
  push(c.physical.temperature);
  push(c.physical.fiber_length);
  push(c.physical.loss_fraction);
  push(static_cast<double>(c.grid.n_points));
  push(c.grid.tau_window);
  push(c.stepper.d_zeta);
  push(c.stepper.dispersion);
  push(c.stepper.nonlinearity);
  push(c.stepper.vacuum_noise);
  push(c.stepper.raman_noise);
  push(c.stepper.raman_response);
  for (double z : c.snapshot_zetas) push(z);
  repr += c.raman.file + '|';
  push(c.raman.instantaneous_fraction);
  push(c.raman.enabled);
  for (double e : c.run.energies) push(e);
  push(static_cast<double>(c.run.trajectories));
  push(static_cast<double>(c.run.seed));
  push(c.run.relative_phase);
  repr += c.run.fibre_label;

  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : repr) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

EnsembleResult run_stokes_ensemble(const SimGrid& grid, const SpectralTransform& transform,
                                   const RamanModel& raman, const StepperConfig& stepper,
                                   std::span<const std::complex<double>> mean, double zeta_max,
                                   std::size_t n_trajectories, double relative_phase,
                                   double nbar, std::uint64_t seed, int threads) {
  if (n_trajectories < 2) throw ContractError("run_stokes_ensemble: need >= 2 trajectories");
  const Propagator propagator(grid, transform, raman, stepper, seed);

  EnsembleResult result;
  result.samples.resize(n_trajectories);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> warnings{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  unsigned n_workers = threads > 0 ? static_cast<unsigned>(threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<std::size_t>(n_workers, n_trajectories));

  auto work = [&]() {
    Propagator::Workspace ws(grid.n_points());
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_trajectories || failed.load(std::memory_order_relaxed)) break;
      try {
        FieldState state = initial_state(mean, grid, nbar, seed, static_cast<std::uint32_t>(i),
                                         stepper.vacuum_noise);
        const auto prop = propagator.propagate(state, zeta_max,
                                               static_cast<std::uint32_t>(i), {}, ws);
        warnings += prop.diagnostics.aliasing_warnings;
        result.samples[i] =
            stokes_from_fields(state, relative_phase, nbar, grid.d_tau());
      } catch (const std::exception& e) {
        std::lock_guard lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
        break;
      }
    }
  };

  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw IntegrationError("trajectory failed: " + first_error, zeta_max);

  result.aliasing_warnings = warnings.load();
  return result;
}

namespace {

std::string curve_point_row(double energy_j, const ExtremalAngles& a, std::size_t n_traj) {
  std::string row;
  row += format_double(energy_j / kPicojoule);
  row += ',';
  row += format_double(a.theta_k);
  row += ',';
  row += format_double(a.phi_waveplate() * 180.0 / std::numbers::pi);
  row += ',';
  row += format_double(a.rho_s);
  row += ',';
  row += format_double(a.rho_a);
  row += ',';
  row += format_double(to_decibels(a.rho_s));
  row += ',';
  row += format_double(to_decibels(a.rho_a));
  row += ',';
  row += format_double(a.se_s);
  row += ',';
  row += format_double(a.se_a);
  row += ',';
  row += std::to_string(n_traj);
  row += '\n';
  return row;
}

constexpr const char* kCurveHeader =
    "energy_pj,theta_K_rad,phi_waveplate_deg,rho_s,rho_a,rho_s_db,rho_a_db,se_s,se_a,n_traj\n";

}  // namespace

SweepResult run_sweep(const ExperimentConfig& config) {
  config.validate();
  const SimGrid grid(config.grid.n_points, config.grid.tau_window);
  const SpectralTransform transform(grid);
  RamanConfig raman_config;
  if (config.raman.enabled && !config.raman.file.empty())
    raman_config = load_raman_csv(config.raman.file, config.physical.t0,
                                  config.raman.instantaneous_fraction, config.raman.enabled);
  raman_config.enabled = config.raman.enabled;
  const RamanModel raman(raman_config, grid, transform, config.physical);
  const double zeta_max = dimensionless_length(config.physical);

  SweepResult sweep;
  std::string csv = kCurveHeader, csv_detected = kCurveHeader;

  for (double energy : config.run.energies) {
    EnergyPointResult point;
    point.energy = energy;
    point.n_trajectories = config.run.trajectories;
    const auto start = std::chrono::steady_clock::now();
    try {
      const double amplitude = soliton_amplitude(energy, config.physical);
      StepperConfig stepper = config.stepper;
      if (stepper.d_zeta == 0) stepper.d_zeta = default_step_size(amplitude);
      point.d_zeta = stepper.d_zeta;

      const auto mean = coherent_sech(amplitude, grid);
      const EnsembleResult ensemble = run_stokes_ensemble(
          grid, transform, raman, stepper, mean, zeta_max, config.run.trajectories,
          config.run.relative_phase, config.physical.nbar, config.run.seed, config.run.threads);
      point.aliasing_warnings = ensemble.aliasing_warnings;

      StokesEnsembleStats stats;
      for (const auto& s : ensemble.samples) stats.add(s);

      point.raw = find_extremal_angles(stats);
      point.detected = point.raw;
      point.detected.rho_s = apply_detection_loss(point.raw.rho_s, config.physical.loss_fraction);
      point.detected.rho_a = apply_detection_loss(point.raw.rho_a, config.physical.loss_fraction);
      point.detected.se_s = (1.0 - config.physical.loss_fraction) * point.raw.se_s;
      point.detected.se_a = (1.0 - config.physical.loss_fraction) * point.raw.se_a;
      point.mean_s0 = stats.mean_s0();
      point.mean_s3 = stats.mean_s3();
      const double gap =
          stats.mean_s0_minus_s3() - static_cast<double>(config.grid.n_points);
      point.anchor_gap_sigma = std::abs(gap) / stats.se_mean_s0_minus_s3();
      point.ordering_ratio = ordering_correction_ratio(config.grid.n_points, point.mean_s0);
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    point.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (point.ok()) {
      csv += curve_point_row(point.energy, point.raw, point.n_trajectories);
      csv_detected += curve_point_row(point.energy, point.detected, point.n_trajectories);
    }
    sweep.points.push_back(std::move(point));
  }

  const std::filesystem::path out_dir = config.run.out_dir;
  std::filesystem::create_directories(out_dir);
  sweep.csv_path = out_dir / ("sweep_" + config.run.fibre_label + ".csv");
  sweep.csv_detected_path = out_dir / ("sweep_" + config.run.fibre_label + "_detected.csv");
  sweep.metadata_path = out_dir / ("sweep_" + config.run.fibre_label + "_meta.json");
  write_text_file(sweep.csv_path, csv);
  write_text_file(sweep.csv_detected_path, csv_detected);

  json meta;
  meta["version"] = kVersion;
  meta["config_hash"] = config_hash(config);
  meta["seed"] = config.run.seed;
  meta["fibre_label"] = config.run.fibre_label;
  meta["zeta_max"] = zeta_max;
  meta["n_points"] = config.grid.n_points;
  meta["trajectories"] = config.run.trajectories;
  meta["points"] = json::array();
  for (const auto& p : sweep.points) {
    json jp;
    jp["energy_pj"] = p.energy / kPicojoule;
    jp["d_zeta"] = p.d_zeta;
    jp["seconds"] = p.seconds;
    jp["aliasing_warnings"] = p.aliasing_warnings;
    if (p.ok()) {
      jp["theta_K_rad"] = p.raw.theta_k;
      jp["se_theta"] = p.raw.se_theta;
      jp["degenerate"] = p.raw.degenerate;
      jp["mean_s0"] = p.mean_s0;
      jp["mean_s3"] = p.mean_s3;
      jp["anchor_gap_sigma"] = p.anchor_gap_sigma;
      jp["ordering_ratio"] = p.ordering_ratio;
    } else {
      jp["error"] = p.error;
    }
    meta["points"].push_back(jp);
  }
  write_text_file(sweep.metadata_path, meta.dump(2) + "\n");
  return sweep;
}

SnapshotsResult run_snapshots(const ExperimentConfig& config, double energy_j) {
  config.validate();
  const SimGrid grid(config.grid.n_points, config.grid.tau_window);
  const SpectralTransform transform(grid);
  RamanConfig raman_config;
  if (config.raman.enabled && !config.raman.file.empty())
    raman_config = load_raman_csv(config.raman.file, config.physical.t0,
                                  config.raman.instantaneous_fraction, config.raman.enabled);
  raman_config.enabled = config.raman.enabled;
  const RamanModel raman(raman_config, grid, transform, config.physical);
  const double zeta_max = dimensionless_length(config.physical);

  StepperConfig stepper = config.stepper;
  stepper.vacuum_noise = false;
  stepper.raman_noise = false;
  const double amplitude = soliton_amplitude(energy_j, config.physical);
  if (stepper.d_zeta == 0) stepper.d_zeta = default_step_size(amplitude);

  std::vector<double> zetas = config.snapshot_zetas;
  if (zetas.empty()) {
    for (int i = 0; i <= 8; ++i) zetas.push_back(zeta_max * i / 8.0);
  }
  for (double z : zetas)
    if (z > zeta_max) throw ConfigError("snapshot position beyond the fibre end");

  const Propagator propagator(grid, transform, raman, stepper, config.run.seed);
  Propagator::Workspace ws(grid.n_points());
  const auto mean = coherent_sech(amplitude, grid);
  FieldState state = initial_state(mean, grid, config.physical.nbar, config.run.seed, 0, false);
  const auto prop = propagator.propagate(state, zeta_max, 0, zetas, ws);

  const std::filesystem::path out_dir = config.run.out_dir;
  std::filesystem::create_directories(out_dir);

  SnapshotsResult result;
  const std::size_t n = grid.n_points();
  for (const auto& snap : prop.snapshots) {
    // Emit with monotone frequency axis for plotting.
    std::string csv = "tau,intensity_tau,omega,intensity_omega\n";
    double total_w = 0, first_moment = 0;
    for (std::size_t row = 0; row < n; ++row) {
      const std::size_t k = (row + n / 2) % n;  // negative frequencies first
      csv += format_double(grid.tau()[row]);
      csv += ',';
      csv += format_double(snap.intensity_tau[row]);
      csv += ',';
      csv += format_double(grid.omega()[k]);
      csv += ',';
      csv += format_double(snap.intensity_omega[k]);
      csv += '\n';
      total_w += snap.intensity_omega[k];
      first_moment += grid.omega()[k] * snap.intensity_omega[k];
    }
    result.spectral_centroid.push_back(total_w > 0 ? first_moment / total_w : 0.0);

    // Temporal full width at half maximum by linear interpolation.
    double peak = 0;
    std::size_t peak_idx = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (snap.intensity_tau[i] > peak) {
        peak = snap.intensity_tau[i];
        peak_idx = i;
      }
    auto crossing = [&](bool up) {
      const double half = peak / 2;
      if (peak <= 0) return 0.0;
      if (up) {
        for (std::size_t i = peak_idx; i > 0; --i) {
          if (snap.intensity_tau[i - 1] <= half && snap.intensity_tau[i] > half) {
            const double f = (half - snap.intensity_tau[i - 1]) /
                             (snap.intensity_tau[i] - snap.intensity_tau[i - 1]);
            return grid.tau()[i - 1] + f * grid.d_tau();
          }
        }
        return grid.tau().front();
      }
      for (std::size_t i = peak_idx; i + 1 < n; ++i) {
        if (snap.intensity_tau[i] > half && snap.intensity_tau[i + 1] <= half) {
          const double f = (snap.intensity_tau[i] - half) /
                           (snap.intensity_tau[i] - snap.intensity_tau[i + 1]);
          return grid.tau()[i] + f * grid.d_tau();
        }
      }
      return grid.tau().back();
    };
    result.temporal_fwhm.push_back(peak > 0 ? crossing(false) - crossing(true) : 0.0);

    char tag[64];
    std::snprintf(tag, sizeof tag, "snapshot_%s_E%spJ_zeta%s.csv",
                  config.run.fibre_label.c_str(), format_short(energy_j / kPicojoule).c_str(),
                  format_short(snap.zeta).c_str());
    const auto path = out_dir / tag;
    write_text_file(path, csv);
    result.files.push_back(path);
  }
  return result;
}

KerrSimData load_kerr_sim_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  auto col = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ConfigError(path.string() + ": missing column " + name);
  };
  const std::size_t c_e = col("energy_pj"), c_t = col("theta_K_rad"), c_s = col("rho_s"),
                    c_a = col("rho_a");
  KerrSimData sim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw ConfigError(path.string() + ": short row '" + line + "'");
    sim.energy.push_back(std::stod(cells[c_e]) * kPicojoule);
    sim.theta_k.push_back(std::stod(cells[c_t]));
    sim.rho_s.push_back(std::stod(cells[c_s]));
    sim.rho_a.push_back(std::stod(cells[c_a]));
  }
  sim.validate();
  return sim;
}

std::vector<std::pair<double, double>> load_measured_angles_csv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measured-angle CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  std::string stripped;
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
  if (stripped != "energy_pj,theta_deg")
    throw ConfigError(path.string() + ": expected header 'energy_pj,theta_deg'");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != 2) throw ConfigError(path.string() + ": bad row '" + line + "'");
    rows.emplace_back(std::stod(cells[0]) * kPicojoule,
                      std::stod(cells[1]) * std::numbers::pi / 180.0);
  }
  if (rows.empty()) throw ConfigError(path.string() + ": no data rows");
  return rows;
}

FitReport run_fit(const std::vector<FitInput>& inputs, const std::filesystem::path& out_dir,
                  bool with_offset) {
  if (inputs.empty()) throw FitError("run_fit: no datasets supplied");
  std::filesystem::create_directories(out_dir);

  FitReport report;
  json j;
  j["version"] = kVersion;
  j["datasets"] = json::array();

  for (const auto& input : inputs) {
    const KerrSimData sim = load_kerr_sim_csv(input.sweep_csv);
    const auto measured = load_measured_angles_csv(input.measured_csv);
    FitReportEntry entry;
    entry.label = input.label.empty() ? input.sweep_csv.stem().string() : input.label;
    entry.fit = fit_phase_coefficient(measured, sim, with_offset);

    // Fitted-angle curve next to the raw Kerr angle, for plotting.
    std::string csv = "energy_pj,theta_k_rad,theta_n_rad\n";
    const PhaseNoiseModel model{entry.fit.c_p, entry.fit.c_0};
    constexpr int kCurveSamples = 81;
    for (int i = 0; i < kCurveSamples; ++i) {
      const double e = sim.min_energy() +
                       (sim.max_energy() - sim.min_energy()) * i / (kCurveSamples - 1);
      csv += format_double(e / kPicojoule);
      csv += ',';
      csv += format_double(interpolate_kerr(sim, e).theta_k);
      csv += ',';
      csv += format_double(minimizing_angle(e, sim, model).theta_n);
      csv += '\n';
    }
    const auto curve_path = out_dir / ("fit_curve_" + entry.label + ".csv");
    write_text_file(curve_path, csv);
    report.curve_paths.push_back(curve_path);

    json je;
    je["label"] = entry.label;
    je["c_p_per_joule"] = entry.fit.c_p;
    je["c_0"] = entry.fit.c_0;
    je["rms_residual_deg"] = entry.fit.rms_residual * 180.0 / std::numbers::pi;
    je["per_point_residuals_deg"] = json::array();
    for (double r : entry.fit.residuals)
      je["per_point_residuals_deg"].push_back(r * 180.0 / std::numbers::pi);
    j["datasets"].push_back(je);

    report.entries.push_back(std::move(entry));
  }

  if (report.entries.size() > 1) {
    // Rank fibres by fitted coefficient; with GAWBS-like noise the longer
    // fibre is expected to come out larger.
    std::vector<std::size_t> order(report.entries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return report.entries[a].fit.c_p < report.entries[b].fit.c_p;
    });
    j["c_p_ascending_labels"] = json::array();
    for (std::size_t i : order) j["c_p_ascending_labels"].push_back(report.entries[i].label);
  }

  report.report_path = out_dir / "fit_report.json";
  write_text_file(report.report_path, j.dump(2) + "\n");
  return report;
}

CalibrationResult run_calibrate(const ExperimentConfig& config) {
  config.validate();
  ExperimentConfig cal = config;
  cal.stepper.nonlinearity = false;
  cal.stepper.raman_noise = false;
  cal.stepper.raman_response = false;
  cal.stepper.vacuum_noise = true;

  const SimGrid grid(cal.grid.n_points, cal.grid.tau_window);
  const SpectralTransform transform(grid);
  const RamanModel raman(RamanConfig{{}, 1.0, false}, grid, transform, cal.physical);
  const double zeta_max = dimensionless_length(cal.physical);

  StepperConfig stepper = cal.stepper;
  if (stepper.d_zeta == 0) stepper.d_zeta = 0.25;  // linear evolution is exact per step

  const double energy = cal.run.energies.front();
  const auto mean = coherent_sech(soliton_amplitude(energy, cal.physical), grid);
  const EnsembleResult ensemble = run_stokes_ensemble(
      grid, transform, raman, stepper, mean, zeta_max, cal.run.trajectories,
      cal.run.relative_phase, cal.physical.nbar, cal.run.seed, cal.run.threads);

  StokesEnsembleStats stats;
  for (const auto& s : ensemble.samples) stats.add(s);

  CalibrationResult result;
  bool ok = true;
  for (int i = 0; i < 8; ++i) {
    const double theta = std::numbers::pi * i / 8.0;
    const auto dp = dark_plane_variance(stats, theta);
    result.theta.push_back(theta);
    result.rho.push_back(dp.rho);
    result.se.push_back(dp.se);
    if (std::abs(dp.rho - 1.0) > 3.0 * dp.se) ok = false;
  }
  const double gap = stats.mean_s0_minus_s3() - static_cast<double>(cal.grid.n_points);
  result.anchor_gap_sigma = std::abs(gap) / stats.se_mean_s0_minus_s3();
  if (result.anchor_gap_sigma > 3.0) ok = false;
  result.passed = ok;

  const std::filesystem::path out_dir = cal.run.out_dir;
  std::filesystem::create_directories(out_dir);
  std::string csv = "theta_rad,rho,se\n";
  for (std::size_t i = 0; i < result.theta.size(); ++i) {
    csv += format_double(result.theta[i]);
    csv += ',';
    csv += format_double(result.rho[i]);
    csv += ',';
    csv += format_double(result.se[i]);
    csv += '\n';
  }
  result.csv_path = out_dir / ("calibration_" + cal.run.fibre_label + ".csv");
  write_text_file(result.csv_path, csv);
  return result;
}

}  // namespace fsq
