#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fsq/grid.hpp"
#include "fsq/phase_noise.hpp"
#include "fsq/propagator.hpp"
#include "fsq/raman.hpp"
#include "fsq/stokes.hpp"
#include "fsq/units_params.hpp"

namespace fsq {

inline constexpr const char* kVersion = "0.1.0";

struct GridSettings {
  std::size_t n_points = 1024;
  double tau_window = 40.0;  // units of t0
};

struct RamanSettings {
  std::string file;  // mode table CSV; resolved relative to the config file
  double instantaneous_fraction = 0.82;
  bool enabled = true;
};

struct RunSettings {
  std::vector<double> energies;  // J
  std::size_t trajectories = 200;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::string fibre_label = "fibre";
  int threads = 0;  // 0 = hardware concurrency
  double relative_phase = 1.5707963267948966;
};

struct ExperimentConfig {
  PhysicalParams physical;
  GridSettings grid;
  StepperConfig stepper;
  std::vector<double> snapshot_zetas;
  RamanSettings raman;
  RunSettings run;

  void validate() const;  // throws ConfigError
};

// Parses the JSON experiment description; relative file references are
// resolved against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");

// Stable hash of the configuration for output provenance.
std::uint64_t config_hash(const ExperimentConfig& config);

struct EnsembleResult {
  std::vector<StokesSample> samples;  // trajectory order
  std::size_t aliasing_warnings = 0;
};

// Propagates `mean` plus per-trajectory vacuum noise to zeta_max for
// n_trajectories trajectories, spread over a worker pool, and evaluates the
// Stokes parameters at the fibre end.  Noise streams are keyed by
// (seed, trajectory, step) only, so results are bit-identical for any
// thread count, and sweep points at different energies share noise
// realizations (common random numbers).
EnsembleResult run_stokes_ensemble(const SimGrid& grid, const SpectralTransform& transform,
                                   const RamanModel& raman, const StepperConfig& stepper,
                                   std::span<const std::complex<double>> mean, double zeta_max,
                                   std::size_t n_trajectories, double relative_phase,
                                   double nbar, std::uint64_t seed, int threads);

struct EnergyPointResult {
  double energy = 0;  // J
  ExtremalAngles raw;
  ExtremalAngles detected;  // after apply_detection_loss
  double mean_s0 = 0;
  double mean_s3 = 0;
  double anchor_gap_sigma = 0;  // |<S0> - n_points - <S3>| in standard errors
  double ordering_ratio = 0;
  double d_zeta = 0;
  std::size_t n_trajectories = 0;
  std::size_t aliasing_warnings = 0;
  double seconds = 0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SweepResult {
  std::vector<EnergyPointResult> points;
  std::filesystem::path csv_path;
  std::filesystem::path csv_detected_path;
  std::filesystem::path metadata_path;
};

// Full energy sweep: per energy builds the pulse, runs the trajectory
// ensemble, extracts the squeezing curve point with and without detection
// loss, and writes the two CSVs plus run metadata.  A failing energy point
// is recorded and the sweep continues.
SweepResult run_sweep(const ExperimentConfig& config);

struct SnapshotsResult {
  std::vector<std::filesystem::path> files;
  std::vector<double> spectral_centroid;  // per snapshot, 1/t0 units
  std::vector<double> temporal_fwhm;      // per snapshot, t0 units
};

// Deterministic (noise-off) propagation of one pulse with |phi(tau)|^2 and
// |phi~(omega)|^2 written to one CSV per requested zeta.
SnapshotsResult run_snapshots(const ExperimentConfig& config, double energy_j);

struct FitInput {
  std::filesystem::path sweep_csv;
  std::filesystem::path measured_csv;
  std::string label;
};

struct FitReportEntry {
  std::string label;
  PhaseNoiseFit fit;
};

struct FitReport {
  std::vector<FitReportEntry> entries;
  std::filesystem::path report_path;
  std::vector<std::filesystem::path> curve_paths;
};

// Fits the phase-noise coefficient per dataset, writes fitted-angle curves
// next to the raw Kerr angles, and a JSON report (including the coefficient
// ordering when several fibres are supplied).
FitReport run_fit(const std::vector<FitInput>& inputs, const std::filesystem::path& out_dir,
                  bool with_offset = false);

// Reads a sweep CSV back into fit input data.
KerrSimData load_kerr_sim_csv(const std::filesystem::path& path);

// Reads measured angles: header "energy_pj,theta_deg"; returns (J, rad).
std::vector<std::pair<double, double>> load_measured_angles_csv(
    const std::filesystem::path& path);

struct CalibrationResult {
  std::vector<double> theta;
  std::vector<double> rho;
  std::vector<double> se;
  double anchor_gap_sigma = 0;
  bool passed = false;
  std::filesystem::path csv_path;
};

// Shot-noise check: nonlinearity and Raman noise off, vacuum noise on; the
// dark-plane variance must sit at the shot-noise level for every angle.
CalibrationResult run_calibrate(const ExperimentConfig& config);

}  // namespace fsq
