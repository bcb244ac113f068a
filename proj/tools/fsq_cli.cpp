#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fsq/errors.hpp"
#include "fsq/experiment.hpp"

namespace {

// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 fit failure.
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitFit = 4;

struct GlobalOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t trajectories = 0;
  std::string out_dir;
  int threads = -1;
};

fsq::ExperimentConfig load_with_overrides(const GlobalOptions& opts) {
  if (opts.config_path.empty()) throw fsq::ConfigError("--config is required");
  fsq::ExperimentConfig config = fsq::load_config(opts.config_path);
  if (opts.seed_set) config.run.seed = opts.seed;
  if (opts.trajectories > 0) config.run.trajectories = opts.trajectories;
  if (!opts.out_dir.empty()) config.run.out_dir = opts.out_dir;
  if (opts.threads >= 0) config.run.threads = opts.threads;
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated-Wigner simulator of polarization squeezing in birefringent fibre"};
  app.require_subcommand(1);

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "Experiment config JSON")->envname("FSQ_CONFIG");
  auto* seed_opt = app.add_option("--seed", opts.seed, "Override run.seed");
  app.add_option("--trajectories", opts.trajectories, "Override run.trajectories");
  app.add_option("--out", opts.out_dir, "Override run.out_dir");
  app.add_option("--threads", opts.threads, "Override run.threads (0 = all cores)");

  auto* sweep = app.add_subcommand("sweep", "Run the energy sweep and write squeezing curves");

  auto* snapshots =
      app.add_subcommand("snapshots", "Deterministic propagation profiles at chosen zeta");
  double snap_energy_pj = 0.0;
  snapshots->add_option("--energy-pj", snap_energy_pj, "Pulse-pair energy in pJ")->required();

  auto* fit = app.add_subcommand("fit", "Fit the excess-phase-noise coefficient");
  std::vector<std::string> sweep_csvs, measured_csvs, labels;
  std::string fit_out = "out";
  bool with_offset = false;
  fit->add_option("--sweep-csv", sweep_csvs, "Sweep CSV (repeat per fibre)")->required();
  fit->add_option("--measured-csv", measured_csvs, "Measured angles CSV (repeat per fibre)")
      ->required();
  fit->add_option("--label", labels, "Dataset label (repeat per fibre)");
  fit->add_option("--out", fit_out, "Output directory for the fit report");
  fit->add_flag("--offset", with_offset, "Also fit a constant offset c_0");

  auto* calibrate =
      app.add_subcommand("calibrate", "Shot-noise check with the nonlinearity disabled");

  CLI11_PARSE(app, argc, argv);
  opts.seed_set = seed_opt->count() > 0;

  try {
    if (*sweep) {
      const auto config = load_with_overrides(opts);
      const auto result = fsq::run_sweep(config);
      std::size_t failures = 0;
      for (const auto& p : result.points) {
        if (p.ok()) {
          std::printf("E = %8.3f pJ  theta_K = %.4f rad  rho_s = %.4g  rho_a = %.4g  (%.1fs)\n",
                      p.energy * 1e12, p.raw.theta_k, p.raw.rho_s, p.raw.rho_a, p.seconds);
        } else {
          ++failures;
          std::fprintf(stderr, "E = %8.3f pJ failed: %s\n", p.energy * 1e12, p.error.c_str());
        }
      }
      std::printf("wrote %s\n", result.csv_path.string().c_str());
      if (failures == result.points.size()) return kExitNumerical;
      return 0;
    }
    if (*snapshots) {
      const auto config = load_with_overrides(opts);
      const auto result = fsq::run_snapshots(config, snap_energy_pj * 1e-12);
      for (const auto& f : result.files) std::printf("wrote %s\n", f.string().c_str());
      return 0;
    }
    if (*fit) {
      if (sweep_csvs.size() != measured_csvs.size())
        throw fsq::ConfigError("need one --measured-csv per --sweep-csv");
      std::vector<fsq::FitInput> inputs;
      for (std::size_t i = 0; i < sweep_csvs.size(); ++i)
        inputs.push_back({sweep_csvs[i], measured_csvs[i],
                          i < labels.size() ? labels[i] : std::string{}});
      const auto report = fsq::run_fit(inputs, fit_out, with_offset);
      for (const auto& entry : report.entries)
        std::printf("%s: c_p = %.6g /J, c_0 = %.6g, rms residual = %.4g deg\n",
                    entry.label.c_str(), entry.fit.c_p, entry.fit.c_0,
                    entry.fit.rms_residual * 57.29577951308232);
      std::printf("wrote %s\n", report.report_path.string().c_str());
      return 0;
    }
    if (*calibrate) {
      const auto config = load_with_overrides(opts);
      const auto result = fsq::run_calibrate(config);
      for (std::size_t i = 0; i < result.theta.size(); ++i)
        std::printf("theta = %.4f rad  rho = %.4f +- %.4f\n", result.theta[i], result.rho[i],
                    result.se[i]);
      std::printf("anchor |<S0> - n_points - <S3>| = %.2f sigma\n", result.anchor_gap_sigma);
      std::printf("calibration %s\n", result.passed ? "PASSED" : "FAILED");
      return result.passed ? 0 : kExitNumerical;
    }
  } catch (const fsq::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const fsq::DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const fsq::FitError& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return kExitFit;
  } catch (const fsq::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
