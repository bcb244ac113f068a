// Acceptance suite: end-to-end checks of the simulator against analytic
// oracles, statistical references and the documented experimental regime.
// Default mode is a reduced variant suitable for CI; --full runs the
// complete parameter sweep (tens of minutes to hours, depending on cores).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fsq/constants.hpp"
#include "fsq/experiment.hpp"
#include "fsq/grid.hpp"
#include "fsq/phase_noise.hpp"
#include "fsq/propagator.hpp"
#include "fsq/pulse.hpp"
#include "fsq/raman.hpp"
#include "fsq/stokes.hpp"
#include "fsq/units_params.hpp"

using namespace fsq;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPj = 1e-12;

struct Options {
  std::string data_dir = "data";
  bool full = false;
  int threads = 0;
  std::vector<int> only;
};

Options g_opts;

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

PhysicalParams paper_params(double fiber_length_m) {
  PhysicalParams p;
  p.fiber_length = fiber_length_m;
  return p;
}

RamanConfig load_silica(const PhysicalParams& params) {
  return load_raman_csv(g_opts.data_dir + "/silica_raman_modes.csv", params.t0, 0.82, true);
}

StokesEnsembleStats to_stats(const std::vector<StokesSample>& samples) {
  StokesEnsembleStats stats;
  for (const auto& s : samples) stats.add(s);
  return stats;
}

// ---- criterion 1 -----------------------------------------------------------

Check soliton_invariance() {
  Check check;
  const auto start = std::chrono::steady_clock::now();

  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel kerr(RamanConfig{{}, 1.0, false}, grid, transform, PhysicalParams{});
  StepperConfig stepper;
  stepper.d_zeta = 5e-4;
  stepper.vacuum_noise = false;
  stepper.raman_noise = false;
  stepper.raman_response = false;
  const Propagator prop(grid, transform, kerr, stepper, 1);
  Propagator::Workspace ws(grid.n_points());

  FieldState state;
  state.phi_x.resize(grid.n_points());
  for (std::size_t i = 0; i < grid.n_points(); ++i)
    state.phi_x[i] = 1.0 / std::cosh(grid.tau()[i]);
  state.phi_y = state.phi_x;
  prop.propagate(state, 10.0, 0, {}, ws);

  double max_dev = 0;
  for (std::size_t i = 0; i < grid.n_points(); ++i)
    max_dev = std::max(max_dev,
                       std::abs(std::abs(state.phi_x[i]) - 1.0 / std::cosh(grid.tau()[i])));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  check.require(max_dev < 1e-6, fmt("max |phi| deviation %.3g (limit 1e-6)", max_dev));
  check.require(seconds < 10.0, fmt("runtime %.1f s (limit 10 s)", seconds));
  check.detail = fmt("deviation %.3g, %.2f s", max_dev, seconds);
  return check;
}

// ---- criterion 2 -----------------------------------------------------------

Check dispersion_oracle() {
  Check check;
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel kerr(RamanConfig{{}, 1.0, false}, grid, transform, PhysicalParams{});
  StepperConfig stepper;
  stepper.d_zeta = 0.05;
  stepper.nonlinearity = false;
  stepper.vacuum_noise = false;
  stepper.raman_noise = false;
  stepper.raman_response = false;
  const Propagator prop(grid, transform, kerr, stepper, 1);
  Propagator::Workspace ws(grid.n_points());

  FieldState state;
  state.phi_x.resize(grid.n_points());
  for (std::size_t i = 0; i < grid.n_points(); ++i) {
    const double tau = grid.tau()[i];
    state.phi_x[i] = std::exp(-0.5 * tau * tau);
  }
  state.phi_y = state.phi_x;

  auto width = [&](const std::vector<cd>& f) {
    double w = 0, m2 = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double p = std::norm(f[i]);
      w += p;
      m2 += grid.tau()[i] * grid.tau()[i] * p;
    }
    return std::sqrt(m2 / w);
  };
  const double w0 = width(state.phi_x);
  prop.propagate(state, 2.0, 0, {}, ws);
  const double ratio = width(state.phi_x) / w0;
  const double expected = std::sqrt(1.0 + 2.0 * 2.0);
  const double rel = std::abs(ratio / expected - 1.0);
  check.require(rel < 1e-4, fmt("width ratio off by %.3g relative (limit 1e-4)", rel));
  check.detail = fmt("width ratio %.6f vs sqrt(5) = %.6f", ratio, expected);
  return check;
}

// ---- criterion 3 -----------------------------------------------------------

Check conservation_with_raman() {
  Check check;
  const auto params = paper_params(13.4);
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel raman(load_silica(params), grid, transform, params);

  StepperConfig stepper;
  stepper.d_zeta = 1e-3;
  stepper.vacuum_noise = false;
  stepper.raman_noise = false;
  const Propagator prop(grid, transform, raman, stepper, 1);
  Propagator::Workspace ws(grid.n_points());

  FieldState state;
  const double amplitude = soliton_amplitude(53.5 * kPj, params);
  state.phi_x.resize(grid.n_points());
  for (std::size_t i = 0; i < grid.n_points(); ++i)
    state.phi_x[i] = amplitude / std::cosh(grid.tau()[i]);
  state.phi_y = state.phi_x;

  auto photons = [&](const std::vector<cd>& f) {
    double acc = 0;
    for (const auto& v : f) acc += std::norm(v);
    return acc * grid.d_tau();
  };
  const double n0 = photons(state.phi_x);
  const double zeta_end = 2.0;
  prop.propagate(state, zeta_end, 0, {}, ws);
  const double drift = std::abs(photons(state.phi_x) / n0 - 1.0) / zeta_end;
  check.require(drift < 1e-8, fmt("photon drift %.3g per unit zeta (limit 1e-8)", drift));
  check.detail = fmt("drift %.3g per unit zeta", drift);
  return check;
}

// ---- criterion 4 -----------------------------------------------------------

Check shot_noise_calibration() {
  Check check;
  const auto params = paper_params(13.4);
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel none(RamanConfig{{}, 1.0, false}, grid, transform, params);

  StepperConfig stepper;
  stepper.d_zeta = 0.5;  // linear evolution is exact at any step
  stepper.nonlinearity = false;
  stepper.raman_noise = false;
  stepper.raman_response = false;

  const auto mean = coherent_sech(soliton_amplitude(53.5 * kPj, params), grid);
  const auto ensemble =
      run_stokes_ensemble(grid, transform, none, stepper, mean, dimensionless_length(params),
                          10000, kPi / 2, params.nbar, 20250809, g_opts.threads);
  const auto stats = to_stats(ensemble.samples);

  double worst = 0;
  for (int i = 0; i < 8; ++i) {
    const auto dp = dark_plane_variance(stats, kPi * i / 8.0);
    const double sigmas = std::abs(dp.rho - 1.0) / dp.se;
    worst = std::max(worst, sigmas);
  }
  check.require(worst <= 3.0, fmt("|rho-1| reaches %.2f sigma (limit 3)", worst));

  const double gap =
      stats.mean_s0_minus_s3() - static_cast<double>(grid.n_points());
  const double gap_sigma = std::abs(gap) / stats.se_mean_s0_minus_s3();
  check.require(gap_sigma <= 3.0,
                fmt("<S0>-<S3> anchor off by %.2f sigma (limit 3)", gap_sigma));
  check.detail = fmt("worst |rho-1| = %.2f sigma, anchor gap %.2f sigma", worst, gap_sigma);
  return check;
}

// ---- criterion 5 -----------------------------------------------------------

Check kerr_squeezing_oracle() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const auto params = paper_params(13.4);
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel none(RamanConfig{{}, 1.0, false}, grid, transform, params);

  // Flat field, dispersion off: every bin carries the same shear r = 2 A^2 zeta.
  const double amplitude2 = 0.375, zeta = 4.0;
  const double r = 2.0 * amplitude2 * zeta;

  StepperConfig stepper;
  stepper.d_zeta = 0.1;
  stepper.dispersion = false;
  stepper.raman_noise = false;
  stepper.raman_response = false;

  std::vector<cd> mean(grid.n_points(), std::sqrt(amplitude2));
  const auto ensemble = run_stokes_ensemble(grid, transform, none, stepper, mean, zeta, 10000,
                                            kPi / 2, params.nbar, 77, g_opts.threads);
  const auto ext = find_extremal_angles(to_stats(ensemble.samples));

  const double lam_max = 1 + r * r / 2 + r * std::sqrt(1 + r * r / 4);
  const double lam_min = 1 / lam_max;
  const double theta_expected = kPi - 0.5 * std::atan2(2.0, r);

  const double ds = std::abs(ext.rho_s - lam_min) / ext.se_s;
  const double da = std::abs(ext.rho_a - lam_max) / ext.se_a;
  const double dt = std::abs(ext.theta_k - theta_expected) / ext.se_theta;
  check.require(ds <= 3.0, fmt("rho_s off by %.2f sigma", ds));
  check.require(da <= 3.0, fmt("rho_a off by %.2f sigma", da));
  check.require(dt <= 3.0, fmt("theta_K off by %.2f sigma", dt));

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.require(seconds < 300.0, fmt("runtime %.0f s (limit 300 s)", seconds));
  check.detail = fmt("r = %.1f: deviations %.2f/%.2f", r, ds, da) +
                 fmt("/%.2f sigma, %.0f s", dt, seconds);
  return check;
}

// ---- criterion 6 -----------------------------------------------------------

Check raman_noise_spectrum() {
  Check check;
  auto params = paper_params(13.4);
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanConfig toy{{{6.0, 1.3, 1.0}}, 0.82, true};

  params.temperature = 300.0;
  const RamanModel warm(toy, grid, transform, params);
  params.temperature = 0.0;
  const RamanModel cold(toy, grid, transform, params);

  const std::size_t n = grid.n_points(), n_samples = 10000;
  const double d_zeta = 0.01;
  std::vector<double> gamma(n);
  std::vector<cd> sf(n), st(n), spec(n);

  auto measure = [&](const RamanModel& model, std::uint64_t seed) {
    std::vector<double> psd(n, 0.0);
    for (std::size_t t = 0; t < n_samples; ++t) {
      NoiseStream stream(seed, static_cast<std::uint32_t>(t), StreamPurpose::raman_x, 0);
      sample_raman_noise(stream, grid, transform, model.noise_psd(), d_zeta, gamma, sf, st);
      std::vector<cd> gc(n);
      for (std::size_t i = 0; i < n; ++i) gc[i] = gamma[i];
      transform.forward(gc, spec);
      for (std::size_t k = 0; k < n; ++k) psd[k] += std::norm(spec[k]);
    }
    const double scale = d_zeta / (grid.tau_window() * n_samples);
    for (auto& v : psd) v *= scale;
    return psd;
  };

  const auto psd_warm = measure(warm, 303);
  const auto psd_cold = measure(cold, 304);

  const double peak = *std::max_element(warm.noise_psd().begin(), warm.noise_psd().end());
  double worst_rel = 0, worst_ratio = 0;
  const ThermalSpectrum bose(300.0, params.t0);
  for (std::size_t k = 0; k < n; ++k) {
    const double target = warm.noise_psd()[k];
    if (target <= 0.01 * peak) continue;
    worst_rel = std::max(worst_rel, std::abs(psd_warm[k] / target - 1.0));
    // Thermal enhancement against the Bose factor.
    const double expected_ratio = 1.0 + 2.0 * bose.occupation(grid.omega()[k]);
    const double measured_ratio = psd_warm[k] / psd_cold[k];
    worst_ratio = std::max(worst_ratio, std::abs(measured_ratio / expected_ratio - 1.0));
  }
  check.require(worst_rel < 0.05, fmt("PSD off by %.1f%% (limit 5%%)", 100 * worst_rel));
  check.require(worst_ratio < 0.05,
                fmt("thermal ratio off by %.1f%% (limit 5%%)", 100 * worst_ratio));
  check.detail =
      fmt("PSD within %.1f%%, 1+2n_th ratio within %.1f%%", 100 * worst_rel, 100 * worst_ratio);
  return check;
}

// ---- criteria 7 and 8 ------------------------------------------------------

struct SweepOutcome {
  std::vector<double> energies;
  std::vector<ExtremalAngles> points;
};

SweepOutcome sweep_curve(const PhysicalParams& params, const RamanModel& raman,
                         const SimGrid& grid, const SpectralTransform& transform,
                         double zeta_max, const std::vector<double>& energies_pj,
                         std::size_t n_traj, const StepperConfig& base) {
  SweepOutcome out;
  for (double e_pj : energies_pj) {
    const double amplitude = soliton_amplitude(e_pj * kPj, params);
    StepperConfig stepper = base;
    if (stepper.d_zeta == 0) stepper.d_zeta = default_step_size(amplitude);
    const auto mean = coherent_sech(amplitude, grid);
    const auto ensemble = run_stokes_ensemble(grid, transform, raman, stepper, mean, zeta_max,
                                              n_traj, kPi / 2, params.nbar, 4242,
                                              g_opts.threads);
    out.energies.push_back(e_pj);
    out.points.push_back(find_extremal_angles(to_stats(ensemble.samples)));
  }
  return out;
}

// Fold the angle sequence onto a continuous branch before comparing.
std::vector<double> unwrap_angles(const SweepOutcome& sweep) {
  std::vector<double> out;
  for (const auto& p : sweep.points) {
    double theta = p.theta_k;
    if (!out.empty()) {
      while (theta < out.back() - kPi / 2) theta += kPi;
      while (theta > out.back() + kPi / 2) theta -= kPi;
    }
    out.push_back(theta);
  }
  return out;
}

Check paper_parameter_sweep() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const auto params = paper_params(13.4);
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel raman(load_silica(params), grid, transform, params);

  const std::vector<double> energies_pj =
      g_opts.full ? std::vector<double>{2, 4.8, 10, 22, 47, 100}
                  : std::vector<double>{4.8, 22, 100};
  const std::size_t n_traj = g_opts.full ? 240 : 200;
  const double zeta_short = g_opts.full ? dimensionless_length(paper_params(13.4)) : 5.0;
  const double zeta_long = g_opts.full ? dimensionless_length(paper_params(30.0)) : 10.0;

  StepperConfig stepper;  // full physics, auto step
  const auto curve_short =
      sweep_curve(params, raman, grid, transform, zeta_short, energies_pj, n_traj, stepper);
  const auto curve_long =
      sweep_curve(params, raman, grid, transform, zeta_long, energies_pj, n_traj, stepper);

  const auto theta_short = unwrap_angles(curve_short);
  const auto theta_long = unwrap_angles(curve_long);

  for (std::size_t i = 1; i < theta_short.size(); ++i) {
    const double slack = 0.5 * (curve_short.points[i].se_theta +
                                curve_short.points[i - 1].se_theta);
    check.require(theta_short[i] > theta_short[i - 1] - slack,
                  fmt("short-fibre theta_K not increasing at %.3g pJ", energies_pj[i]));
  }
  for (std::size_t i = 1; i < theta_long.size(); ++i) {
    const double slack =
        0.5 * (curve_long.points[i].se_theta + curve_long.points[i - 1].se_theta);
    check.require(theta_long[i] > theta_long[i - 1] - slack,
                  fmt("long-fibre theta_K not increasing at %.3g pJ", energies_pj[i]));
  }
  for (std::size_t i = 0; i < theta_short.size(); ++i) {
    const double slack =
        0.5 * (curve_short.points[i].se_theta + curve_long.points[i].se_theta);
    check.require(theta_long[i] >= theta_short[i] - slack,
                  fmt("long fibre below short fibre at %.3g pJ", energies_pj[i]));
  }

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.detail = fmt("theta_K rose %.3f -> %.3f rad", theta_short.front(),
                     theta_short.back()) +
                 fmt(" (short), %.3f -> %.3f rad (long)", theta_long.front(),
                     theta_long.back()) +
                 fmt(", %.0f s", seconds);
  return check;
}

Check raman_degradation_trend() {
  Check check;
  const auto start = std::chrono::steady_clock::now();
  const auto params = paper_params(g_opts.full ? 30.0 : 13.4);
  const SimGrid grid(1024, 40.0);
  const SpectralTransform transform(grid);
  const RamanModel raman(load_silica(params), grid, transform, params);

  const double zeta_max = g_opts.full ? dimensionless_length(params) : 10.0;
  const double e_pj = 100.0;
  const std::size_t n_traj = g_opts.full ? 240 : 200;

  const double amplitude = soliton_amplitude(e_pj * kPj, params);
  const auto mean = coherent_sech(amplitude, grid);

  StepperConfig with_raman;
  with_raman.d_zeta = default_step_size(amplitude);
  StepperConfig kerr_only = with_raman;
  kerr_only.raman_noise = false;
  kerr_only.raman_response = false;

  const auto full = run_stokes_ensemble(grid, transform, raman, with_raman, mean, zeta_max,
                                        n_traj, kPi / 2, params.nbar, 4242, g_opts.threads);
  const auto bare = run_stokes_ensemble(grid, transform, raman, kerr_only, mean, zeta_max,
                                        n_traj, kPi / 2, params.nbar, 4242, g_opts.threads);

  const auto ext_full = find_extremal_angles(to_stats(full.samples));
  const auto ext_bare = find_extremal_angles(to_stats(bare.samples));

  check.require(ext_full.rho_s > ext_bare.rho_s,
                fmt("rho_s with Raman %.4g not above the Kerr ablation %.4g", ext_full.rho_s,
                    ext_bare.rho_s));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  check.detail = fmt("rho_s %.4g (Raman) vs %.4g (Kerr)", ext_full.rho_s, ext_bare.rho_s) +
                 fmt(", separation %.1f sigma, %.0f s",
                     (ext_full.rho_s - ext_bare.rho_s) /
                         std::hypot(ext_full.se_s, ext_bare.se_s),
                     seconds);
  return check;
}

// ---- criterion 9 -----------------------------------------------------------

Check loss_model() {
  Check check;
  check.require(std::abs(apply_detection_loss(1.0, 0.24) - 1.0) <= 1e-15,
                "shot noise is not a fixed point");
  check.require(std::abs(apply_detection_loss(1.0, 0.5) - 1.0) <= 1e-15,
                "shot noise fixed point fails at 50% loss");
  check.require(std::abs(apply_detection_loss(0.2, 0.24) - 0.392) <= 1e-15,
                "0.2 @ 24% loss must give 0.392");
  check.require(apply_detection_loss(0.37, 0.0) == 0.37, "zero loss must be the identity");
  check.detail = fmt("0.2 -> %.6f at 24%% loss", apply_detection_loss(0.2, 0.24));
  return check;
}

// ---- criterion 10 ----------------------------------------------------------

KerrSimData synthetic_sim_table() {
  KerrSimData sim;
  for (int i = 0; i < 12; ++i) {
    const double e_pj = 2.0 + (100.0 - 2.0) * i / 11.0;
    const double r = 0.05 * e_pj;
    sim.energy.push_back(e_pj * kPj);
    sim.theta_k.push_back(kPi - 0.5 * std::atan2(2.0, r));
    const double lam = 1 + r * r / 2 + r * std::sqrt(1 + r * r / 4);
    sim.rho_a.push_back(lam);
    sim.rho_s.push_back(1 / lam);
  }
  return sim;
}

Check phase_noise_fit_round_trip() {
  Check check;
  const KerrSimData sim = synthetic_sim_table();
  const double c_true = 0.5 / (100 * kPj);

  // Noiseless round trip.
  std::vector<std::pair<double, double>> measured;
  for (double e_pj : {4.0, 9.0, 16.0, 25.0, 40.0, 55.0, 70.0, 85.0, 98.0})
    measured.push_back(
        {e_pj * kPj, minimizing_angle(e_pj * kPj, sim, {c_true, 0.0}).theta_n});
  const auto fit = fit_phase_coefficient(measured, sim);
  const double rel = std::abs(fit.c_p / c_true - 1.0);
  check.require(rel < 1e-3, fmt("noiseless recovery off by %.3g (limit 1e-3)", rel));

  // 1% angle noise, 100 repetitions.
  std::mt19937 rng(77);
  std::normal_distribution<double> noise(0.0, 0.01);
  double sum_sq = 0;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::pair<double, double>> noisy;
    for (int i = 0; i < 10; ++i) {
      const double e_pj = 3.0 + i * 10.5;
      const double theta = minimizing_angle(e_pj * kPj, sim, {c_true, 0.0}).theta_n;
      noisy.push_back({e_pj * kPj, theta * (1.0 + noise(rng))});
    }
    const double r = fit_phase_coefficient(noisy, sim).c_p / c_true - 1.0;
    sum_sq += r * r;
  }
  const double rms = std::sqrt(sum_sq / 100);
  check.require(rms < 0.10, fmt("noisy recovery RMS %.3f (limit 0.10)", rms));

  // Closed-form minimizer against a dense grid scan, 1000 random draws.
  std::mt19937 rng2(5150);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n_grid = 10000;
  double worst_gap = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    KerrSimData one;
    const double theta_k = kPi * u(rng2);
    const double rho_s = 0.02 + u(rng2);
    one.energy = {1 * kPj, 2 * kPj};
    one.theta_k = {theta_k, theta_k};
    one.rho_s = {rho_s, rho_s};
    const double rho_a = rho_s * (1.0 + 10 * u(rng2));
    one.rho_a = {rho_a, rho_a};
    const PhaseNoiseModel model{5.0 * u(rng2) / kPj, 0.0};
    const double e = 1.5 * kPj;
    const auto closed = minimizing_angle(e, one, model);

    double best_theta = 0, best = 1e300;
    for (std::size_t i = 0; i < n_grid; ++i) {
      const double theta = kPi * static_cast<double>(i) / n_grid;
      const double v = total_variance(theta, e, one, model);
      if (v < best) {
        best = v;
        best_theta = theta;
      }
    }
    worst_gap = std::max(
        worst_gap, std::abs(angle_difference_mod_pi(closed.theta_n, best_theta)));
  }
  check.require(worst_gap < 2 * kPi / n_grid,
                fmt("closed form vs grid argmin gap %.3g rad", worst_gap));
  check.detail = fmt("noiseless %.2g rel, noisy RMS %.3f, argmin gap %.2g rad", rel, rms,
                     worst_gap);
  return check;
}

// ---- criterion 11 ----------------------------------------------------------

Check reproducibility() {
  Check check;
  const std::string base = R"({
    "physical": {"fiber_length_m": 1.04},
    "grid": {"n_points": 256, "tau_window": 30},
    "stepper": {"d_zeta": 0.01},
    "raman": {"file": ")" + g_opts.data_dir + R"(/silica_raman_modes.csv"},
    "pulse": {"energy_pj": [22, 60]},
    "run": {"trajectories": 48, "seed": 99, "fibre_label": "repro", "out_dir": "OUT",
            "threads": THREADS}
  })";

  auto run_with = [&](const std::string& out, int threads) {
    std::string text = base;
    text.replace(text.find("OUT"), 3, out);
    text.replace(text.find("THREADS"), 7, std::to_string(threads));
    return run_sweep(parse_config(text, "."));
  };

  const auto res1 = run_with("acceptance_out/repro1", 1);
  const auto res4 = run_with("acceptance_out/repro4", 4);

  auto slurp = [](const std::filesystem::path& p) {
    std::string out;
    if (FILE* f = std::fopen(p.string().c_str(), "rb")) {
      char buf[4096];
      std::size_t got;
      while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
      std::fclose(f);
    }
    return out;
  };
  const auto a = slurp(res1.csv_path), b = slurp(res4.csv_path);
  check.require(!a.empty(), "sweep CSV missing");
  check.require(a == b, "CSV bytes differ between 1 and 4 worker threads");
  check.require(slurp(res1.csv_detected_path) == slurp(res4.csv_detected_path),
                "detected-loss CSV differs between thread counts");
  check.detail = fmt("%.0f CSV bytes identical across thread counts",
                     static_cast<double>(a.size()));
  return check;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--data") && i + 1 < argc) g_opts.data_dir = argv[++i];
    else if (!std::strcmp(argv[i], "--full")) g_opts.full = true;
    else if (!std::strcmp(argv[i], "--threads") && i + 1 < argc)
      g_opts.threads = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--only") && i + 1 < argc)
      g_opts.only.push_back(std::atoi(argv[++i]));
    else {
      std::fprintf(stderr,
                   "usage: fsq_acceptance [--data DIR] [--full] [--threads N] [--only K]...\n");
      return 2;
    }
  }

  struct Criterion {
    int number;
    const char* name;
    Check (*run)();
  };
  const Criterion criteria[] = {
      {1, "soliton invariance", soliton_invariance},
      {2, "dispersion oracle", dispersion_oracle},
      {3, "photon-number conservation with delayed response", conservation_with_raman},
      {4, "shot-noise calibration", shot_noise_calibration},
      {5, "Kerr squeezing oracle", kerr_squeezing_oracle},
      {6, "Raman noise spectrum", raman_noise_spectrum},
      {7, "parameter sweep: angle growth and fibre-length ordering", paper_parameter_sweep},
      {8, "Raman degradation of squeezing at high energy", raman_degradation_trend},
      {9, "detection loss model", loss_model},
      {10, "phase-noise fit round trips", phase_noise_fit_round_trip},
      {11, "bit reproducibility across worker counts", reproducibility},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    if (!g_opts.only.empty() &&
        std::find(g_opts.only.begin(), g_opts.only.end(), criterion.number) ==
            g_opts.only.end())
      continue;
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %2d: %s%s%s\n", result.ok ? "PASS" : "FAIL", criterion.number,
                criterion.name, result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures ? 1 : 0;
}
