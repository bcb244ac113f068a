#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace fsq {

// Kerr squeezing angles and relative variances versus pulse energy, as
// produced by a simulation sweep.  Queries between tabulated energies
// interpolate theta_K linearly and the variances log-linearly (they span
// orders of magnitude).
struct KerrSimData {
  std::vector<double> energy;   // J, strictly increasing
  std::vector<double> theta_k;  // rad
  std::vector<double> rho_s;
  std::vector<double> rho_a;

  void validate() const;  // throws ConfigError
  double min_energy() const { return energy.front(); }
  double max_energy() const { return energy.back(); }
};

struct KerrPoint {
  double theta_k, rho_s, rho_a;
};

// Linear/log-linear interpolation; energies outside the tabulated range are
// an error rather than an extrapolation.
KerrPoint interpolate_kerr(const KerrSimData& sim, double energy);

// Excess phase noise with relative variance rho_p(E) = c_p E + c_0,
// referenced to the same shot-noise normalization as rho_s and rho_a.
struct PhaseNoiseModel {
  double c_p = 0;  // 1/J
  double c_0 = 0;  // dimensionless offset, usually disabled

  double rho_p(double energy) const { return c_p * energy + c_0; }
};

// Dark-plane relative variance with excess phase noise:
//   rho(theta) = rho_p sin^2(theta) + rho_s cos^2(theta - theta_K)
//                + rho_a sin^2(theta - theta_K).
double total_variance(double theta, double energy, const KerrSimData& sim,
                      const PhaseNoiseModel& model);

struct MinimizingAngle {
  double theta_n = 0;       // in [0, pi)
  bool degenerate = false;  // variance independent of theta
};

// Closed-form minimizer of total_variance over theta, from its 2-theta
// harmonic decomposition.
MinimizingAngle minimizing_angle(double energy, const KerrSimData& sim,
                                 const PhaseNoiseModel& model);

struct PhaseNoiseFit {
  double c_p = 0;
  double c_0 = 0;
  double rms_residual = 0;         // rad
  std::vector<double> residuals;   // rad, per measured point, angle wrapped mod pi
  std::size_t objective_evaluations = 0;
};

// One-parameter least-squares fit of the predicted minimizing angles to
// measured squeezing angles (E in J, theta in rad).  The objective is
// bracketed on a coarse c_p grid over [0, c_max] with rho_p(E_max) <= 1e3,
// then refined by golden-section search.  with_offset additionally fits c_0
// by coordinate descent.
PhaseNoiseFit fit_phase_coefficient(const std::vector<std::pair<double, double>>& measured,
                                    const KerrSimData& sim, bool with_offset = false);

// Signed angle difference wrapped to (-pi/2, pi/2]; squeezing angles live on
// a half turn.
double angle_difference_mod_pi(double a, double b);

}  // namespace fsq
