#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "fsq/pulse.hpp"

namespace fsq {

// Photon-number-valued Stokes parameters of one trajectory, evaluated at the
// fibre end:  N_ss' = nbar * sum conj(phi_s) phi_s' d_tau,
//   S0 = N_xx + N_yy,   S1 = N_xx - N_yy,
//   S2 = N_xy + N_yx,   S3 = i N_yx - i N_xy.
struct StokesSample {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
};

// Applies the x-y relative detection phase to phi_y, then evaluates the
// Stokes parameters.  relative_phase = pi/2 turns equal-amplitude pulses
// into circularly (S3) polarized light.
StokesSample stokes_from_fields(const FieldState& state, double relative_phase, double nbar,
                                double d_tau);

// Streaming ensemble accumulator: mixed power sums of (S1, S2) up to fourth
// order plus first/second moments of S0, S3.  Associative and mergeable, so
// workers can reduce partial ensembles in trajectory order.
class StokesEnsembleStats {
 public:
  void add(const StokesSample& s);
  void merge(const StokesEnsembleStats& other);

  std::size_t count() const { return n_; }
  double mean_s0() const;
  double mean_s3() const;
  double se_mean_s0() const;
  double se_mean_s3() const;

  // Mean and standard error of S0 - S3 (computed per trajectory, so the
  // strong S0/S3 correlation cancels).  For S3-polarized light the quantum
  // expectation of the difference is the symmetric-ordering offset of S0,
  // one half photon per mode and polarization: n_points.
  double mean_s0_minus_s3() const;
  double se_mean_s0_minus_s3() const;

  // Sample covariance matrix of (S1, S2): {var1, var2, cov}.
  std::array<double, 3> covariance() const;

  // Raw power sum of s1^i s2^j, i + j <= 4.
  double power_sum(int i, int j) const { return p_[i][j]; }

  // Central moment (1/n) sum (s1 - m1)^i (s2 - m2)^j.
  double central_moment(int i, int j) const;

  // |<S3>|, throwing AnalysisError when it is statistically indistinguishable
  // from zero.
  double s3_norm() const;

 private:
  std::size_t n_ = 0;
  double p_[5][5] = {};  // p_[i][j] = sum s1^i s2^j, i + j <= 4
  double sum_s0_ = 0, sum_s0_sq_ = 0;
  double sum_s3_ = 0, sum_s3_sq_ = 0;
  double sum_diff_ = 0, sum_diff_sq_ = 0;  // s0 - s3
};

struct DarkPlaneVariance {
  double rho = 0;  // Var(cos(theta) S1 + sin(theta) S2) / |<S3>|
  double se = 0;   // delete-one jackknife standard error
};

// Relative variance of the dark-plane Stokes projection at angle theta;
// below 1 means squeezing.
DarkPlaneVariance dark_plane_variance(const StokesEnsembleStats& stats, double theta);

struct ExtremalAngles {
  double theta_k = 0;  // minimal-variance angle, in [0, pi)
  double rho_s = 0;    // minimal relative variance
  double rho_a = 0;    // maximal relative variance
  double se_theta = 0;
  double se_s = 0;
  double se_a = 0;
  bool degenerate = false;  // eigenvalue gap within sampling error

  double phi_waveplate() const { return theta_k / 4.0; }  // theta = 4 Phi
};

// Exact eigen-decomposition of the 2x2 (S1, S2) covariance; the minimum of
// the quadratic form replaces a brute-force angle scan.
ExtremalAngles find_extremal_angles(const StokesEnsembleStats& stats);

// Beam-splitter detection loss: rho -> (1 - loss) rho + loss.  Shot noise
// (rho = 1) is a fixed point.
double apply_detection_loss(double rho, double loss_fraction);

// 10 log10(rho); negative means squeezed.
double to_decibels(double rho);

// Size of the neglected symmetric-ordering correction relative to the
// measured variances; must stay well below 1 for the Wigner statistics to
// stand in for normally ordered ones.
double ordering_correction_ratio(std::size_t n_points, double mean_s0);

struct SqueezingCurvePoint {
  double energy = 0;  // J
  ExtremalAngles angles;
  std::size_t n_trajectories = 0;
};

}  // namespace fsq
