#include "fsq/stokes.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fsq/errors.hpp"

namespace fsq {

namespace {

constexpr double kBinomial[5][5] = {
    {1, 0, 0, 0, 0}, {1, 1, 0, 0, 0}, {1, 2, 1, 0, 0}, {1, 3, 3, 1, 0}, {1, 4, 6, 4, 1}};

double safe_inf() { return std::numeric_limits<double>::infinity(); }

// Exact delete-one jackknife variance of the sample variance of
// x = cos(theta) s1 + sin(theta) s2, evaluated from the power sums alone.
// The leave-one-out variance is quadratic in the removed sample,
// v_(i) = a + b x_i + c x_i^2, so both jackknife sums reduce to P1..P4.
double jackknife_se_variance(double n_d, const double P1, const double P2, const double P3,
                             const double P4) {
  if (n_d < 3) return safe_inf();
  const double a = (P2 - P1 * P1 / (n_d - 1)) / (n_d - 2);
  const double b = 2.0 * P1 / ((n_d - 1) * (n_d - 2));
  const double c = -n_d / ((n_d - 1) * (n_d - 2));
  const double sum_v = n_d * a + b * P1 + c * P2;
  const double sum_v2 =
      n_d * a * a + 2 * a * b * P1 + (b * b + 2 * a * c) * P2 + 2 * b * c * P3 + c * c * P4;
  const double ss = std::max(0.0, sum_v2 - sum_v * sum_v / n_d);
  return std::sqrt((n_d - 1) / n_d * ss);
}

struct ProjectedSums {
  double p1, p2, p3, p4;
};

ProjectedSums project(const StokesEnsembleStats& st, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  ProjectedSums out{};
  out.p1 = c * st.power_sum(1, 0) + s * st.power_sum(0, 1);
  out.p2 = c * c * st.power_sum(2, 0) + 2 * c * s * st.power_sum(1, 1) +
           s * s * st.power_sum(0, 2);
  out.p3 = c * c * c * st.power_sum(3, 0) + 3 * c * c * s * st.power_sum(2, 1) +
           3 * c * s * s * st.power_sum(1, 2) + s * s * s * st.power_sum(0, 3);
  out.p4 = c * c * c * c * st.power_sum(4, 0) + 4 * c * c * c * s * st.power_sum(3, 1) +
           6 * c * c * s * s * st.power_sum(2, 2) + 4 * c * s * s * s * st.power_sum(1, 3) +
           s * s * s * s * st.power_sum(0, 4);
  return out;
}

}  // namespace

StokesSample stokes_from_fields(const FieldState& state, double relative_phase, double nbar,
                                double d_tau) {
  if (state.phi_x.size() != state.phi_y.size())
    throw ContractError("stokes_from_fields: polarization arrays differ in length");
  const std::complex<double> phase = std::polar(1.0, relative_phase);
  double n_xx = 0, n_yy = 0;
  std::complex<double> n_xy{0, 0};
  for (std::size_t i = 0; i < state.phi_x.size(); ++i) {
    const auto x = state.phi_x[i];
    const auto y = state.phi_y[i] * phase;
    n_xx += std::norm(x);
    n_yy += std::norm(y);
    n_xy += std::conj(x) * y;
  }
  n_xx *= nbar * d_tau;
  n_yy *= nbar * d_tau;
  n_xy *= nbar * d_tau;

  StokesSample s;
  s.s0 = n_xx + n_yy;
  s.s1 = n_xx - n_yy;
  s.s2 = 2.0 * n_xy.real();
  s.s3 = 2.0 * n_xy.imag();
  return s;
}

void StokesEnsembleStats::add(const StokesSample& s) {
  ++n_;
  double pow1[5] = {1, s.s1, 0, 0, 0};
  double pow2[5] = {1, s.s2, 0, 0, 0};
  for (int k = 2; k <= 4; ++k) {
    pow1[k] = pow1[k - 1] * s.s1;
    pow2[k] = pow2[k - 1] * s.s2;
  }
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) p_[i][j] += pow1[i] * pow2[j];

  sum_s0_ += s.s0;
  sum_s0_sq_ += s.s0 * s.s0;
  sum_s3_ += s.s3;
  sum_s3_sq_ += s.s3 * s.s3;
  const double d = s.s0 - s.s3;
  sum_diff_ += d;
  sum_diff_sq_ += d * d;
}

void StokesEnsembleStats::merge(const StokesEnsembleStats& other) {
  n_ += other.n_;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; i + j <= 4; ++j) p_[i][j] += other.p_[i][j];
  sum_s0_ += other.sum_s0_;
  sum_s0_sq_ += other.sum_s0_sq_;
  sum_s3_ += other.sum_s3_;
  sum_s3_sq_ += other.sum_s3_sq_;
  sum_diff_ += other.sum_diff_;
  sum_diff_sq_ += other.sum_diff_sq_;
}

double StokesEnsembleStats::mean_s0() const { return n_ ? sum_s0_ / static_cast<double>(n_) : 0; }
double StokesEnsembleStats::mean_s3() const { return n_ ? sum_s3_ / static_cast<double>(n_) : 0; }

namespace {
double se_of_mean(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return safe_inf();
  const double nd = static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - sum * sum / nd) / (nd - 1));
  return std::sqrt(var / nd);
}
}  // namespace

double StokesEnsembleStats::se_mean_s0() const { return se_of_mean(sum_s0_, sum_s0_sq_, n_); }
double StokesEnsembleStats::se_mean_s3() const { return se_of_mean(sum_s3_, sum_s3_sq_, n_); }
double StokesEnsembleStats::mean_s0_minus_s3() const {
  return n_ ? sum_diff_ / static_cast<double>(n_) : 0;
}
double StokesEnsembleStats::se_mean_s0_minus_s3() const {
  return se_of_mean(sum_diff_, sum_diff_sq_, n_);
}

std::array<double, 3> StokesEnsembleStats::covariance() const {
  if (n_ < 2) throw AnalysisError("covariance needs at least 2 samples");
  const double nd = static_cast<double>(n_);
  const double var1 = (p_[2][0] - p_[1][0] * p_[1][0] / nd) / (nd - 1);
  const double var2 = (p_[0][2] - p_[0][1] * p_[0][1] / nd) / (nd - 1);
  const double cov = (p_[1][1] - p_[1][0] * p_[0][1] / nd) / (nd - 1);
  return {var1, var2, cov};
}

double StokesEnsembleStats::central_moment(int a, int b) const {
  if (a < 0 || b < 0 || a + b > 4) throw ContractError("central_moment: order out of range");
  if (n_ == 0) return 0;
  const double nd = static_cast<double>(n_);
  const double m1 = p_[1][0] / nd;
  const double m2 = p_[0][1] / nd;
  double acc = 0;
  for (int i = 0; i <= a; ++i) {
    for (int j = 0; j <= b; ++j) {
      acc += kBinomial[a][i] * kBinomial[b][j] * std::pow(-m1, a - i) * std::pow(-m2, b - j) *
             p_[i][j];
    }
  }
  return acc / nd;
}

double StokesEnsembleStats::s3_norm() const {
  const double m = mean_s3();
  const double se = se_mean_s3();
  if (std::abs(m) <= 5.0 * se || m == 0.0)
    throw AnalysisError("<S3> is statistically consistent with zero; dark-plane variances "
                        "cannot be normalized");
  return std::abs(m);
}

DarkPlaneVariance dark_plane_variance(const StokesEnsembleStats& stats, double theta) {
  if (stats.count() < 2) throw AnalysisError("dark_plane_variance needs at least 2 samples");
  const double denom = stats.s3_norm();
  const double nd = static_cast<double>(stats.count());
  const ProjectedSums ps = project(stats, theta);
  const double var = std::max(0.0, (ps.p2 - ps.p1 * ps.p1 / nd) / (nd - 1));
  DarkPlaneVariance out;
  out.rho = var / denom;
  out.se = jackknife_se_variance(nd, ps.p1, ps.p2, ps.p3, ps.p4) / denom;
  return out;
}

ExtremalAngles find_extremal_angles(const StokesEnsembleStats& stats) {
  if (stats.count() < 3) throw AnalysisError("find_extremal_angles needs at least 3 samples");
  const double denom = stats.s3_norm();
  const double nd = static_cast<double>(stats.count());
  const auto [var1, var2, cov] = stats.covariance();

  const double u = var1 - var2;
  const double v = 2.0 * cov;
  const double disc = std::hypot(u, v);
  const double lambda_max = 0.5 * (var1 + var2 + disc);
  const double lambda_min = std::max(0.0, 0.5 * (var1 + var2 - disc));

  // Angle of the maximal-variance eigenvector; the squeezing angle sits a
  // quarter turn away, folded into [0, pi).
  const double theta_max = 0.5 * std::atan2(v, u);
  double theta_k = std::fmod(theta_max + 0.5 * std::numbers::pi, std::numbers::pi);
  if (theta_k < 0) theta_k += std::numbers::pi;

  // First-order covariances of the sample (co)variances from fourth moments.
  const double m20 = stats.central_moment(2, 0);
  const double m02 = stats.central_moment(0, 2);
  const double m11 = stats.central_moment(1, 1);
  const double m40 = stats.central_moment(4, 0);
  const double m04 = stats.central_moment(0, 4);
  const double m22 = stats.central_moment(2, 2);
  const double m31 = stats.central_moment(3, 1);
  const double m13 = stats.central_moment(1, 3);

  const double var_c20 = (m40 - m20 * m20) / nd;
  const double var_c02 = (m04 - m02 * m02) / nd;
  const double var_c11 = (m22 - m11 * m11) / nd;
  const double cov_c20_c02 = (m22 - m20 * m02) / nd;
  const double cov_c20_c11 = (m31 - m20 * m11) / nd;
  const double cov_c02_c11 = (m13 - m02 * m11) / nd;

  const double var_u = var_c20 + var_c02 - 2 * cov_c20_c02;
  const double var_v = 4 * var_c11;
  const double cov_uv = 2 * (cov_c20_c11 - cov_c02_c11);

  ExtremalAngles out;
  out.theta_k = theta_k;
  out.rho_s = lambda_min / denom;
  out.rho_a = lambda_max / denom;

  const double r2 = u * u + v * v;
  out.se_theta = r2 > 0 ? std::sqrt(std::max(
                              0.0, u * u * var_v + v * v * var_u - 2 * u * v * cov_uv)) /
                              (2 * r2)
                        : safe_inf();
  const double se_disc =
      disc > 0 ? std::sqrt(std::max(0.0, u * u * var_u + v * v * var_v + 2 * u * v * cov_uv)) /
                     disc
               : safe_inf();
  out.degenerate = !(disc > 3.0 * se_disc);

  const ProjectedSums at_min = project(stats, theta_k);
  const ProjectedSums at_max = project(stats, theta_k + 0.5 * std::numbers::pi);
  out.se_s = jackknife_se_variance(nd, at_min.p1, at_min.p2, at_min.p3, at_min.p4) / denom;
  out.se_a = jackknife_se_variance(nd, at_max.p1, at_max.p2, at_max.p3, at_max.p4) / denom;
  return out;
}

double apply_detection_loss(double rho, double loss_fraction) {
  if (!(rho >= 0)) throw DomainError("apply_detection_loss: rho must be >= 0");
  if (!(loss_fraction >= 0 && loss_fraction < 1))
    throw DomainError("apply_detection_loss: loss must lie in [0, 1)");
  return (1.0 - loss_fraction) * rho + loss_fraction;
}

double to_decibels(double rho) {
  if (!(rho > 0)) throw DomainError("to_decibels: rho must be positive");
  return 10.0 * std::log10(rho);
}

double ordering_correction_ratio(std::size_t n_points, double mean_s0) {
  if (!(mean_s0 > 0)) return safe_inf();
  return static_cast<double>(n_points) / (4.0 * mean_s0);
}

}  // namespace fsq
