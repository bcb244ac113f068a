#include "fsq/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

#include "fsq/errors.hpp"

namespace fsq {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// FFTW planner functions are not thread safe; executions are.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

SimGrid::SimGrid(std::size_t n_points, double tau_window) : n_(n_points), window_(tau_window) {
  if (n_ < 16 || !is_power_of_two(n_))
    throw ContractError("SimGrid: n_points must be a power of two >= 16");
  if (!(std::isfinite(window_) && window_ > 0))
    throw ContractError("SimGrid: tau_window must be positive");

  d_tau_ = window_ / static_cast<double>(n_);
  d_omega_ = 2.0 * std::numbers::pi / window_;

  tau_.resize(n_);
  omega_.resize(n_);
  const auto half = static_cast<std::ptrdiff_t>(n_ / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    tau_[i] = (static_cast<std::ptrdiff_t>(i) - half) * d_tau_;
    // FFT bin order: non-negative frequencies first, then negative.
    const auto k = static_cast<std::ptrdiff_t>(i);
    const auto signed_k = k < half ? k : k - static_cast<std::ptrdiff_t>(n_);
    omega_[i] = d_omega_ * static_cast<double>(signed_k);
  }
}

double SimGrid::omega_max() const { return std::numbers::pi / d_tau_; }

SpectralTransform::SpectralTransform(const SimGrid& grid)
    : n_(grid.n_points()), d_tau_(grid.d_tau()) {
  std::lock_guard lock(planner_mutex());
  // Dummy buffer for planning only; execution uses fftw_execute_dft with
  // caller buffers, hence FFTW_UNALIGNED.
  std::vector<std::complex<double>> dummy(n_);
  auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
  plan_plus_ = fftw_plan_dft_1d(static_cast<int>(n_), p, p, FFTW_BACKWARD,
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_minus_ = fftw_plan_dft_1d(static_cast<int>(n_), p, p, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralTransform::~SpectralTransform() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_plus_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_minus_));
}

void SpectralTransform::forward(std::span<const std::complex<double>> time,
                                std::span<std::complex<double>> freq) const {
  if (time.size() != n_ || freq.size() != n_)
    throw ContractError("SpectralTransform::forward: length mismatch");
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(time.data()));
  auto* out = reinterpret_cast<fftw_complex*>(freq.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_plus_), in, out);
  for (auto& v : freq) v *= d_tau_;
}

void SpectralTransform::inverse(std::span<const std::complex<double>> freq,
                                std::span<std::complex<double>> time) const {
  if (time.size() != n_ || freq.size() != n_)
    throw ContractError("SpectralTransform::inverse: length mismatch");
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(freq.data()));
  auto* out = reinterpret_cast<fftw_complex*>(time.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_minus_), in, out);
  const double scale = 1.0 / (static_cast<double>(n_) * d_tau_);
  for (auto& v : time) v *= scale;
}

GuardResult aliasing_guard_spectrum(std::span<const std::complex<double>> spectrum,
                                    const SimGrid& grid, double threshold) {
  if (spectrum.size() != grid.n_points())
    throw ContractError("aliasing_guard: length mismatch");
  const double edge = 0.9 * grid.omega_max();
  double total = 0.0, outer = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double p = std::norm(spectrum[k]);
    total += p;
    if (std::abs(grid.omega()[k]) >= edge) outer += p;
  }
  if (total <= 0.0) return GuardResult::ok;
  return outer / total > threshold ? GuardResult::warning : GuardResult::ok;
}

GuardResult aliasing_guard(std::span<const std::complex<double>> field, const SimGrid& grid,
                           const SpectralTransform& transform, double threshold) {
  std::vector<std::complex<double>> spectrum(grid.n_points());
  transform.forward(field, spectrum);
  return aliasing_guard_spectrum(spectrum, grid, threshold);
}

}  // namespace fsq
