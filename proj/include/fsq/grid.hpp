#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace fsq {

// Uniform dimensionless time grid with its conjugate frequency grid.
// tau_n = (n - n_points/2) * d_tau spans [-window/2, window/2).  omega is
// stored in FFT bin order: omega_k = 2 pi k~ / window with signed index
// k~ in [-n/2, n/2).  Periodic boundary conditions throughout.
class SimGrid {
 public:
  SimGrid(std::size_t n_points, double tau_window);  // throws ContractError

  std::size_t n_points() const { return n_; }
  double tau_window() const { return window_; }
  double d_tau() const { return d_tau_; }
  double d_omega() const { return d_omega_; }
  double omega_max() const;  // Nyquist magnitude pi / d_tau

  const std::vector<double>& tau() const { return tau_; }
  const std::vector<double>& omega() const { return omega_; }

 private:
  std::size_t n_;
  double window_, d_tau_, d_omega_;
  std::vector<double> tau_, omega_;
};

// Discrete version of the transform pair
//   F[phi](omega) = d_tau * sum_n phi(tau_n) e^{+i omega tau_n},
//   phi(tau)      = d_omega/(2 pi) * sum_k F(omega_k) e^{-i omega tau},
// so Parseval reads  sum |phi|^2 d_tau = sum |F|^2 d_omega / (2 pi).
// Plans are created once per grid; execution is safe from multiple threads
// on distinct buffers.  FFTW_ESTIMATE keeps plan selection identical from
// run to run, which the bit-reproducibility contract relies on.
class SpectralTransform {
 public:
  explicit SpectralTransform(const SimGrid& grid);
  ~SpectralTransform();
  SpectralTransform(const SpectralTransform&) = delete;
  SpectralTransform& operator=(const SpectralTransform&) = delete;

  void forward(std::span<const std::complex<double>> time,
               std::span<std::complex<double>> freq) const;
  void inverse(std::span<const std::complex<double>> freq,
               std::span<std::complex<double>> time) const;

  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double d_tau_;
  void* plan_plus_;   // e^{+i omega tau} kernel
  void* plan_minus_;  // e^{-i omega tau} kernel
};

enum class GuardResult { ok, warning };

// Flags fields whose spectral power leaks into the outer 10% of the
// frequency grid; such runs are under-resolved and should be rerun with a
// finer or wider grid.
GuardResult aliasing_guard(std::span<const std::complex<double>> field, const SimGrid& grid,
                           const SpectralTransform& transform, double threshold = 1e-6);

// Same check on an already-computed spectrum.
GuardResult aliasing_guard_spectrum(std::span<const std::complex<double>> spectrum,
                                    const SimGrid& grid, double threshold = 1e-6);

}  // namespace fsq
