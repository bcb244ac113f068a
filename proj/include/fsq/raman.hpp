#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "fsq/grid.hpp"
#include "fsq/rng.hpp"
#include "fsq/units_params.hpp"

namespace fsq {

// One vibrational mode of the delayed nonlinear response: a causal damped
// oscillator h_j(tau) = theta(tau) e^{-gamma tau} sin(omega0 tau), scaled to
// unit zero-frequency response.  All frequencies in 1/t0 units.
struct LorentzianMode {
  double omega0;  // resonance, > 0
  double gamma;   // damping (half width), > 0
  double weight;  // relative zero-frequency weight, > 0
};

struct RamanConfig {
  std::vector<LorentzianMode> modes;
  // Weight of the instantaneous (electronic) delta response in h; the
  // remainder 1 - instantaneous_fraction is the Raman share, ~0.18 in
  // fused silica.
  double instantaneous_fraction = 0.82;
  bool enabled = true;
};

// Bose-Einstein phonon occupation evaluated for grid frequencies.
class ThermalSpectrum {
 public:
  ThermalSpectrum(double temperature, double t0);

  // n_th(|omega|); omega in 1/t0 units.  Diverges like k_B T/(hbar omega)
  // for omega -> 0 at T > 0 (returns +inf at omega = 0).
  double occupation(double omega) const;

  // n_th(|omega|) + 1/2: the symmetric-ordering noise weight.
  double wigner_weight(double omega) const;

 private:
  double quantum_energy_scale_;  // hbar / (k_B T t0), or 0 for T = 0
};

// Nonlinear response h(tau) = f delta(tau) + (1-f) h_R(tau) on a fixed grid,
// its transform h~(omega), the gain profile alpha^R(omega) = Im h~(omega),
// and the Raman noise power spectral density.  The Raman part is built in
// the time domain (exactly causal, exactly real); h~ is normalized so
// h~(0) = 1, which keeps A = 1 the stationary soliton regardless of the
// electronic/Raman split.
class RamanModel {
 public:
  RamanModel(const RamanConfig& config, const SimGrid& grid, const SpectralTransform& transform,
             const PhysicalParams& params);

  // h~(omega_k), FFT bin order.  h~(0) = 1 exactly; Hermitian symmetric.
  const std::vector<std::complex<double>>& response_spectrum() const { return spectrum_; }

  // Raman part h_R(tau) aligned with grid.tau() (zero for tau < 0).
  std::vector<double> raman_response_time() const;

  // alpha^R(|omega_k|): the gain profile, clamped at zero where rounding
  // leaves dust below it.
  double gain(std::size_t bin) const { return gain_[bin]; }

  // S(omega_k) = alpha^R(|omega_k|) (n_th(|omega_k|) + 1/2) / nbar,
  // with S(0) = 0 since alpha^R vanishes at zero frequency.
  const std::vector<double>& noise_psd() const { return psd_; }

  bool has_noise() const { return has_noise_; }
  double instantaneous_fraction() const { return config_.instantaneous_fraction; }
  const RamanConfig& config() const { return config_; }

 private:
  RamanConfig config_;
  const SimGrid* grid_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<double> raman_time_wrapped_;
  std::vector<double> gain_;
  std::vector<double> psd_;
  bool has_noise_ = false;
};

// Synthesizes one real noise field Gamma(tau) for a propagation step of
// size d_zeta: delta correlated in zeta, stationary with PSD S(omega) in
// tau.  Spectral amplitudes satisfy <|Gamma~(omega_k)|^2> = S * window / d_zeta.
// The number of stream draws is fixed by the grid, not by S.
void sample_raman_noise(NoiseStream& stream, const SimGrid& grid,
                        const SpectralTransform& transform, std::span<const double> psd,
                        double d_zeta, std::span<double> gamma_out,
                        std::span<std::complex<double>> scratch_freq,
                        std::span<std::complex<double>> scratch_time);

// Reads a mode table "center_thz,width_thz,strength" (ordinary frequency in
// THz, width = half width at half maximum) and converts to 1/t0 units.
RamanConfig load_raman_csv(const std::string& path, double t0, double instantaneous_fraction,
                           bool enabled);

}  // namespace fsq
