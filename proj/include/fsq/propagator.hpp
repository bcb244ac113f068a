#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fsq/grid.hpp"
#include "fsq/pulse.hpp"
#include "fsq/raman.hpp"

namespace fsq {

struct StepperConfig {
  double d_zeta = 0.0;  // 0 selects default_step_size from the pulse amplitude
  bool dispersion = true;
  bool nonlinearity = true;
  bool vacuum_noise = true;  // consumed at state preparation, kept here for ablations
  bool raman_noise = true;
  bool raman_response = true;
  double aliasing_threshold = 1e-6;

  void validate() const;
};

// 1e-3 * max(1, 1/A^2), capped at 1e-2.
double default_step_size(double amplitude);

struct Snapshot {
  double zeta = 0.0;
  std::vector<double> intensity_tau;    // |phi_x(tau)|^2
  std::vector<double> intensity_omega;  // |phi_x~(omega)|^2, FFT bin order
};

struct PropagationDiagnostics {
  std::size_t steps = 0;
  std::size_t aliasing_warnings = 0;
  double peak_nonlinear_phase_per_step = 0.0;
};

struct PropagationResult {
  std::vector<Snapshot> snapshots;
  PropagationDiagnostics diagnostics;
};

// Integrates the stochastic propagation equation
//   d(phi)/d(zeta) = (i/2) d^2(phi)/d(tau)^2 + i [h * |phi|^2](tau) phi
//                    + i Gamma(tau, zeta) phi
// for both polarizations with symmetric (Strang) splitting: half dispersion
// step in the frequency domain, full nonlinear phase step in the time
// domain, half dispersion step.  |phi(tau)| is invariant during the phase
// step, so the convolution evaluated at the spatial midpoint makes the
// nonlinear substep exact and the overall scheme second order.  The noise
// enters as a phase increment Gamma d_zeta with Var(Gamma) proportional to
// 1/d_zeta; being a pure per-bin phase it leaves |phi| untouched, so the
// Ito/Stratonovich distinction does not affect intensities.
class Propagator {
 public:
  Propagator(const SimGrid& grid, const SpectralTransform& transform, const RamanModel& raman,
             const StepperConfig& config, std::uint64_t seed);

  struct Workspace {
    explicit Workspace(std::size_t n);
    std::vector<std::complex<double>> freq, conv_in, conv_out;
    std::vector<double> gamma, potential;
  };

  // One full symmetric step of size d starting at global index step_index.
  void step(FieldState& state, double d, std::uint32_t trajectory, std::uint32_t step_index,
            Workspace& ws) const;

  // Runs from state.zeta to zeta_max, emitting snapshots at the requested
  // positions (step boundaries are adjusted to land on them exactly).
  // Deterministic for a fixed (seed, trajectory, config).
  PropagationResult propagate(FieldState& state, double zeta_max, std::uint32_t trajectory,
                              std::span<const double> snapshot_zetas, Workspace& ws) const;

  const StepperConfig& config() const { return config_; }

 private:
  void dispersion_substep(std::span<std::complex<double>> field, double length,
                          Workspace& ws) const;
  void nonlinear_substep(std::span<std::complex<double>> field, double d,
                         std::uint32_t trajectory, std::uint32_t step_index,
                         StreamPurpose purpose, Workspace& ws) const;
  Snapshot take_snapshot(const FieldState& state, Workspace& ws) const;

  const SimGrid* grid_;
  const SpectralTransform* transform_;
  const RamanModel* raman_;
  StepperConfig config_;
  std::uint64_t seed_;
};

}  // namespace fsq
