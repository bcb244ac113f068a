#include "fsq/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fsq/errors.hpp"

namespace fsq {

void StepperConfig::validate() const {
  if (!(d_zeta >= 0) || !std::isfinite(d_zeta))
    throw ConfigError("stepper.d_zeta must be finite and >= 0");
  if (!(aliasing_threshold > 0)) throw ConfigError("stepper.aliasing_threshold must be positive");
}

double default_step_size(double amplitude) {
  const double a2 = amplitude * amplitude;
  const double base = 1e-3 * std::max(1.0, a2 > 0 ? 1.0 / a2 : std::numeric_limits<double>::infinity());
  return std::min(base, 1e-2);
}

Propagator::Workspace::Workspace(std::size_t n)
    : freq(n), conv_in(n), conv_out(n), gamma(n, 0.0), potential(n, 0.0) {}

Propagator::Propagator(const SimGrid& grid, const SpectralTransform& transform,
                       const RamanModel& raman, const StepperConfig& config, std::uint64_t seed)
    : grid_(&grid), transform_(&transform), raman_(&raman), config_(config), seed_(seed) {
  config_.validate();
}

void Propagator::dispersion_substep(std::span<std::complex<double>> field, double length,
                                    Workspace& ws) const {
  // phi~(omega) picks up exp(-i omega^2 length / 2): the anomalous-dispersion
  // phase that balances the +i |phi|^2 phi Kerr term for the sech soliton.
  transform_->forward(field, ws.freq);
  const auto& omega = grid_->omega();
  for (std::size_t k = 0; k < ws.freq.size(); ++k)
    ws.freq[k] *= std::polar(1.0, -0.5 * omega[k] * omega[k] * length);
  transform_->inverse(ws.freq, field);
}

void Propagator::nonlinear_substep(std::span<std::complex<double>> field, double d,
                                   std::uint32_t trajectory, std::uint32_t step_index,
                                   StreamPurpose purpose, Workspace& ws) const {
  const std::size_t n = field.size();

  for (std::size_t i = 0; i < n; ++i) ws.conv_in[i] = std::norm(field[i]);

  if (config_.raman_response) {
    // [h * |phi|^2](tau), evaluated spectrally.  h is real, so the result is
    // real up to rounding; a real phase potential conserves photon number
    // exactly, Raman or not.
    transform_->forward(ws.conv_in, ws.freq);
    const auto& h = raman_->response_spectrum();
    for (std::size_t k = 0; k < n; ++k) ws.freq[k] *= h[k];
    transform_->inverse(ws.freq, ws.conv_out);
    for (std::size_t i = 0; i < n; ++i) ws.potential[i] = ws.conv_out[i].real();
  } else {
    // Instantaneous response only: h = delta, the convolution is |phi|^2.
    for (std::size_t i = 0; i < n; ++i) ws.potential[i] = ws.conv_in[i].real();
  }

  if (config_.raman_noise && raman_->has_noise()) {
    NoiseStream stream(seed_, trajectory, purpose, step_index);
    sample_raman_noise(stream, *grid_, *transform_, raman_->noise_psd(), d, ws.gamma, ws.freq,
                       ws.conv_out);
    for (std::size_t i = 0; i < n; ++i) ws.potential[i] += ws.gamma[i];
  }

  // |phi| is invariant here, so the potential frozen over the substep makes
  // this the exact solution of the nonlinear part.
  for (std::size_t i = 0; i < n; ++i) field[i] *= std::polar(1.0, ws.potential[i] * d);
}

void Propagator::step(FieldState& state, double d, std::uint32_t trajectory,
                      std::uint32_t step_index, Workspace& ws) const {
  if (!(d > 0)) throw ContractError("Propagator::step: step size must be positive");
  if (config_.dispersion) dispersion_substep(state.phi_x, d / 2, ws);
  if (config_.nonlinearity)
    nonlinear_substep(state.phi_x, d, trajectory, step_index, StreamPurpose::raman_x, ws);
  if (config_.dispersion) dispersion_substep(state.phi_x, d / 2, ws);

  if (config_.dispersion) dispersion_substep(state.phi_y, d / 2, ws);
  if (config_.nonlinearity)
    nonlinear_substep(state.phi_y, d, trajectory, step_index, StreamPurpose::raman_y, ws);
  if (config_.dispersion) dispersion_substep(state.phi_y, d / 2, ws);

  state.zeta += d;
}

Snapshot Propagator::take_snapshot(const FieldState& state, Workspace& ws) const {
  Snapshot snap;
  snap.zeta = state.zeta;
  snap.intensity_tau.resize(state.phi_x.size());
  snap.intensity_omega.resize(state.phi_x.size());
  for (std::size_t i = 0; i < state.phi_x.size(); ++i)
    snap.intensity_tau[i] = std::norm(state.phi_x[i]);
  transform_->forward(state.phi_x, ws.freq);
  for (std::size_t k = 0; k < ws.freq.size(); ++k)
    snap.intensity_omega[k] = std::norm(ws.freq[k]);
  return snap;
}

PropagationResult Propagator::propagate(FieldState& state, double zeta_max,
                                        std::uint32_t trajectory,
                                        std::span<const double> snapshot_zetas,
                                        Workspace& ws) const {
  state.check_finite();
  PropagationResult result;
  if (zeta_max < state.zeta)
    throw ContractError("Propagator::propagate: zeta_max below current position");

  double peak = 0.0;
  for (const auto& v : state.phi_x) peak = std::max(peak, std::norm(v));
  for (const auto& v : state.phi_y) peak = std::max(peak, std::norm(v));
  const double d_zeta = config_.d_zeta > 0 ? config_.d_zeta : default_step_size(std::sqrt(peak));
  if (config_.nonlinearity && peak * d_zeta >= 0.1)
    throw ConfigError("stepper.d_zeta too large: nonlinear phase per step exceeds 0.1 rad");
  result.diagnostics.peak_nonlinear_phase_per_step = peak * d_zeta;

  // Segment boundaries: requested snapshot positions plus the end point.
  std::vector<double> marks(snapshot_zetas.begin(), snapshot_zetas.end());
  std::sort(marks.begin(), marks.end());
  std::vector<bool> is_snapshot;
  std::vector<double> bounds;
  for (double m : marks) {
    if (m < state.zeta - 1e-12 || m > zeta_max + 1e-12)
      throw ContractError("snapshot position outside [zeta, zeta_max]");
    bounds.push_back(std::min(std::max(m, state.zeta), zeta_max));
    is_snapshot.push_back(true);
  }
  if (bounds.empty() || bounds.back() < zeta_max) {
    bounds.push_back(zeta_max);
    is_snapshot.push_back(false);
  }

  std::uint32_t step_index = 0;
  auto check_state = [&]() {
    state.check_finite();
    transform_->forward(state.phi_x, ws.freq);
    if (aliasing_guard_spectrum(ws.freq, *grid_, config_.aliasing_threshold) ==
        GuardResult::warning)
      ++result.diagnostics.aliasing_warnings;
  };

  for (std::size_t seg = 0; seg < bounds.size(); ++seg) {
    const double target = bounds[seg];
    if (target > state.zeta + 1e-15) {
      const double span = target - state.zeta;
      const auto n_steps = static_cast<std::size_t>(std::ceil(span / d_zeta - 1e-12));
      const double d = span / static_cast<double>(n_steps);
      for (std::size_t s = 0; s < n_steps; ++s) {
        step(state, d, trajectory, step_index++, ws);
        if ((s & 0x7F) == 0x7F) state.check_finite();
      }
      state.zeta = target;  // absorb accumulated rounding
      result.diagnostics.steps += n_steps;
    }
    check_state();
    if (is_snapshot[seg]) result.snapshots.push_back(take_snapshot(state, ws));
  }
  return result;
}

}  // namespace fsq
