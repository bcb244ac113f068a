#include "fsq/pulse.hpp"

#include <cmath>

#include "fsq/errors.hpp"

namespace fsq {

void FieldState::check_finite() const {
  for (const auto& v : phi_x)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw IntegrationError("non-finite field value in phi_x", zeta);
  for (const auto& v : phi_y)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw IntegrationError("non-finite field value in phi_y", zeta);
}

std::vector<std::complex<double>> coherent_sech(double amplitude, const SimGrid& grid) {
  if (!(amplitude >= 0)) throw DomainError("coherent_sech: amplitude must be >= 0");
  std::vector<std::complex<double>> field(grid.n_points());
  for (std::size_t i = 0; i < field.size(); ++i)
    field[i] = amplitude / std::cosh(grid.tau()[i]);
  return field;
}

void add_vacuum_noise(std::span<std::complex<double>> field, NoiseStream& stream, double nbar,
                      double d_tau) {
  if (!(nbar > 0) || !(d_tau > 0))
    throw ContractError("add_vacuum_noise: nbar and d_tau must be positive");
  const double sigma = std::sqrt(1.0 / (4.0 * nbar * d_tau));  // per quadrature
  for (auto& v : field) {
    const double re = stream.gaussian();
    const double im = stream.gaussian();
    v += sigma * std::complex<double>(re, im);
  }
}

FieldState initial_state(std::span<const std::complex<double>> mean, const SimGrid& grid,
                         double nbar, std::uint64_t seed, std::uint32_t trajectory,
                         bool vacuum_noise) {
  if (mean.size() != grid.n_points()) throw ContractError("initial_state: length mismatch");
  FieldState state;
  state.phi_x.assign(mean.begin(), mean.end());
  state.phi_y.assign(mean.begin(), mean.end());
  state.zeta = 0.0;
  if (vacuum_noise) {
    NoiseStream sx(seed, trajectory, StreamPurpose::vacuum_x);
    NoiseStream sy(seed, trajectory, StreamPurpose::vacuum_y);
    add_vacuum_noise(state.phi_x, sx, nbar, grid.d_tau());
    add_vacuum_noise(state.phi_y, sy, nbar, grid.d_tau());
  }
  state.check_finite();
  return state;
}

}  // namespace fsq
