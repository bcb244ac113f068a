#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "fsq/grid.hpp"
#include "fsq/rng.hpp"

namespace fsq {

// Sampled dimensionless photon-flux fields for the two polarization modes
// at propagation position zeta.
struct FieldState {
  std::vector<std::complex<double>> phi_x;
  std::vector<std::complex<double>> phi_y;
  double zeta = 0.0;

  void check_finite() const;  // throws IntegrationError on NaN/Inf
};

// Mean field A sech(tau), centered in the window.
std::vector<std::complex<double>> coherent_sech(double amplitude, const SimGrid& grid);

// Adds Wigner vacuum fluctuations to one polarization in place: independent
// complex Gaussian noise per grid point with total variance 1/(2 nbar d_tau),
// i.e. 1/(4 nbar d_tau) in each quadrature.
void add_vacuum_noise(std::span<std::complex<double>> field, NoiseStream& stream, double nbar,
                      double d_tau);

// Builds the stochastic initial state: the same coherent mean on both
// polarizations plus independent vacuum noise per mode.  The x-y relative
// phase is applied at detection, not here; the polarizations propagate
// independently.
FieldState initial_state(std::span<const std::complex<double>> mean, const SimGrid& grid,
                         double nbar, std::uint64_t seed, std::uint32_t trajectory,
                         bool vacuum_noise);

}  // namespace fsq
