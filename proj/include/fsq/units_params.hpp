#pragma once

namespace fsq {

// Fibre, pulse and detection constants in SI units.  t0 is the sech time
// scale of the input pulse, z0 = t0^2/|k''| the dispersion length, and nbar
// half the photon number of a fundamental sech soliton.  Propagation uses
// the co-moving dimensionless variables tau = (t - z/v)/t0, zeta = z/z0;
// the pulse velocity and carrier wavenumber drop out entirely.
struct PhysicalParams {
  double t0 = 74e-15;           // s
  double z0 = 0.52;             // m
  double nbar = 2e8;            // photons
  double lambda0 = 1.51e-6;     // m
  double temperature = 300.0;   // K
  double fiber_length = 13.4;   // m
  double loss_fraction = 0.24;  // detection-path linear loss, in [0, 1)

  void validate() const;  // throws ConfigError on violated invariants

  double k2_abs() const;  // |k''| = t0^2 / z0, s^2/m
  double omega0() const;  // carrier angular frequency 2 pi c / lambda0, rad/s
};

struct PulseSpec {
  double energy_total = 0.0;                   // J, both polarizations combined
  double relative_phase = 1.5707963267948966;  // x-y phase at detection, rad

  void validate() const;
};

// Photon number N = E lambda0 / (h c) carried by a pulse pair of total
// energy E; the two polarization modes split it evenly.
double photon_number(double energy_total, double lambda0);

// Inverse of photon_number.
double energy_from_photon_number(double photons, double lambda0);

// Dimensionless sech amplitude A for the per-polarization mean field
// A sech(tau): nbar * integral |A sech|^2 dtau = photon_number(E)/2,
// using integral sech^2 = 2.  A = 1 is the fundamental soliton.
double soliton_amplitude(double energy_total, const PhysicalParams& params);

// Fibre length in units of the dispersion length.
double dimensionless_length(const PhysicalParams& params);

}  // namespace fsq
