#include "fsq/units_params.hpp"

#include <cmath>
#include <string>

#include "fsq/constants.hpp"
#include "fsq/errors.hpp"

namespace fsq {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid physical parameters: " + what);
}

}  // namespace

void PhysicalParams::validate() const {
  require(std::isfinite(t0) && t0 > 0, "t0 must be positive");
  require(std::isfinite(z0) && z0 > 0, "z0 must be positive");
  require(std::isfinite(nbar) && nbar > 0, "nbar must be positive");
  require(std::isfinite(lambda0) && lambda0 > 0, "lambda0 must be positive");
  require(std::isfinite(temperature) && temperature >= 0, "temperature must be >= 0");
  require(std::isfinite(fiber_length) && fiber_length > 0, "fiber_length must be positive");
  require(std::isfinite(loss_fraction) && loss_fraction >= 0 && loss_fraction < 1,
          "loss_fraction must lie in [0, 1)");
  require(std::isfinite(k2_abs()) && k2_abs() > 0, "t0^2/z0 must be finite and positive");
}

double PhysicalParams::k2_abs() const { return t0 * t0 / z0; }

double PhysicalParams::omega0() const {
  return 2.0 * 3.14159265358979323846 * constants::speed_of_light / lambda0;
}

void PulseSpec::validate() const {
  if (!(std::isfinite(energy_total) && energy_total >= 0))
    throw ConfigError("pulse energy must be >= 0");
  if (!std::isfinite(relative_phase)) throw ConfigError("relative_phase must be finite");
}

double photon_number(double energy_total, double lambda0) {
  if (!(energy_total >= 0)) throw DomainError("photon_number: negative energy");
  if (!(lambda0 > 0)) throw DomainError("photon_number: wavelength must be positive");
  return energy_total * lambda0 / (constants::planck * constants::speed_of_light);
}

double energy_from_photon_number(double photons, double lambda0) {
  if (!(photons >= 0)) throw DomainError("energy_from_photon_number: negative photon count");
  if (!(lambda0 > 0)) throw DomainError("energy_from_photon_number: wavelength must be positive");
  return photons * constants::planck * constants::speed_of_light / lambda0;
}

double soliton_amplitude(double energy_total, const PhysicalParams& params) {
  params.validate();
  const double per_pol = photon_number(energy_total, params.lambda0) / 2.0;
  return std::sqrt(per_pol / (2.0 * params.nbar));
}

double dimensionless_length(const PhysicalParams& params) {
  params.validate();
  return params.fiber_length / params.z0;
}

}  // namespace fsq
