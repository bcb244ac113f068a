#include "fsq/raman.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "fsq/constants.hpp"
#include "fsq/errors.hpp"

namespace fsq {

ThermalSpectrum::ThermalSpectrum(double temperature, double t0) {
  if (!(temperature >= 0) || !(t0 > 0))
    throw ConfigError("ThermalSpectrum: temperature must be >= 0 and t0 > 0");
  quantum_energy_scale_ =
      temperature > 0 ? constants::hbar / (constants::boltzmann * temperature * t0) : 0.0;
}

double ThermalSpectrum::occupation(double omega) const {
  if (quantum_energy_scale_ == 0.0) return 0.0;  // T = 0
  const double x = quantum_energy_scale_ * std::abs(omega);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / std::expm1(x);
}

double ThermalSpectrum::wigner_weight(double omega) const { return occupation(omega) + 0.5; }

RamanModel::RamanModel(const RamanConfig& config, const SimGrid& grid,
                       const SpectralTransform& transform, const PhysicalParams& params)
    : config_(config), grid_(&grid) {
  const std::size_t n = grid.n_points();
  const double f = config.instantaneous_fraction;
  if (!(f >= 0.0 && f <= 1.0))
    throw ConfigError("RamanModel: instantaneous_fraction must lie in [0, 1]");
  for (const auto& m : config.modes) {
    if (!(m.omega0 > 0) || !(m.gamma > 0) || !(m.weight > 0))
      throw ConfigError("RamanModel: modes need positive frequency, width and weight");
  }

  spectrum_.assign(n, {1.0, 0.0});
  gain_.assign(n, 0.0);
  psd_.assign(n, 0.0);
  raman_time_wrapped_.assign(n, 0.0);

  const bool pure_kerr = !config.enabled || config.modes.empty() || f == 1.0;
  if (!pure_kerr) {
    double weight_sum = 0.0;
    for (const auto& m : config.modes) weight_sum += m.weight;

    // Sampled on the wrapped grid: index 0 is tau = 0, the first half is the
    // causal tail, the second half (tau < 0) stays identically zero.
    const double d_tau = grid.d_tau();
    for (std::size_t i = 0; i < n / 2; ++i) {
      const double tau = static_cast<double>(i) * d_tau;
      double h = 0.0;
      for (const auto& m : config.modes) {
        const double unit_norm = (m.gamma * m.gamma + m.omega0 * m.omega0) / m.omega0;
        h += (m.weight / weight_sum) * unit_norm * std::exp(-m.gamma * tau) *
             std::sin(m.omega0 * tau);
      }
      raman_time_wrapped_[i] = h;
    }

    std::vector<std::complex<double>> h_complex(n), h_spec(n);
    for (std::size_t i = 0; i < n; ++i) h_complex[i] = raman_time_wrapped_[i];
    transform.forward(h_complex, h_spec);

    // Pin the zero-frequency response of the Raman part to exactly 1 before
    // mixing with the instantaneous share.
    const double dc = h_spec[0].real();
    if (!(dc > 0)) throw ConfigError("RamanModel: Raman response has non-positive DC value");
    for (std::size_t k = 0; k < n; ++k) spectrum_[k] = f + (1.0 - f) * h_spec[k] / dc;
  }

  // Gain profile and noise spectrum.  Negative imaginary parts can only be
  // discretization dust; anything larger means a bad mode table.
  double max_im = 0.0, min_im = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double im = grid.omega()[k] >= 0 ? spectrum_[k].imag() : spectrum_[n - k].imag();
    max_im = std::max(max_im, im);
    min_im = std::min(min_im, im);
  }
  if (min_im < -1e-9 * std::max(max_im, 1e-300))
    throw ConfigError("RamanModel: gain profile has negative values; check the mode table");

  ThermalSpectrum thermal(params.temperature, params.t0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t pos_bin = grid.omega()[k] >= 0 ? k : n - k;
    gain_[k] = std::max(0.0, spectrum_[pos_bin].imag());
    if (grid.omega()[k] == 0.0) {
      psd_[k] = 0.0;  // alpha^R(0) = 0 wins over the diverging occupation
    } else {
      psd_[k] = gain_[k] * thermal.wigner_weight(grid.omega()[k]) / params.nbar;
    }
    if (psd_[k] > 0) has_noise_ = true;
  }
}

std::vector<double> RamanModel::raman_response_time() const {
  const std::size_t n = grid_->n_points();
  std::vector<double> out(n);
  // Unwrap so the result is aligned with grid.tau(): negative times first.
  for (std::size_t i = 0; i < n; ++i) out[i] = raman_time_wrapped_[(i + n / 2) % n];
  return out;
}

void sample_raman_noise(NoiseStream& stream, const SimGrid& grid,
                        const SpectralTransform& transform, std::span<const double> psd,
                        double d_zeta, std::span<double> gamma_out,
                        std::span<std::complex<double>> scratch_freq,
                        std::span<std::complex<double>> scratch_time) {
  const std::size_t n = grid.n_points();
  if (psd.size() != n || gamma_out.size() != n || scratch_freq.size() != n ||
      scratch_time.size() != n)
    throw ContractError("sample_raman_noise: length mismatch");
  if (!(d_zeta > 0)) throw ContractError("sample_raman_noise: d_zeta must be positive");

  const double window_over_step = grid.tau_window() / d_zeta;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;

  // Hermitian synthesis: independent complex amplitudes on the positive
  // half, mirrored conjugates on the negative half, real DC and Nyquist.
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double g0 = stream.gaussian();
    const double g1 = stream.gaussian();
    const double sigma = std::sqrt(psd[k] * window_over_step);
    if (k == 0 || k == n / 2) {
      scratch_freq[k] = sigma * g0;
    } else {
      scratch_freq[k] = sigma * inv_sqrt2 * std::complex<double>(g0, g1);
      scratch_freq[n - k] = std::conj(scratch_freq[k]);
    }
  }

  transform.inverse(scratch_freq, scratch_time);
  for (std::size_t i = 0; i < n; ++i) gamma_out[i] = scratch_time[i].real();
}

RamanConfig load_raman_csv(const std::string& path, double t0, double instantaneous_fraction,
                           bool enabled) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open Raman mode table: " + path);

  RamanConfig config;
  config.instantaneous_fraction = instantaneous_fraction;
  config.enabled = enabled;

  const double thz_to_grid = 2.0 * std::numbers::pi * 1e12 * t0;

  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      // Require the documented header so silently-wrong files are rejected.
      std::string stripped;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) stripped += c;
      if (stripped != "center_thz,width_thz,strength")
        throw ConfigError(path + ": expected header 'center_thz,width_thz,strength'");
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    double values[3];
    for (int c = 0; c < 3; ++c) {
      if (!std::getline(row, cell, ','))
        throw ConfigError(path + ": line " + std::to_string(line_no) + " needs 3 columns");
      try {
        values[c] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError(path + ": line " + std::to_string(line_no) + " has a bad number");
      }
    }
    config.modes.push_back(
        {values[0] * thz_to_grid, values[1] * thz_to_grid, values[2]});
  }
  if (!header_seen) throw ConfigError(path + ": missing header line");
  if (config.modes.empty()) throw ConfigError(path + ": no modes found");
  return config;
}

}  // namespace fsq
