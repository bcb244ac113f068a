#include "fsq/phase_noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fsq/errors.hpp"

namespace fsq {

namespace {

constexpr double kRhoPMax = 1e3;       // bounds the fitted rho_p at E_max
constexpr std::size_t kMaxIter = 200;  // golden-section iteration cap

double golden_section(double lo, double hi, const auto& f, std::size_t& evals) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  evals += 2;
  std::size_t iter = 0;
  while (std::abs(b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b))) {
    if (++iter > kMaxIter)
      throw FitError("golden-section search failed to converge after " +
                     std::to_string(kMaxIter) + " iterations");
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return 0.5 * (a + b);
}

}  // namespace

void KerrSimData::validate() const {
  if (energy.size() < 2) throw ConfigError("KerrSimData: need at least 2 energies");
  if (theta_k.size() != energy.size() || rho_s.size() != energy.size() ||
      rho_a.size() != energy.size())
    throw ConfigError("KerrSimData: column lengths differ");
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (i > 0 && !(energy[i] > energy[i - 1]))
      throw ConfigError("KerrSimData: energies must be strictly increasing");
    if (!(rho_s[i] > 0) || !(rho_a[i] > 0) || rho_s[i] > rho_a[i])
      throw ConfigError("KerrSimData: need 0 < rho_s <= rho_a");
  }
}

KerrPoint interpolate_kerr(const KerrSimData& sim, double energy) {
  sim.validate();
  if (energy < sim.min_energy() || energy > sim.max_energy())
    throw DomainError("interpolate_kerr: energy outside the simulated range");
  auto hi = std::lower_bound(sim.energy.begin(), sim.energy.end(), energy);
  if (hi == sim.energy.begin()) ++hi;
  const auto i1 = static_cast<std::size_t>(hi - sim.energy.begin());
  const auto i0 = i1 - 1;
  const double t = (energy - sim.energy[i0]) / (sim.energy[i1] - sim.energy[i0]);
  KerrPoint p;
  p.theta_k = (1 - t) * sim.theta_k[i0] + t * sim.theta_k[i1];
  p.rho_s = std::exp((1 - t) * std::log(sim.rho_s[i0]) + t * std::log(sim.rho_s[i1]));
  p.rho_a = std::exp((1 - t) * std::log(sim.rho_a[i0]) + t * std::log(sim.rho_a[i1]));
  return p;
}

double total_variance(double theta, double energy, const KerrSimData& sim,
                      const PhaseNoiseModel& model) {
  const KerrPoint k = interpolate_kerr(sim, energy);
  const double sn = std::sin(theta);
  const double cd = std::cos(theta - k.theta_k);
  const double sd = std::sin(theta - k.theta_k);
  return model.rho_p(energy) * sn * sn + k.rho_s * cd * cd + k.rho_a * sd * sd;
}

MinimizingAngle minimizing_angle(double energy, const KerrSimData& sim,
                                 const PhaseNoiseModel& model) {
  const KerrPoint k = interpolate_kerr(sim, energy);
  const double rho_p = model.rho_p(energy);
  // rho(theta) = C + (a cos 2theta + b sin 2theta)/2 with
  //   a = -rho_p + (rho_s - rho_a) cos 2theta_K,
  //   b = (rho_s - rho_a) sin 2theta_K.
  const double a = -rho_p + (k.rho_s - k.rho_a) * std::cos(2 * k.theta_k);
  const double b = (k.rho_s - k.rho_a) * std::sin(2 * k.theta_k);

  MinimizingAngle out;
  if (a == 0 && b == 0) {
    out.theta_n = k.theta_k;
    out.degenerate = true;
    return out;
  }
  double theta = 0.5 * std::atan2(-b, -a);
  if (theta < 0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  out.theta_n = theta;
  return out;
}

double angle_difference_mod_pi(double a, double b) {
  double d = std::fmod(a - b, std::numbers::pi);
  if (d > 0.5 * std::numbers::pi) d -= std::numbers::pi;
  if (d <= -0.5 * std::numbers::pi) d += std::numbers::pi;
  return d;
}

PhaseNoiseFit fit_phase_coefficient(const std::vector<std::pair<double, double>>& measured,
                                    const KerrSimData& sim, bool with_offset) {
  sim.validate();
  std::vector<std::pair<double, double>> usable;
  for (const auto& [e, th] : measured)
    if (e >= sim.min_energy() && e <= sim.max_energy()) usable.push_back({e, th});
  if (usable.size() < 2)
    throw FitError("fit_phase_coefficient: need at least 2 measured angles inside the "
                   "simulated energy range");

  PhaseNoiseFit fit;
  const double c_max = kRhoPMax / sim.max_energy();
  const double c0_max = kRhoPMax;

  auto objective = [&](double c_p, double c_0) {
    PhaseNoiseModel m{c_p, c_0};
    double ss = 0;
    for (const auto& [e, th] : usable) {
      const double d = angle_difference_mod_pi(minimizing_angle(e, sim, m).theta_n, th);
      ss += d * d;
    }
    return ss;
  };

  // Bracket the global minimum on a coarse grid, then refine; the objective
  // is smooth but not guaranteed unimodal over the full range.
  auto minimize_1d = [&](double lo, double hi, const auto& f) {
    constexpr int kGrid = 64;
    int best = 0;
    double best_val = f(lo);
    fit.objective_evaluations += 1;
    for (int i = 1; i <= kGrid; ++i) {
      const double x = lo + (hi - lo) * i / kGrid;
      const double val = f(x);
      ++fit.objective_evaluations;
      if (val < best_val) {
        best_val = val;
        best = i;
      }
    }
    const double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
    const double b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
    return golden_section(a, b, f, fit.objective_evaluations);
  };

  double c_p = minimize_1d(0.0, c_max, [&](double c) { return objective(c, 0.0); });
  double c_0 = 0.0;
  if (with_offset) {
    for (int sweep = 0; sweep < 4; ++sweep) {
      c_0 = minimize_1d(0.0, c0_max, [&](double c) { return objective(c_p, c); });
      c_p = minimize_1d(0.0, c_max, [&](double c) { return objective(c, c_0); });
    }
  }

  fit.c_p = c_p;
  fit.c_0 = c_0;
  PhaseNoiseModel best{c_p, c_0};
  double ss = 0;
  for (const auto& [e, th] : usable) {
    const double d = angle_difference_mod_pi(minimizing_angle(e, sim, best).theta_n, th);
    fit.residuals.push_back(d);
    ss += d * d;
  }
  fit.rms_residual = std::sqrt(ss / static_cast<double>(usable.size()));
  return fit;
}

}  // namespace fsq
