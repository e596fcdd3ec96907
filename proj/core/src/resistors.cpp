#include "bsnkit/resistors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bsnkit/constants.hpp"
#include "bsnkit/errors.hpp"

namespace bsnkit::resistors {

std::string_view to_string(ResistorKind k) {
  switch (k) {
    case ResistorKind::ntc: return "NTC";
    case ResistorKind::ntb: return "NTB";
    case ResistorKind::tc: return "TC";
    case ResistorKind::tb: return "TB";
  }
  return "unknown";
}

ResistorKind kind_from_string(std::string_view name) {
  for (auto k : {ResistorKind::ntc, ResistorKind::ntb, ResistorKind::tc, ResistorKind::tb}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown resistor kind '" + std::string(name) + "'");
}

std::string_view to_string(Backend b) { return b == Backend::mtj ? "mtj" : "behavioral"; }

Backend backend_from_string(std::string_view name) {
  if (name == "mtj") return Backend::mtj;
  if (name == "behavioral") return Backend::behavioral;
  throw ConfigError("unknown resistor backend '" + std::string(name) + "'");
}

bool is_tunable(ResistorKind k) { return k == ResistorKind::tc || k == ResistorKind::tb; }

bool is_bipolar(ResistorKind k) { return k == ResistorKind::ntb || k == ResistorKind::tb; }

double ResistorParams::drive(double current) const {
  if (!tunable()) return 0.0;
  return orientation * (current - i50.value_or(0.0)) / i0.value_or(1.0);
}

void ResistorParams::validate() const {
  if (!(r_p > 0.0)) throw ConfigError("R_P must be positive");
  if (!(r_ap > r_p)) throw ConfigError("R_AP must exceed R_P");
  if (orientation != 1 && orientation != -1) throw ConfigError("orientation must be +1 or -1");
  if (tunable()) {
    if (!i50 || !(*i50 >= 0.0)) throw ConfigError("tunable resistor requires I50 >= 0");
    if (!i0 || !(*i0 > 0.0)) throw ConfigError("tunable resistor requires I0 > 0");
  }
  if (backend == Backend::behavioral) {
    if (!(tau_fluct > 0.0)) throw ConfigError("tau_fluct must be positive");
  } else {
    mtj.magnet.validate();
    if (std::abs(norm(mtj.fixed_layer) - 1.0) > 1e-9) {
      throw ConfigError("fixed layer direction must be a unit vector");
    }
    if (!(mtj.dt > 0.0)) throw ConfigError("MTJ time step must be positive");
    if (tunable() && mtj.magnet.geometry != magnetics::Geometry::pma &&
        mtj.magnet.geometry != magnetics::Geometry::isotropic) {
      throw ConfigError("MTJ-backed tunable resistors need a PMA or isotropic free layer");
    }
  }
}

double resistance_from_m(double m_parallel, double r_p, double r_ap) {
  const double m = std::clamp(m_parallel, -1.0, 1.0);
  const double g = 0.5 * (1.0 + m) / r_p + 0.5 * (1.0 - m) / r_ap;
  return std::clamp(1.0 / g, r_p, r_ap);
}

double tmr(const ResistorParams& params) { return (params.n() - 1.0) * 100.0; }

double mtj_polarization_for(const ResistorParams& params) {
  if (!params.tunable()) return 0.0;
  const auto& mag = params.mtj.magnet;
  return 6.0 * constants::kElementaryCharge * mag.damping * mag.thermal_energy() /
         (constants::kHbarErg * params.i0.value());
}

double mtj_bias_field_for(const ResistorParams& params) {
  if (!params.tunable()) return 0.0;
  magnetics::MagnetParams mag = params.mtj.magnet;
  mag.spin_polarization = mtj_polarization_for(params);
  return magnetics::spin_torque_field(mag, params.i50.value()) / mag.damping;
}

StochasticResistor::StochasticResistor(const ResistorParams& params, Rng rng)
    : params_(params), rng_(rng) {
  params_.validate();
  if (params_.backend == Backend::mtj) {
    magnetics::MagnetParams mag = params_.mtj.magnet;
    magnetics::DriveConditions drive;
    if (params_.tunable()) {
      mag.spin_polarization = mtj_polarization_for(params_);
      drive.external_field = params_.mtj.fixed_layer * (params_.orientation * mtj_bias_field_for(params_));
      drive.polarization = params_.mtj.fixed_layer * static_cast<double>(-params_.orientation);
    } else {
      drive.polarization = params_.mtj.fixed_layer;
    }
    polarization_ = mag.spin_polarization;
    state_.magnet = magnetics::random_unit_vector(rng_);
    magnet_.emplace(mag, drive, params_.mtj.dt, rng_, state_.magnet);
    state_.m = dot(state_.magnet, params_.mtj.fixed_layer);
  } else if (is_bipolar(params_.kind)) {
    state_.m = rng_.bernoulli(0.5) ? 1.0 : -1.0;
  } else {
    state_.phase = 2.0 * constants::kPi * rng_.uniform();
    state_.m = std::cos(state_.phase);
  }
  update_resistance();
}

void StochasticResistor::set_m(double m) {
  if (!(m >= -1.0 && m <= 1.0)) throw ConfigError("m must lie in [-1, 1]");
  if (params_.backend == Backend::mtj) {
    throw ConfigError("set_m is only available for behavioral backends");
  }
  state_.m = is_bipolar(params_.kind) ? (m >= 0.0 ? 1.0 : -1.0) : m;
  state_.phase = std::acos(state_.m);
  update_resistance();
}

void StochasticResistor::update_resistance() {
  state_.r = resistance_from_m(state_.m, params_.r_p, params_.r_ap);
}

void StochasticResistor::step_mtj(double current, double dt) {
  if (params_.tunable() && current != last_current_) {
    magnet_->set_spin_current(current);
    last_current_ = current;
  }
  const double sub = params_.mtj.dt;
  const auto substeps = static_cast<std::size_t>(std::max(1.0, std::round(dt / sub)));
  magnet_->run(substeps);
  state_.magnet = magnet_->state();
  state_.m = dot(state_.magnet, params_.mtj.fixed_layer);
}

double StochasticResistor::step(double current, double dt) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (current < 0.0) throw ConfigError("branch current must be non-negative");
  if (params_.backend == Backend::mtj) {
    step_mtj(current, dt);
    update_resistance();
    return state_.r;
  }
  const double tau = params_.tau_fluct;
  const double x = std::clamp(params_.drive(current), -50.0, 50.0);
  if (is_bipolar(params_.kind)) {
    // Exact two-state Markov transition over dt.
    const double rate = std::cosh(x) / tau;
    const double p_ap = 0.5 * (1.0 + std::tanh(x));
    const double in_ap = state_.m < 0.0 ? 1.0 : 0.0;
    const double prob_ap = p_ap + (in_ap - p_ap) * std::exp(-rate * dt);
    state_.m = rng_.bernoulli(prob_ap) ? -1.0 : 1.0;
  } else {
    const double diffusion = 1.0 / tau;
    const double kappa = -2.0 * x;
    if (kappa == 0.0) {
      state_.phase += std::sqrt(2.0 * diffusion * dt) * rng_.normal();
    } else {
      const double stiffness = diffusion * std::abs(kappa) * dt;
      const auto substeps = static_cast<int>(std::ceil(std::max(stiffness, 2.0 * diffusion * dt) / 0.05));
      const double h = dt / substeps;
      const double noise = std::sqrt(2.0 * diffusion * h);
      for (int i = 0; i < substeps; ++i) {
        state_.phase += -diffusion * kappa * std::sin(state_.phase) * h + noise * rng_.normal();
      }
    }
    state_.phase = std::remainder(state_.phase, 2.0 * constants::kPi);
    state_.m = std::cos(state_.phase);
  }
  update_resistance();
  return state_.r;
}

Histogram stationary_histogram(const ResistorParams& params, double current, double duration,
                               double dt, std::uint64_t seed, std::size_t bins) {
  if (!(dt > 0.0) || !(duration > 0.0)) throw ConfigError("duration and dt must be positive");
  if (bins < 2) throw ConfigError("histogram needs at least two bins");
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  if (steps < 1000) throw NumericalError("fewer than 1000 samples for the histogram");
  StochasticResistor res(params, Rng(seed, 0));
  Histogram hist;
  hist.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    hist.edges[i] = params.r_p + (params.r_ap - params.r_p) * static_cast<double>(i) / bins;
  }
  std::vector<double> counts(bins, 0.0);
  double central = 0.0;
  const double span = params.r_ap - params.r_p;
  for (std::size_t i = 0; i < steps; ++i) {
    const double r = res.step(current, dt);
    const double u = (r - params.r_p) / span;
    const auto bin = std::min(bins - 1, static_cast<std::size_t>(std::max(0.0, u) * bins));
    counts[bin] += 1.0;
    if (u > 0.25 && u < 0.75) central += 1.0;
  }
  hist.samples = steps;
  hist.mass.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) hist.mass[i] = counts[i] / static_cast<double>(steps);
  hist.bipolar = central / static_cast<double>(steps) < 0.1;
  return hist;
}

}  // namespace bsnkit::resistors
