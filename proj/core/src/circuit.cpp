#include "bsnkit/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "bsnkit/errors.hpp"
#include "bsnkit/magnetics.hpp"
#include "bsnkit/parallel.hpp"
#include "bsnkit/stats.hpp"

namespace bsnkit::circuit {

namespace {

double softplus(double u) {
  if (u > 35.0) return u;
  if (u < -35.0) return std::exp(u);
  return std::log1p(std::exp(u));
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

struct FetTerms {
  double f = 0.0;      // F
  double df_dvds = 0.0;
};

FetTerms fet_terms(const FetModel& fet, double vgs, double vds) {
  const double scale = fet.slope_factor * fet.thermal_voltage;
  const double uf = (vgs - fet.vt) / scale;
  const double ur = (vgs - fet.vt - fet.slope_factor * vds) / scale;
  const double sf = softplus(uf);
  const double sr = softplus(ur);
  return {sf * sf - sr * sr, 2.0 * sr * logistic(ur) / fet.thermal_voltage};
}

}  // namespace

void FetModel::calibrate() {
  if (!(vdd > 0.0) || !(i_dsat > 0.0) || !(i_plus_max > i_dsat)) {
    throw ConfigError("FET anchors need V_DD > 0 and I_plus_max > I_Dsat > 0");
  }
  const double vds = 0.5 * vdd;
  const double c = 1.0 + clm * vds;
  const double f1 = fet_terms(*this, 0.5 * vdd, vds).f;
  const double f2 = fet_terms(*this, vdd, vds).f;
  // c / I = 1/(k F) + 1/L at both anchors.
  gain = (1.0 / f1 - 1.0 / f2) / (c * (1.0 / i_dsat - 1.0 / i_plus_max));
  inv_limit = c / i_dsat - 1.0 / (gain * f1);
  if (!(gain > 0.0) || !(inv_limit >= 0.0)) {
    throw ConfigError("FET anchors are not reachable with these shape parameters");
  }
}

void FetModel::validate() const {
  if (!(vdd > 0.0)) throw ConfigError("V_DD must be positive");
  if (!(vt > 0.0 && vt < vdd)) throw ConfigError("V_T must lie in (0, V_DD)");
  if (!(slope_factor >= 1.0)) throw ConfigError("subthreshold slope factor must be >= 1");
  if (!(thermal_voltage > 0.0)) throw ConfigError("thermal voltage must be positive");
  if (!(clm >= 0.0)) throw ConfigError("channel-length modulation must be non-negative");
  if (!(gain > 0.0) || !(inv_limit >= 0.0)) throw ConfigError("FET model is not calibrated");
}

double FetModel::current(double vgs, double vds) const {
  const FetTerms t = fet_terms(*this, vgs, vds);
  const double kf = gain * t.f;
  return (1.0 + clm * vds) * kf / (1.0 + kf * inv_limit);
}

double FetModel::output_conductance(double vgs, double vds) const {
  const FetTerms t = fet_terms(*this, vgs, vds);
  const double kf = gain * t.f;
  const double denom = 1.0 + kf * inv_limit;
  return clm * kf / denom + (1.0 + clm * vds) * gain * t.df_dvds / (denom * denom);
}

FetModel default_fet() {
  FetModel fet;
  fet.calibrate();
  return fet;
}

double fet_current(const FetModel& fet, double vgs, double vds) {
  constexpr double kSlack = 1e-12;
  if (vgs < -kSlack || vgs > fet.vdd + kSlack || vds < -kSlack || vds > fet.vdd + kSlack) {
    throw ConfigError("FET voltages must lie in [0, V_DD]");
  }
  return fet.current(vgs, vds);
}

void BsnCircuit::validate() const {
  resistor.validate();
  fet.validate();
  if (!(c_load > 0.0)) throw ConfigError("C_load must be positive");
}

BsnCircuit default_circuit(resistors::ResistorKind kind, double tau_fluct) {
  BsnCircuit c;
  c.resistor.kind = kind;
  c.resistor.tau_fluct = tau_fluct;
  if (resistors::is_tunable(kind)) {
    c.resistor.r_p = 15e3;
    c.resistor.r_ap = 45e3;
    c.resistor.i50 = c.fet.i_dsat;
    c.resistor.i0 = 5e-6;
  } else {
    const ResistanceDesign d = design_resistance_ratio(c.fet, 0.05);
    c.resistor.r_p = d.r_p;
    c.resistor.r_ap = d.r_ap;
  }
  return c;
}

NodeSolution solve_node(const FetModel& fet, double r, double v_in) {
  if (!(r > 0.0)) throw ConfigError("resistance must be positive");
  if (v_in < 0.0 || v_in > fet.vdd) throw ConfigError("V_IN must lie in [0, V_DD]");
  const double vdd = fet.vdd;
  auto residual = [&](double v) { return fet.current(v_in, v) - (vdd - v) / r; };
  double lo = 0.0;
  double hi = vdd;
  if (residual(hi) <= 0.0) {
    return {vdd, 0.0, residual(hi)};
  }
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) > 0.0 ? hi : lo) = mid;
  }
  double v = 0.5 * (lo + hi);
  double f = residual(v);
  for (int iter = 0; iter < 20 && f != 0.0; ++iter) {
    (f > 0.0 ? hi : lo) = v;
    const double slope = fet.output_conductance(v_in, v) + 1.0 / r;
    double next = v - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double fn = residual(next);
    if (std::abs(fn) >= std::abs(f) && std::abs(next - v) < 1e-15) break;
    v = next;
    f = fn;
    if (std::abs(f) < 1e-13 * fet.i_dsat) break;
  }
  return {v, (vdd - v) / r, f};
}

BsnSimulator::BsnSimulator(const BsnCircuit& circuit, Rng rng, double v_in)
    : circuit_(circuit), resistor_(circuit.resistor, rng) {
  circuit_.validate();
  set_input(v_in);
  node_ = solve_node(circuit_.fet, resistor_.resistance(), v_in_);
  v_filtered_ = node_.v_node;
  output_ = v_filtered_ < circuit_.threshold() ? 1 : -1;
}

void BsnSimulator::set_input(double v_in) {
  if (v_in < 0.0 || v_in > circuit_.fet.vdd) throw ConfigError("V_IN must lie in [0, V_DD]");
  v_in_ = v_in;
  const double v_low = solve_node(circuit_.fet, circuit_.resistor.r_ap, v_in).v_node;
  const double v_high = solve_node(circuit_.fet, circuit_.resistor.r_p, v_in).v_node;
  inverter_active_ = v_low <= circuit_.threshold() && circuit_.threshold() <= v_high;
}

int BsnSimulator::step(double dt) {
  const double r = resistor_.step(node_.current, dt);
  node_ = solve_node(circuit_.fet, r, v_in_);
  const double r_eff = 1.0 / (1.0 / r + circuit_.fet.output_conductance(v_in_, node_.v_node));
  const double blend = -std::expm1(-dt / (r_eff * circuit_.c_load));
  v_filtered_ += (node_.v_node - v_filtered_) * blend;
  output_ = v_filtered_ < circuit_.threshold() ? 1 : -1;
  return output_;
}

double BsnSimulator::power() const {
  return circuit_.fet.vdd * (node_.current + (inverter_active_ ? circuit_.fet.i_dsat : 0.0));
}

Trace simulate_trace(const BsnCircuit& circuit, double v_in, double duration, double dt,
                     std::uint64_t seed, double burn_in) {
  if (!(dt > 0.0) || !(duration > 0.0)) throw ConfigError("duration and dt must be positive");
  BsnSimulator sim(circuit, Rng(seed, 0), v_in);
  const auto burn = static_cast<std::size_t>(std::llround(burn_in / dt));
  for (std::size_t i = 0; i < burn; ++i) sim.step(dt);
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  Trace t;
  t.dt = dt;
  t.v_in = v_in;
  for (auto* v : {&t.resistance, &t.v_node, &t.current, &t.output, &t.power}) v->reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    sim.step(dt);
    t.resistance.push_back(sim.resistance());
    t.v_node.push_back(sim.v_node());
    t.current.push_back(sim.current());
    t.output.push_back(sim.output());
    t.power.push_back(sim.power());
  }
  return t;
}

std::string_view to_string(CurveClass c) {
  switch (c) {
    case CurveClass::sigmoid: return "sigmoid";
    case CurveClass::staircase: return "staircase";
    case CurveClass::nonmonotone: return "nonmonotone";
    case CurveClass::unclassified: return "unclassified";
  }
  return "unknown";
}

std::vector<double> linear_grid(double lo, double hi, std::size_t points) {
  if (points < 2 || !(hi > lo)) throw ConfigError("grid needs hi > lo and at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

namespace {

double resistor_timescale(const resistors::ResistorParams& r) {
  if (r.backend == resistors::Backend::mtj) {
    return magnetics::estimated_correlation_time(r.mtj.magnet);
  }
  return r.tau_fluct;
}

}  // namespace

TransferCurve transfer_characteristic(const BsnCircuit& circuit, std::span<const double> v_in,
                                      const SweepSettings& settings) {
  circuit.validate();
  for (std::size_t i = 1; i < v_in.size(); ++i) {
    if (!(v_in[i] > v_in[i - 1])) throw ConfigError("V_IN grid must be strictly increasing");
  }
  const double tau = resistor_timescale(circuit.resistor);
  const double duration = settings.duration > 0.0 ? settings.duration : 1000.0 * tau;
  double dt = settings.dt > 0.0 ? settings.dt : tau / 50.0;
  if (circuit.resistor.backend == resistors::Backend::mtj) {
    dt = std::max(dt, circuit.resistor.mtj.dt);
  }
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  const auto burn = static_cast<std::size_t>(std::llround(settings.burn_in * duration / dt));
  if (steps < 100) throw ConfigError("averaging window shorter than 100 steps");

  TransferCurve curve;
  curve.v_in.assign(v_in.begin(), v_in.end());
  curve.mean_out.resize(v_in.size());
  curve.error.resize(v_in.size());
  curve.averaging_sufficient = duration >= 1000.0 * tau;
  parallel_for(v_in.size(), settings.threads, [&](std::size_t i) {
    BsnSimulator sim(circuit, Rng(settings.seed, i), v_in[i]);
    for (std::size_t k = 0; k < burn; ++k) sim.step(dt);
    std::vector<double> out(steps);
    for (std::size_t k = 0; k < steps; ++k) out[k] = sim.step(dt);
    const stats::Estimate e = stats::batch_mean(out, 32);
    curve.mean_out[i] = e.mean;
    curve.error[i] = e.error;
  });
  curve.fit = fit_tanh(curve.v_in, curve.mean_out);
  curve.classification = classify(curve.v_in, curve.mean_out, curve.fit);
  return curve;
}

namespace {

double fit_rmse(std::span<const double> v, std::span<const double> m, double v0, double vs) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = std::tanh((v[i] - v0) / vs) - m[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(v.size()));
}

// Linear interpolation of the first crossing of `level` scanning upward in v.
std::optional<double> crossing(std::span<const double> v, std::span<const double> m, double level) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if ((m[i - 1] - level) * (m[i] - level) <= 0.0 && m[i] != m[i - 1]) {
      return v[i - 1] + (level - m[i - 1]) * (v[i] - v[i - 1]) / (m[i] - m[i - 1]);
    }
  }
  return std::nullopt;
}

}  // namespace

TanhFit fit_tanh(std::span<const double> v, std::span<const double> m) {
  if (v.size() != m.size() || v.size() < 3) throw ConfigError("tanh fit needs >= 3 points");
  const double span = v.back() - v.front();
  double v0 = crossing(v, m, 0.0).value_or(0.5 * (v.front() + v.back()));
  const auto lo = crossing(v, m, -0.76);
  const auto hi = crossing(v, m, 0.76);
  double vs = (lo && hi && *hi > *lo) ? 0.5 * (*hi - *lo) : 0.1 * span;
  vs = std::max(vs, 1e-3 * span);

  double lambda = 1e-3;
  double cost = fit_rmse(v, m, v0, vs);
  for (int iter = 0; iter < 200; ++iter) {
    double a00 = 0.0, a01 = 0.0, a11 = 0.0, g0 = 0.0, g1 = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double z = (v[i] - v0) / vs;
      const double t = std::tanh(z);
      const double sech2 = 1.0 - t * t;
      const double j0 = -sech2 / vs;
      const double j1 = -sech2 * z / vs;
      const double r = t - m[i];
      a00 += j0 * j0;
      a01 += j0 * j1;
      a11 += j1 * j1;
      g0 += j0 * r;
      g1 += j1 * r;
    }
    bool improved = false;
    while (lambda < 1e10) {
      const double b00 = a00 * (1.0 + lambda);
      const double b11 = a11 * (1.0 + lambda);
      const double det = b00 * b11 - a01 * a01;
      if (det == 0.0) break;
      const double d0 = -(b11 * g0 - a01 * g1) / det;
      const double d1 = -(b00 * g1 - a01 * g0) / det;
      const double nv0 = v0 + d0;
      const double nvs = std::abs(vs + d1);
      const double nc = nvs > 0.0 ? fit_rmse(v, m, nv0, nvs) : cost;
      if (nc < cost) {
        const double gain = cost - nc;
        v0 = nv0;
        vs = nvs;
        cost = nc;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = gain > 1e-14;
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) break;
  }
  return {v0, vs, cost};
}

CurveClass classify(std::span<const double> v, std::span<const double> m, const TanhFit& fit) {
  (void)v;
  double largest_rise = 0.0;
  double largest_fall = 0.0;
  double lowest = m.empty() ? 0.0 : m[0];
  double highest = lowest;
  for (double x : m) {
    largest_rise = std::max(largest_rise, x - lowest);
    largest_fall = std::max(largest_fall, highest - x);
    lowest = std::min(lowest, x);
    highest = std::max(highest, x);
  }
  if (largest_rise > 0.2 && largest_fall > 0.2) return CurveClass::nonmonotone;

  std::size_t best_start = 0;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < m.size();) {
    if (std::abs(m[i]) >= 0.1) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < m.size() && std::abs(m[j]) < 0.1) ++j;
    if (j - i > best_len) {
      best_start = i;
      best_len = j - i;
    }
    i = j;
  }
  if (best_len >= 2 && fit.rmse >= 0.05) {
    const auto left = m.subspan(0, best_start);
    const auto right = m.subspan(best_start + best_len);
    const bool low_left = !left.empty() && *std::min_element(left.begin(), left.end()) <= -0.9;
    const bool high_right = !right.empty() && *std::max_element(right.begin(), right.end()) >= 0.9;
    if (low_left && high_right) return CurveClass::staircase;
  }
  if (fit.rmse < 0.05) return CurveClass::sigmoid;
  return CurveClass::unclassified;
}

StochasticRegion stochastic_region(const TransferCurve& curve) {
  const std::span<const double> v = curve.v_in;
  const std::span<const double> m = curve.mean_out;
  if (m.empty() || m.front() > -0.95 || m.back() < 0.95) {
    throw NumericalError("transfer curve does not saturate within the sweep");
  }
  // Last upward crossing of -0.95 and first upward crossing of +0.95.
  std::size_t lo = 0;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    if (m[i] <= -0.95) lo = i;
  }
  std::size_t hi = m.size() - 1;
  for (std::size_t i = m.size() - 1; i > 0; --i) {
    if (m[i] >= 0.95) hi = i;
  }
  auto interp = [&](std::size_t i, double level) {
    const double dm = m[i + 1] - m[i];
    return dm == 0.0 ? v[i] : v[i] + (level - m[i]) * (v[i + 1] - v[i]) / dm;
  };
  StochasticRegion r;
  r.v_minus = interp(lo, -0.95);
  r.v_plus = hi > 0 ? interp(hi - 1, 0.95) : v[0];
  r.delta_v = r.v_plus - r.v_minus;
  return r;
}

ResistanceDesign design_resistance_ratio(const FetModel& fet, double delta_v) {
  if (!(delta_v > 0.0)) throw ConfigError("delta_v must be positive");
  if (delta_v >= fet.vdd) throw ConfigError("delta_v must be less than V_DD");
  const double vds = 0.5 * fet.vdd;
  const double centre = 0.5 * fet.vdd;
  ResistanceDesign d;
  d.v_minus = centre - 0.5 * delta_v;
  d.v_plus = centre + 0.5 * delta_v;
  if (d.v_minus < 0.0 || d.v_plus > fet.vdd) {
    throw ConfigError("stochastic region does not fit inside [0, V_DD]");
  }
  d.i_plus = fet.current(d.v_plus, vds);
  d.i_minus = fet.current(d.v_minus, vds);
  if (!(d.i_minus > 0.0)) throw ConfigError("FET carries no current at the lower edge");
  d.n = d.i_plus / d.i_minus;
  d.r_p = vds / d.i_plus;
  d.r_ap = vds / d.i_minus;
  return d;
}

ResistanceDesign design_for_ratio(const FetModel& fet, double n) {
  if (!(n > 1.0)) throw ConfigError("resistance ratio must exceed 1");
  double lo = 0.0;
  double hi = fet.vdd;
  const double n_max = fet.current(fet.vdd, 0.5 * fet.vdd) / fet.current(0.0, 0.5 * fet.vdd);
  if (!(n < n_max)) throw ConfigError("resistance ratio not reachable with this FET");
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (design_resistance_ratio(fet, mid).n > n ? hi : lo) = mid;
  }
  return design_resistance_ratio(fet, 0.5 * (lo + hi));
}

DriveReport check_tunable_drive(const FetModel& fet, const resistors::ResistorParams& resistor) {
  if (!resistor.tunable()) throw ConfigError("drive check applies to tunable resistors only");
  resistor.validate();
  DriveReport rep;
  const double i0 = *resistor.i0;
  const double i50 = *resistor.i50;
  rep.required_drive = 6.0 * i0;
  rep.pass = fet.i_plus_max >= rep.required_drive;
  rep.i50_matched = std::abs(i50 - fet.i_dsat) <= 0.2 * fet.i_dsat;
  rep.message = rep.pass ? "drive sufficient" : "I_plus_max below 6 I0";
  if (!rep.i50_matched) rep.message += "; I50 not matched to I_Dsat";
  return rep;
}

CorrelationTimes measure_tau_C(const BsnCircuit& circuit, double v_in, double dt, double duration,
                               std::uint64_t seed) {
  const Trace t = simulate_trace(circuit, v_in, duration, dt, seed, 0.02 * duration);
  CorrelationTimes c;
  c.tau_c = stats::correlation_time(t.output, dt);
  c.tau_corr = stats::correlation_time(t.resistance, dt);
  return c;
}

ResponseTime measure_tau_N(const BsnCircuit& circuit, const StepSpec& step, std::size_t ensemble,
                           double dt, std::uint64_t seed, unsigned threads) {
  circuit.validate();
  if (!(dt > 0.0) || !(step.window > 0.0) || step.settle < 0.0) {
    throw ConfigError("invalid step specification");
  }
  if (ensemble < 2) throw ConfigError("ensemble must have at least two members");
  const auto settle = static_cast<std::size_t>(std::llround(step.settle / dt));
  const auto steps = static_cast<std::size_t>(std::llround(step.window / dt));
  if (steps < 40) throw ConfigError("response window shorter than 40 steps");

  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(threads, ensemble));
  std::vector<std::vector<double>> partial(chunks, std::vector<double>(steps, 0.0));
  parallel_for(chunks, threads, [&](std::size_t c) {
    auto& sum = partial[c];
    for (std::size_t r = c; r < ensemble; r += chunks) {
      BsnSimulator sim(circuit, Rng(seed, r), step.v_from);
      for (std::size_t k = 0; k < settle; ++k) sim.step(dt);
      sim.set_input(step.v_to);
      for (std::size_t k = 0; k < steps; ++k) sum[k] += sim.step(dt);
    }
  });

  ResponseTime res;
  res.time.resize(steps);
  res.mean.assign(steps, 0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    for (const auto& p : partial) res.mean[k] += p[k];
    res.mean[k] /= static_cast<double>(ensemble);
    res.time[k] = static_cast<double>(k + 1) * dt;
  }
  const std::size_t tail = steps - steps / 4;
  double final_mean = 0.0;
  for (std::size_t k = tail; k < steps; ++k) final_mean += res.mean[k];
  final_mean /= static_cast<double>(steps - tail);
  res.final_mean = final_mean;
  res.band = 2.0 * std::sqrt(std::max(1.0 - final_mean * final_mean, 1e-4) /
                             static_cast<double>(ensemble));

  const std::size_t half = std::max<std::size_t>(1, steps / 40);
  std::vector<double> prefix(steps + 1, 0.0);
  for (std::size_t k = 0; k < steps; ++k) prefix[k + 1] = prefix[k] + res.mean[k];
  std::optional<std::size_t> last_outside;
  for (std::size_t k = 0; k < steps; ++k) {
    const std::size_t a = k >= half ? k - half : 0;
    const std::size_t b = std::min(steps, k + half + 1);
    const double smooth = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
    if (std::abs(smooth - final_mean) > res.band) last_outside = k;
  }
  if (last_outside && *last_outside + 1 >= tail) {
    throw NumericalError("ensemble output did not settle within the response window");
  }
  res.tau_n = last_outside ? res.time[*last_outside + 1] : res.time[0];
  return res;
}

PowerBreakdown average_power(const BsnCircuit& circuit, const Trace& trace) {
  if (trace.power.empty()) throw ConfigError("empty trace");
  PowerBreakdown p;
  p.total = stats::mean(trace.power);
  p.resistor_branch = circuit.fet.vdd * stats::mean(trace.current);
  p.inverter_branch = p.total - p.resistor_branch;
  return p;
}

EnergyMetrics energy_metrics(double tau_c, double tau_n, double avg_power) {
  if (tau_c < 0.0 || tau_n < 0.0 || avg_power < 0.0) {
    throw ConfigError("timescales and power must be non-negative");
  }
  return {tau_c * avg_power, tau_n * avg_power};
}

}  // namespace bsnkit::circuit
