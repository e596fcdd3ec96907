#include "bsnsim/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <type_traits>
#include <variant>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include <bsnkit/circuit.hpp>
#include <bsnkit/errors.hpp>
#include <bsnkit/magnetics.hpp>
#include <bsnkit/network.hpp>
#include <bsnkit/resistors.hpp>

#ifndef BSNSIM_VERSION
#define BSNSIM_VERSION "unknown"
#endif

namespace bsnsim {

using bsnkit::ConfigError;
using bsnkit::NumericalError;
using bsnkit::config::ObjectReader;
namespace mag = bsnkit::magnetics;
namespace res = bsnkit::resistors;
namespace cir = bsnkit::circuit;
namespace net = bsnkit::network;
namespace cfg = bsnkit::config;

namespace {

constexpr ExperimentKind kAllKinds[] = {
    ExperimentKind::magnet_dynamics, ExperimentKind::current_response,
    ExperimentKind::pinning_field,   ExperimentKind::resistor_histogram,
    ExperimentKind::transfer_curve,  ExperimentKind::timescales,
    ExperimentKind::power_energy,    ExperimentKind::network_run,
    ExperimentKind::fps_projection,
};

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t points = 0;
  std::vector<double> values() const { return cir::linear_grid(lo, hi, points); }
};

Grid parse_grid(const Json& j, const std::string& where) {
  ObjectReader r(j, where, {"min", "max", "points"});
  Grid g{r.number("min"), r.number("max"), r.count("points", 21)};
  if (!(g.hi > g.lo) || g.points < 2) {
    throw ConfigError(where + ": need max > min and at least two points");
  }
  return g;
}

// A circuit section is either a full parameter set or {"preset": kind}.
cir::BsnCircuit parse_circuit_section(const Json& j) {
  if (j.is_object() && j.contains("preset")) {
    ObjectReader r(j, "circuit", {"preset", "tau_fluct", "c_load", "delta_v"});
    const auto kind = res::kind_from_string(r.text("preset"));
    cir::BsnCircuit c = cir::default_circuit(kind, r.number("tau_fluct", 1e-9));
    c.c_load = r.number("c_load", c.c_load);
    if (r.has("delta_v")) {
      if (c.resistor.tunable()) {
        throw ConfigError("circuit.delta_v applies to non-tunable presets only");
      }
      const auto d = cir::design_resistance_ratio(c.fet, r.number("delta_v"));
      c.resistor.r_p = d.r_p;
      c.resistor.r_ap = d.r_ap;
    }
    c.validate();
    return c;
  }
  return cfg::parse_circuit(j);
}

struct MagnetDynamics {
  mag::MagnetParams magnet;
  mag::DriveConditions drive;
  mag::RunSettings run;
  std::size_t stride = 1;
};

struct CurrentResponse {
  mag::MagnetParams magnet;
  mag::DriveConditions drive;
  mag::RunSettings run;
  Grid currents;
};

struct PinningField {
  mag::MagnetParams magnet;
  mag::RunSettings run;
  Grid fields;
  bsnkit::Vec3 direction;
};

struct ResistorHistogram {
  res::ResistorParams resistor;
  double current = 0.0;
  double duration = 0.0;
  double dt = 0.0;
  std::size_t bins = 50;
};

struct TransferSweep {
  cir::BsnCircuit circuit;
  Grid v_in;
  cir::SweepSettings settings;
};

struct Timescales {
  cir::BsnCircuit circuit;
  double v_in = 0.0;
  double dt = 0.0;
  double duration = 0.0;
  cir::StepSpec step;
  std::size_t ensemble = 200;
};

struct PowerEnergy {
  cir::BsnCircuit circuit;
  std::vector<double> v_in;
  double duration = 0.0;
  double dt = 0.0;
  std::optional<double> tau_c;
  double tau_n = 0.0;
};

struct NetworkRun {
  net::IsingProblem problem;
  net::NetworkConfig network;
};

struct FpsPlan {
  std::vector<DeviceClass> classes;
  std::vector<double> sizes;
};

using Plan = std::variant<MagnetDynamics, CurrentResponse, PinningField, ResistorHistogram,
                          TransferSweep, Timescales, PowerEnergy, NetworkRun, FpsPlan>;

mag::RunSettings run_section(const ObjectReader& r, const ExperimentSpec& spec) {
  mag::RunSettings run = r.has("run") ? cfg::parse_run(r.at("run")) : mag::RunSettings{};
  run.seed = spec.seed;
  run.threads = spec.threads;
  return run;
}

Plan make_plan(const ExperimentSpec& spec) {
  const Json& j = spec.parameters;
  switch (spec.kind) {
    case ExperimentKind::magnet_dynamics: {
      ObjectReader r(j, "experiment", {"kind", "seed", "magnet", "drive", "run", "stride"});
      MagnetDynamics p;
      p.magnet = cfg::parse_magnet(r.at("magnet"));
      if (r.has("drive")) p.drive = cfg::parse_drive(r.at("drive"));
      p.run = run_section(r, spec);
      p.stride = r.count("stride", 1);
      if (p.stride == 0) throw ConfigError("experiment.stride must be positive");
      return p;
    }
    case ExperimentKind::current_response: {
      ObjectReader r(j, "experiment", {"kind", "seed", "magnet", "drive", "run", "currents"});
      CurrentResponse p;
      p.magnet = cfg::parse_magnet(r.at("magnet"));
      if (r.has("drive")) p.drive = cfg::parse_drive(r.at("drive"));
      p.run = run_section(r, spec);
      p.currents = parse_grid(r.at("currents"), "currents");
      return p;
    }
    case ExperimentKind::pinning_field: {
      ObjectReader r(j, "experiment", {"kind", "seed", "magnet", "run", "fields", "direction"});
      PinningField p;
      p.magnet = cfg::parse_magnet(r.at("magnet"));
      p.run = run_section(r, spec);
      p.fields = parse_grid(r.at("fields"), "fields");
      p.direction = r.vector("direction", {0, 0, mag::output_axis(p.magnet.geometry) == 2 ? 1.0 : 0.0});
      if (p.direction == bsnkit::Vec3{}) p.direction = {1, 0, 0};
      p.direction = bsnkit::normalized(p.direction);
      return p;
    }
    case ExperimentKind::resistor_histogram: {
      ObjectReader r(j, "experiment",
                     {"kind", "seed", "resistor", "current", "duration", "dt", "bins"});
      ResistorHistogram p;
      p.resistor = cfg::parse_resistor(r.at("resistor"));
      p.current = r.number("current", p.resistor.i50.value_or(0.0));
      p.duration = r.number("duration", 1000.0 * p.resistor.tau_fluct);
      p.dt = r.number("dt", p.resistor.tau_fluct / 50.0);
      p.bins = r.count("bins", 50);
      if (!(p.duration > 0.0) || !(p.dt > 0.0) || p.current < 0.0) {
        throw ConfigError("experiment: duration, dt must be positive and current non-negative");
      }
      return p;
    }
    case ExperimentKind::transfer_curve: {
      ObjectReader r(j, "experiment", {"kind", "seed", "circuit", "sweep"});
      TransferSweep p;
      p.circuit = parse_circuit_section(r.at("circuit"));
      p.v_in = {0.0, p.circuit.fet.vdd, 41};
      if (r.has("sweep")) {
        ObjectReader s(r.at("sweep"), "sweep", {"min", "max", "points", "duration", "dt", "burn_in"});
        p.v_in.lo = s.number("min", p.v_in.lo);
        p.v_in.hi = s.number("max", p.v_in.hi);
        p.v_in.points = s.count("points", p.v_in.points);
        p.settings.duration = s.number("duration", 0.0);
        p.settings.dt = s.number("dt", 0.0);
        p.settings.burn_in = s.number("burn_in", p.settings.burn_in);
      }
      if (p.v_in.lo < 0.0 || p.v_in.hi > p.circuit.fet.vdd || !(p.v_in.hi > p.v_in.lo) ||
          p.v_in.points < 3) {
        throw ConfigError("sweep: need 0 <= min < max <= V_DD and at least three points");
      }
      p.settings.seed = spec.seed;
      p.settings.threads = spec.threads;
      return p;
    }
    case ExperimentKind::timescales: {
      ObjectReader r(j, "experiment",
                     {"kind", "seed", "circuit", "v_in", "dt", "duration", "step", "ensemble"});
      Timescales p;
      p.circuit = parse_circuit_section(r.at("circuit"));
      const double tau = p.circuit.resistor.tau_fluct;
      p.v_in = r.number("v_in", p.circuit.threshold());
      p.dt = r.number("dt", tau / 50.0);
      p.duration = r.number("duration", 1000.0 * tau);
      p.ensemble = r.count("ensemble", p.ensemble);
      p.step = {0.0, p.circuit.threshold(), 5.0 * tau, 10.0 * tau};
      if (r.has("step")) {
        ObjectReader s(r.at("step"), "step", {"v_from", "v_to", "settle", "window"});
        p.step.v_from = s.number("v_from", p.step.v_from);
        p.step.v_to = s.number("v_to", p.step.v_to);
        p.step.settle = s.number("settle", p.step.settle);
        p.step.window = s.number("window", p.step.window);
      }
      if (!(p.dt > 0.0) || !(p.duration > p.dt) || p.v_in < 0.0 || p.v_in > p.circuit.fet.vdd) {
        throw ConfigError("experiment: need dt > 0, duration > dt and V_IN in [0, V_DD]");
      }
      return p;
    }
    case ExperimentKind::power_energy: {
      ObjectReader r(j, "experiment",
                     {"kind", "seed", "circuit", "v_in", "duration", "dt", "tau_c", "tau_n"});
      PowerEnergy p;
      p.circuit = parse_circuit_section(r.at("circuit"));
      const double tau = p.circuit.resistor.tau_fluct;
      p.v_in = r.has("v_in") ? r.numbers("v_in") : std::vector<double>{p.circuit.threshold()};
      p.duration = r.number("duration", 1000.0 * tau);
      p.dt = r.number("dt", tau / 50.0);
      if (r.has("tau_c")) p.tau_c = r.number("tau_c");
      p.tau_n = r.number("tau_n", 0.0);
      if (p.v_in.empty()) throw ConfigError("experiment.v_in must not be empty");
      for (double v : p.v_in) {
        if (v < 0.0 || v > p.circuit.fet.vdd) throw ConfigError("experiment.v_in outside [0, V_DD]");
      }
      if (!(p.dt > 0.0) || !(p.duration > p.dt) || p.tau_n < 0.0 || (p.tau_c && *p.tau_c < 0.0)) {
        throw ConfigError("experiment: need dt > 0, duration > dt and non-negative timescales");
      }
      return p;
    }
    case ExperimentKind::network_run: {
      ObjectReader r(j, "experiment", {"kind", "seed", "problem", "network"});
      NetworkRun p;
      p.problem = r.has("problem") ? cfg::parse_problem(r.at("problem")) : net::and_gate_problem();
      if (r.has("network")) p.network = cfg::parse_network(r.at("network"));
      p.network.seed = spec.seed;
      return p;
    }
    case ExperimentKind::fps_projection: {
      ObjectReader r(j, "experiment", {"kind", "seed", "classes", "n"});
      FpsPlan p;
      if (r.has("classes")) {
        const Json& cl = r.at("classes");
        if (!cl.is_array()) throw ConfigError("experiment.classes must be an array", "type_error");
        for (const Json& c : cl) {
          ObjectReader cr(c, "classes[]", {"name", "tau"});
          p.classes.push_back({cr.text("name"), cr.number("tau")});
        }
      } else {
        p.classes = default_device_classes();
      }
      p.sizes = r.has("n") ? r.numbers("n") : std::vector<double>{1e2, 1e3, 1e4, 1e5, 1e6, 1e7, 1e8, 1e9};
      for (const auto& c : p.classes) {
        if (!(c.tau > 0.0)) throw ConfigError("device class '" + c.name + "' needs tau > 0");
      }
      for (double n : p.sizes) {
        if (!(n >= 1.0)) throw ConfigError("network sizes must be >= 1");
      }
      return p;
    }
  }
  throw ConfigError("unhandled experiment kind");
}

Table make_table(std::string name, std::vector<std::string> columns) {
  Table t;
  t.name = std::move(name);
  t.columns = std::move(columns);
  return t;
}

std::vector<std::string> row(std::initializer_list<double> xs) {
  std::vector<std::string> out;
  for (double x : xs) out.push_back(format_number(x));
  return out;
}

ExperimentResult execute(const MagnetDynamics& p, const ExperimentSpec& spec) {
  mag::TrajectoryOptions opt;
  opt.stride = p.stride;
  opt.burn_in = p.run.burn_in * p.run.duration;
  const auto traj = mag::simulate_trajectory(p.magnet, p.drive, p.run.duration, p.run.dt, spec.seed, opt);
  ExperimentResult out;
  Table t = make_table("trajectory", {"t_s", "m_x", "m_y", "m_z"});
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& m = traj.samples[i];
    t.rows.push_back(row({static_cast<double>(i) * traj.sample_interval, m.x, m.y, m.z}));
  }
  out.tables.push_back(std::move(t));
  const int axis = mag::output_axis(p.magnet.geometry);
  out.summary["energy_barrier_kT"] = mag::energy_barrier(p.magnet);
  out.summary["output_axis"] = std::string(1, "xyz"[axis]);
  out.summary["tau_corr_s"] = mag::autocorrelation_time(traj, axis);
  out.summary["timestep_resolved"] = traj.timestep_resolved;
  out.summary["duration_sufficient"] = traj.duration_sufficient;
  return out;
}

ExperimentResult execute(const CurrentResponse& p, const ExperimentSpec&) {
  const auto currents = p.currents.values();
  const auto curve = mag::current_response(p.magnet, currents, p.drive, p.run);
  ExperimentResult out;
  Table t = make_table("current_response", {"i_s_A", "mean_m", "stderr_m"});
  for (const auto& pt : curve) t.rows.push_back(row({pt.drive, pt.mean, pt.error}));
  out.tables.push_back(std::move(t));
  out.summary["bias_current_A"] = mag::bias_current(curve);
  return out;
}

ExperimentResult execute(const PinningField& p, const ExperimentSpec&) {
  const auto fields = p.fields.values();
  const auto curve = mag::field_response(p.magnet, fields, p.direction, p.run);
  ExperimentResult out;
  Table t = make_table("pinning_field", {"h_Oe", "mean_m", "stderr_m", "quadrature_m"});
  const bsnkit::Vec3 dir = p.direction;
  for (const auto& pt : curve) {
    const auto q = mag::boltzmann_average(p.magnet, dir * pt.drive,
                                          [dir](const bsnkit::Vec3& m) { return bsnkit::dot(m, dir); });
    t.rows.push_back(row({pt.drive, pt.mean, pt.error, q.value}));
  }
  out.tables.push_back(std::move(t));
  out.summary["pinning_field_fit_Oe"] = mag::pinning_field_from_curve(curve);
  try {
    out.summary["pinning_field_closed_form_Oe"] = mag::pinning_field(p.magnet, p.magnet.geometry);
  } catch (const ConfigError&) {
    out.summary["pinning_field_closed_form_Oe"] = nullptr;
  }
  return out;
}

ExperimentResult execute(const ResistorHistogram& p, const ExperimentSpec& spec) {
  const auto h = res::stationary_histogram(p.resistor, p.current, p.duration, p.dt, spec.seed, p.bins);
  ExperimentResult out;
  Table t = make_table("histogram", {"r_low_ohm", "r_high_ohm", "mass"});
  for (std::size_t i = 0; i < h.mass.size(); ++i) {
    t.rows.push_back(row({h.edges[i], h.edges[i + 1], h.mass[i]}));
  }
  out.tables.push_back(std::move(t));
  out.summary["samples"] = h.samples;
  out.summary["bipolar"] = h.bipolar;
  out.summary["tmr_percent"] = res::tmr(p.resistor);
  return out;
}

ExperimentResult execute(const TransferSweep& p, const ExperimentSpec&) {
  const auto grid = p.v_in.values();
  const auto curve = cir::transfer_characteristic(p.circuit, grid, p.settings);
  ExperimentResult out;
  Table t = make_table("transfer_curve", {"v_in_V", "mean_m", "stderr_m", "fit_m"});
  for (std::size_t i = 0; i < curve.v_in.size(); ++i) {
    const double fit = std::tanh((curve.v_in[i] - curve.fit.v0) / curve.fit.vs);
    t.rows.push_back(row({curve.v_in[i], curve.mean_out[i], curve.error[i], fit}));
  }
  out.tables.push_back(std::move(t));
  out.summary["classification"] = std::string(cir::to_string(curve.classification));
  out.summary["fit_v0_V"] = curve.fit.v0;
  out.summary["fit_vs_V"] = curve.fit.vs;
  out.summary["fit_rmse"] = curve.fit.rmse;
  out.summary["averaging_sufficient"] = curve.averaging_sufficient;
  try {
    const auto region = cir::stochastic_region(curve);
    out.summary["delta_v_V"] = region.delta_v;
  } catch (const NumericalError&) {
    out.summary["delta_v_V"] = nullptr;
  }
  return out;
}

ExperimentResult execute(const Timescales& p, const ExperimentSpec& spec) {
  const auto corr = cir::measure_tau_C(p.circuit, p.v_in, p.dt, p.duration, spec.seed);
  const auto resp = cir::measure_tau_N(p.circuit, p.step, p.ensemble, p.dt, spec.seed, spec.threads);
  ExperimentResult out;
  Table t = make_table("response", {"t_s", "mean_m"});
  for (std::size_t i = 0; i < resp.time.size(); ++i) t.rows.push_back(row({resp.time[i], resp.mean[i]}));
  out.tables.push_back(std::move(t));
  out.summary["tau_c_s"] = corr.tau_c;
  out.summary["tau_corr_s"] = corr.tau_corr;
  out.summary["tau_n_s"] = resp.tau_n;
  out.summary["final_mean"] = resp.final_mean;
  return out;
}

ExperimentResult execute(const PowerEnergy& p, const ExperimentSpec& spec) {
  ExperimentResult out;
  Table t = make_table("power", {"v_in_V", "power_W", "resistor_branch_W", "inverter_branch_W"});
  double total = 0.0;
  for (std::size_t i = 0; i < p.v_in.size(); ++i) {
    const auto trace = cir::simulate_trace(p.circuit, p.v_in[i], p.duration, p.dt, spec.seed + i);
    const auto pw = cir::average_power(p.circuit, trace);
    total += pw.total;
    t.rows.push_back(row({p.v_in[i], pw.total, pw.resistor_branch, pw.inverter_branch}));
  }
  out.tables.push_back(std::move(t));
  const double avg = total / static_cast<double>(p.v_in.size());
  const double tau_c = p.tau_c ? *p.tau_c
                               : cir::measure_tau_C(p.circuit, p.circuit.threshold(), p.dt,
                                                    p.duration, spec.seed)
                                     .tau_c;
  const auto e = cir::energy_metrics(tau_c, p.tau_n, avg);
  out.summary["power_W"] = avg;
  out.summary["tau_c_s"] = tau_c;
  out.summary["e_c_J"] = e.e_c;
  out.summary["e_n_J"] = e.e_n;
  out.summary["reference_power_W"] = 2.0 * p.circuit.fet.vdd * p.circuit.fet.i_dsat;
  return out;
}

ExperimentResult execute(const NetworkRun& p, const ExperimentSpec&) {
  const auto hist = net::run(p.problem, p.network);
  ExperimentResult out;
  if (p.problem.n <= 20) {
    const auto exact = net::boltzmann_oracle(p.problem);
    const auto emp = hist.distribution();
    Table t = make_table("states", {"state", "count", "empirical_p", "exact_p"});
    for (std::size_t s = 0; s < exact.size(); ++s) {
      t.rows.push_back({std::to_string(s), std::to_string(hist.count(s)), format_number(emp[s]),
                        format_number(exact[s])});
    }
    out.tables.push_back(std::move(t));
    out.summary["kl_divergence"] = net::kl_divergence(hist, exact);
  } else {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> visited(hist.sparse.begin(), hist.sparse.end());
    std::sort(visited.begin(), visited.end());
    Table t = make_table("states", {"state", "count", "empirical_p"});
    for (const auto& [s, c] : visited) {
      t.rows.push_back({std::to_string(s), std::to_string(c),
                        format_number(static_cast<double>(c) / static_cast<double>(hist.total))});
    }
    out.tables.push_back(std::move(t));
  }
  out.summary["samples"] = hist.total;
  out.summary["flips"] = hist.flips;
  out.summary["simulated_time_s"] = hist.simulated_time;
  out.summary["fps"] = net::flips_per_second(hist);
  out.summary["s_ratio"] = hist.s_ratio;
  out.summary["engine"] = std::string(net::to_string(p.network.engine));
  return out;
}

ExperimentResult execute(const FpsPlan& p, const ExperimentSpec&) {
  ExperimentResult out;
  Table t = make_table("fps", {"device", "tau_s", "n", "fps"});
  for (const auto& r : fps_projection(p.classes, p.sizes)) {
    t.rows.push_back({r.device, format_number(r.tau), format_number(r.n), format_number(r.fps)});
  }
  out.tables.push_back(std::move(t));
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& body) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'", "unwritable_output");
    f << body;
    f.flush();
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'", "unwritable_output");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot write '" + path.string() + "': " + ec.message(), "unwritable_output");
}

}  // namespace

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::magnet_dynamics: return "magnet_dynamics";
    case ExperimentKind::current_response: return "current_response";
    case ExperimentKind::pinning_field: return "pinning_field";
    case ExperimentKind::resistor_histogram: return "resistor_histogram";
    case ExperimentKind::transfer_curve: return "transfer_curve";
    case ExperimentKind::timescales: return "timescales";
    case ExperimentKind::power_energy: return "power_energy";
    case ExperimentKind::network_run: return "network_run";
    case ExperimentKind::fps_projection: return "fps_projection";
  }
  return "unknown";
}

ExperimentKind kind_from_string(std::string_view name) {
  for (auto k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

std::string_view subcommand_for(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::magnet_dynamics:
    case ExperimentKind::current_response:
    case ExperimentKind::pinning_field: return "magnet";
    case ExperimentKind::resistor_histogram: return "resistor";
    case ExperimentKind::transfer_curve:
    case ExperimentKind::timescales:
    case ExperimentKind::power_energy: return "circuit";
    case ExperimentKind::network_run: return "network";
    case ExperimentKind::fps_projection: return "fps";
  }
  return "";
}

ExperimentSpec make_spec(const Json& parameters, std::string_view subcommand) {
  if (!parameters.is_object()) throw ConfigError("experiment: expected an object", "type_error");
  ExperimentSpec spec;
  spec.parameters = parameters;
  if (parameters.contains("kind")) {
    if (!parameters["kind"].is_string()) throw ConfigError("experiment.kind must be a string", "type_error");
    spec.kind = kind_from_string(parameters["kind"].get<std::string>());
  } else if (subcommand == "magnet") {
    spec.kind = ExperimentKind::magnet_dynamics;
  } else if (subcommand == "resistor") {
    spec.kind = ExperimentKind::resistor_histogram;
  } else if (subcommand == "circuit") {
    spec.kind = ExperimentKind::transfer_curve;
  } else if (subcommand == "network") {
    spec.kind = ExperimentKind::network_run;
  } else if (subcommand == "fps") {
    spec.kind = ExperimentKind::fps_projection;
  } else {
    throw ConfigError("experiment: missing field 'kind'", "missing_field");
  }
  if (!subcommand.empty() && subcommand_for(spec.kind) != subcommand) {
    throw ConfigError("experiment kind '" + std::string(to_string(spec.kind)) +
                      "' belongs to the '" + std::string(subcommand_for(spec.kind)) + "' subcommand");
  }
  if (parameters.contains("seed")) {
    const Json& s = parameters["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0)) {
      throw ConfigError("experiment.seed must be a non-negative integer", "type_error");
    }
    spec.seed = s.get<std::uint64_t>();
  }
  return spec;
}

std::string Table::csv() const {
  std::string out = fmt::format("{}\n", fmt::join(columns, ","));
  for (const auto& r : rows) out += fmt::format("{}\n", fmt::join(r, ","));
  return out;
}

std::string format_number(double x) { return fmt::format("{:.10g}", x); }

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  const Plan plan = make_plan(spec);
  return std::visit([&](const auto& p) { return execute(p, spec); }, plan);
}

std::vector<std::string> write_results(const ExperimentSpec& spec, const ExperimentResult& result,
                                       const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError("cannot create output directory '" + dir + "'", "unwritable_output");
  }
  std::vector<std::string> written;
  Json files = Json::array();
  for (const auto& t : result.tables) {
    const fs::path path = fs::path(dir) / (t.name + ".csv");
    write_atomic(path, t.csv());
    written.push_back(path.string());
    files.push_back(t.name + ".csv");
  }
  const auto now = std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
  Json manifest{{"kind", std::string(to_string(spec.kind))},
                {"spec", spec.parameters},
                {"seed", spec.seed},
                {"version", BSNSIM_VERSION},
                {"timestamp", fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now)},
                {"files", files},
                {"summary", result.summary}};
  const fs::path path = fs::path(dir) / "manifest.json";
  write_atomic(path, manifest.dump(2) + "\n");
  written.push_back(path.string());
  return written;
}

std::vector<DeviceClass> default_device_classes() {
  return {{"IMA_continuous", 1e-9},
          {"PMA_tunable", 5e-9},
          {"telegraphic", mag::arrhenius_time(5.0)},
          {"CMOS_baseline", 1e-8}};
}

std::vector<FpsRow> fps_projection(const std::vector<DeviceClass>& classes,
                                   const std::vector<double>& sizes) {
  std::vector<FpsRow> rows;
  for (const auto& c : classes) {
    for (double n : sizes) rows.push_back({c.name, c.tau, n, net::flips_per_second(n, c.tau)});
  }
  return rows;
}

bool ValidationReport::ok() const {
  for (const auto& i : issues) {
    if (i.fatal) return false;
  }
  return true;
}

Json ValidationReport::to_json() const {
  Json list = Json::array();
  for (const auto& i : issues) {
    list.push_back({{"code", i.code}, {"message", i.message}, {"severity", i.fatal ? "error" : "warning"}});
  }
  return {{"ok", ok()},
          {"kind", kind ? Json(std::string(bsnsim::to_string(*kind))) : Json(nullptr)},
          {"issues", list}};
}

ValidationReport validate_spec(const Json& parameters) {
  ValidationReport rep;
  try {
    ExperimentSpec spec = make_spec(parameters, "");
    rep.kind = spec.kind;
    const Plan plan = make_plan(spec);
    auto warn = [&](std::string code, std::string msg) {
      rep.issues.push_back({std::move(code), std::move(msg), false});
    };
    auto check_circuit = [&](const cir::BsnCircuit& c) {
      if (c.resistor.tunable()) {
        const auto d = cir::check_tunable_drive(c.fet, c.resistor);
        if (!d.pass) warn("drive_insufficient", d.message);
        if (!d.i50_matched) warn("i50_mismatch", "I50 is more than 20% away from I_Dsat");
      }
    };
    std::visit(
        [&](const auto& p) {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, MagnetDynamics> || std::is_same_v<P, CurrentResponse>) {
            const auto ts = mag::check_timestep(p.magnet, p.drive, p.run.dt);
            if (!ts.stable) warn("timestep_unstable", "dt exceeds the stable precession step");
            else if (!ts.resolved) warn("timestep_unresolved", "dt resolves less than 20 steps per precession period");
            if (p.run.duration < 1000.0 * mag::estimated_correlation_time(p.magnet)) {
              warn("duration_short", "duration is below 1000 estimated correlation times");
            }
          } else if constexpr (std::is_same_v<P, TransferSweep> || std::is_same_v<P, Timescales> ||
                               std::is_same_v<P, PowerEnergy>) {
            check_circuit(p.circuit);
          } else if constexpr (std::is_same_v<P, NetworkRun>) {
            if (p.network.engine == net::Engine::autonomous && p.network.s_ratio() >= 1.0) {
              warn("s_ratio", "tau_syn / tau_neu >= 1 degrades sampling fidelity");
            }
            if (p.network.neuron) check_circuit(p.network.neuron->circuit);
          }
        },
        plan);
  } catch (const ConfigError& e) {
    rep.issues.push_back({e.code(), e.what(), true});
  }
  return rep;
}

ValidationReport validate_config(const std::string& path) {
  try {
    return validate_spec(cfg::load_file(path));
  } catch (const ConfigError& e) {
    ValidationReport rep;
    rep.issues.push_back({e.code(), e.what(), true});
    return rep;
  }
}

}  // namespace bsnsim
