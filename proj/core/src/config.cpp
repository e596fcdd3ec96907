#include "bsnkit/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

#include "bsnkit/errors.hpp"

namespace bsnkit::config {

namespace {

template <typename T>
T checked(const std::string& where, T value) {
  try {
    value.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what(), e.code());
  }
  return value;
}

}  // namespace

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read '" + path + "'", "unreadable_file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what(), "parse_error");
  }
}

magnetics::MagnetParams parse_magnet(const Json& j) {
  ObjectReader r(j, "magnet",
           {"geometry", "ms", "volume", "barrier", "h_kp", "h_ki", "damping", "temperature",
            "spin_polarization"});
  const auto geometry = magnetics::geometry_from_string(r.text("geometry"));
  magnetics::MagnetParams p;
  const double ms = r.number("ms", p.saturation_magnetization);
  const double volume = r.number("volume", p.volume);
  const double damping = r.number("damping", p.damping);
  const double temperature = r.number("temperature", p.temperature);
  if (r.has("barrier")) {
    if (r.has("h_kp") || r.has("h_ki")) {
      throw ConfigError("magnet: give either barrier or h_kp/h_ki, not both", "invalid_value");
    }
    p = magnetics::make_magnet(geometry, ms, volume, r.number("barrier"), damping, temperature);
  } else {
    p.saturation_magnetization = ms;
    p.volume = volume;
    p.damping = damping;
    p.temperature = temperature;
    p.geometry = geometry;
    p.perpendicular_anisotropy = r.number("h_kp", 0.0);
    p.inplane_anisotropy = r.number("h_ki", 0.0);
  }
  p.spin_polarization = r.number("spin_polarization", 1.0);
  return checked("magnet", p);
}

magnetics::DriveConditions parse_drive(const Json& j) {
  ObjectReader r(j, "drive", {"h_ext", "spin_current", "polarization"});
  magnetics::DriveConditions d;
  d.external_field = r.vector("h_ext", {});
  d.spin_current = r.number("spin_current", 0.0);
  d.polarization = r.vector("polarization", d.polarization);
  return checked("drive", d);
}

magnetics::RunSettings parse_run(const Json& j) {
  ObjectReader r(j, "run", {"duration", "dt", "burn_in", "replicas"});
  magnetics::RunSettings s;
  s.duration = r.number("duration", s.duration);
  s.dt = r.number("dt", s.dt);
  s.burn_in = r.number("burn_in", s.burn_in);
  s.replicas = r.count("replicas", s.replicas);
  if (!(s.duration > 0.0) || !(s.dt > 0.0) || s.burn_in < 0.0 || s.replicas == 0) {
    throw ConfigError("run: duration, dt and replicas must be positive", "invalid_value");
  }
  return s;
}

resistors::ResistorParams parse_resistor(const Json& j) {
  ObjectReader r(j, "resistor",
           {"kind", "r_p", "r_ap", "i50", "i0", "tau_fluct", "backend", "magnet", "fixed_layer",
            "mtj_dt", "orientation"});
  resistors::ResistorParams p;
  p.kind = resistors::kind_from_string(r.text("kind"));
  p.r_p = r.number("r_p");
  p.r_ap = r.number("r_ap");
  if (r.has("i50")) p.i50 = r.number("i50");
  if (r.has("i0")) p.i0 = r.number("i0");
  p.tau_fluct = r.number("tau_fluct", p.tau_fluct);
  p.backend = resistors::backend_from_string(r.text("backend", "behavioral"));
  if (p.backend == resistors::Backend::mtj) {
    p.mtj.magnet = parse_magnet(r.at("magnet"));
    p.mtj.fixed_layer =
        r.vector("fixed_layer", magnetics::output_axis(p.mtj.magnet.geometry) == 2 ? Vec3{0, 0, 1}
                                                                                  : Vec3{1, 0, 0});
    p.mtj.dt = r.number("mtj_dt", p.mtj.dt);
  } else if (r.has("magnet")) {
    throw ConfigError("resistor: magnet given for a behavioral backend", "invalid_value");
  }
  const double orientation = r.number("orientation", 1.0);
  if (orientation != 1.0 && orientation != -1.0) {
    throw ConfigError("resistor: orientation must be +1 or -1", "invalid_value");
  }
  p.orientation = static_cast<int>(orientation);
  return checked("resistor", p);
}

circuit::FetModel parse_fet(const Json& j) {
  ObjectReader r(j, "fet", {"vdd", "vt", "slope_factor", "thermal_voltage", "clm", "i_dsat", "i_plus_max"});
  circuit::FetModel f;
  f.vdd = r.number("vdd", f.vdd);
  f.vt = r.number("vt", f.vt);
  f.slope_factor = r.number("slope_factor", f.slope_factor);
  f.thermal_voltage = r.number("thermal_voltage", f.thermal_voltage);
  f.clm = r.number("clm", f.clm);
  f.i_dsat = r.number("i_dsat", f.i_dsat);
  f.i_plus_max = r.number("i_plus_max", f.i_plus_max);
  try {
    f.calibrate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("fet: ") + e.what(), e.code());
  }
  return checked("fet", f);
}

circuit::BsnCircuit parse_circuit(const Json& j) {
  ObjectReader r(j, "circuit", {"resistor", "fet", "c_load"});
  circuit::BsnCircuit c;
  c.resistor = parse_resistor(r.at("resistor"));
  if (r.has("fet")) c.fet = parse_fet(r.at("fet"));
  c.c_load = r.number("c_load", c.c_load);
  return checked("circuit", c);
}

network::IsingProblem parse_problem(const Json& j) {
  ObjectReader r(j, "problem", {"n", "j", "h", "i0"});
  network::IsingProblem p;
  p.n = r.count("n", 0);
  if (p.n == 0 || p.n > 64) throw ConfigError("problem.n must lie in [1, 64]", "invalid_value");
  p.j.assign(p.n * p.n, 0.0);
  p.h.assign(p.n, 0.0);
  p.i0 = r.number("i0", 1.0);
  const auto bad = [](const std::string& what) { return ConfigError("problem.j: " + what, "type_error"); };
  if (r.has("j")) {
    const Json& jj = r.at("j");
    if (jj.is_object()) {
      ObjectReader sparse(jj, "problem.j", {"triplets"});
      for (const Json& t : sparse.at("triplets")) {
        if (!t.is_array() || t.size() != 3 || !t[0].is_number_unsigned() ||
            !t[1].is_number_unsigned() || !t[2].is_number()) {
          throw bad("triplets must be [i, j, w] with integer indices");
        }
        const auto a = t[0].get<std::size_t>();
        const auto b = t[1].get<std::size_t>();
        if (a >= p.n || b >= p.n) throw ConfigError("problem.j: index out of range", "invalid_value");
        p.j[a * p.n + b] = t[2].get<double>();
        p.j[b * p.n + a] = t[2].get<double>();
      }
    } else if (jj.is_array() && jj.size() == p.n) {
      for (std::size_t a = 0; a < p.n; ++a) {
        if (!jj[a].is_array() || jj[a].size() != p.n) throw bad("dense J must be n x n");
        for (std::size_t b = 0; b < p.n; ++b) {
          if (!jj[a][b].is_number()) throw bad("entries must be numbers");
          p.j[a * p.n + b] = jj[a][b].get<double>();
        }
      }
    } else {
      throw bad("expected an n x n array or {\"triplets\": [...]}");
    }
  }
  if (r.has("h")) {
    const Json& hh = r.at("h");
    if (!hh.is_array() || hh.size() != p.n) throw ConfigError("problem.h must have n numbers", "type_error");
    for (std::size_t a = 0; a < p.n; ++a) {
      if (!hh[a].is_number()) throw ConfigError("problem.h must have n numbers", "type_error");
      p.h[a] = hh[a].get<double>();
    }
  }
  return checked("problem", p);
}

network::NetworkConfig parse_network(const Json& j) {
  ObjectReader r(j, "network",
           {"engine", "tau_neu", "tau_syn", "clock_period", "sweeps", "samples", "burn_in",
            "order", "neuron"});
  network::NetworkConfig c;
  c.engine = network::engine_from_string(r.text("engine", "clocked"));
  c.tau_neu = r.number("tau_neu", c.tau_neu);
  c.tau_syn = r.number("tau_syn", c.tau_syn);
  c.clock_period = r.number("clock_period", c.clock_period);
  c.sweeps = r.count("sweeps", c.sweeps);
  c.samples = r.count("samples", c.samples);
  c.burn_in = r.count("burn_in", c.burn_in);
  c.order = network::update_order_from_string(r.text("order", "random_permutation"));
  if (r.has("neuron")) {
    ObjectReader nr(r.at("neuron"), "network.neuron", {"circuit", "v0", "vs", "hold", "dt"});
    network::CircuitNeuron neuron;
    neuron.circuit = parse_circuit(nr.at("circuit"));
    neuron.v0 = nr.number("v0", neuron.v0);
    neuron.vs = nr.number("vs", neuron.vs);
    neuron.hold = nr.number("hold", neuron.hold);
    neuron.dt = nr.number("dt", neuron.dt);
    c.neuron = neuron;
  }
  return checked("network", c);
}

Json to_json(const magnetics::MagnetParams& p) {
  return {{"geometry", std::string(magnetics::to_string(p.geometry))},
          {"ms", p.saturation_magnetization},
          {"volume", p.volume},
          {"h_kp", p.perpendicular_anisotropy},
          {"h_ki", p.inplane_anisotropy},
          {"damping", p.damping},
          {"temperature", p.temperature},
          {"spin_polarization", p.spin_polarization}};
}

Json to_json(const resistors::ResistorParams& p) {
  Json j{{"kind", std::string(resistors::to_string(p.kind))},
         {"r_p", p.r_p},
         {"r_ap", p.r_ap},
         {"tau_fluct", p.tau_fluct},
         {"backend", std::string(resistors::to_string(p.backend))},
         {"orientation", p.orientation}};
  if (p.i50) j["i50"] = *p.i50;
  if (p.i0) j["i0"] = *p.i0;
  if (p.backend == resistors::Backend::mtj) {
    j["magnet"] = to_json(p.mtj.magnet);
    j["fixed_layer"] = {p.mtj.fixed_layer.x, p.mtj.fixed_layer.y, p.mtj.fixed_layer.z};
    j["mtj_dt"] = p.mtj.dt;
  }
  return j;
}

Json to_json(const circuit::FetModel& f) {
  return {{"vdd", f.vdd},       {"vt", f.vt},
          {"slope_factor", f.slope_factor}, {"thermal_voltage", f.thermal_voltage},
          {"clm", f.clm},       {"i_dsat", f.i_dsat},
          {"i_plus_max", f.i_plus_max}};
}

Json to_json(const circuit::BsnCircuit& c) {
  return {{"resistor", to_json(c.resistor)}, {"fet", to_json(c.fet)}, {"c_load", c.c_load}};
}

Json to_json(const network::IsingProblem& p) {
  Json rows = Json::array();
  for (std::size_t a = 0; a < p.n; ++a) {
    Json row = Json::array();
    for (std::size_t b = 0; b < p.n; ++b) row.push_back(p.coupling(a, b));
    rows.push_back(row);
  }
  return {{"n", p.n}, {"j", rows}, {"h", p.h}, {"i0", p.i0}};
}

}  // namespace bsnkit::config
