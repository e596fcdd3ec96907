#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "bsnkit/circuit.hpp"
#include "bsnkit/errors.hpp"
#include "bsnkit/magnetics.hpp"
#include "bsnkit/network.hpp"
#include "bsnkit/resistors.hpp"

// JSON parameter sets. Readers reject unknown keys and wrong types with a
// ConfigError carrying one of the codes: unreadable_file, parse_error,
// unknown_key, missing_field, type_error, invalid_value.
namespace bsnkit::config {

using Json = nlohmann::json;

// Checked field access on one JSON object.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where, std::initializer_list<std::string_view> keys)
      : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object", "type_error");
    for (const auto& [key, value] : j.items()) {
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known) throw ConfigError(where_ + ": unknown key '" + key + "'", "unknown_key");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const Json& at(const char* key) const {
    if (!has(key)) throw ConfigError(where_ + ": missing field '" + key + "'", "missing_field");
    return j_.at(key);
  }

  double number(const char* key) const {
    const Json& v = at(key);
    if (!v.is_number()) throw ConfigError(path(key) + " must be a number", "type_error");
    return v.get<double>();
  }
  double number(const char* key, double fallback) const { return has(key) ? number(key) : fallback; }

  std::uint64_t count(const char* key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError(path(key) + " must be a non-negative integer", "type_error");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const char* key) const {
    const Json& v = at(key);
    if (!v.is_string()) throw ConfigError(path(key) + " must be a string", "type_error");
    return v.get<std::string>();
  }
  std::string text(const char* key, std::string fallback) const {
    return has(key) ? text(key) : fallback;
  }

  Vec3 vector(const char* key, Vec3 fallback) const {
    if (!has(key)) return fallback;
    const Json& v = at(key);
    if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() ||
        !v[2].is_number()) {
      throw ConfigError(path(key) + " must be an array of three numbers", "type_error");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

  std::vector<double> numbers(const char* key) const {
    const Json& v = at(key);
    if (!v.is_array()) throw ConfigError(path(key) + " must be an array of numbers", "type_error");
    std::vector<double> out;
    for (const Json& x : v) {
      if (!x.is_number()) throw ConfigError(path(key) + " must be an array of numbers", "type_error");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

 private:
  const Json& j_;
  std::string where_;
};

Json load_file(const std::string& path);

magnetics::MagnetParams parse_magnet(const Json& j);
magnetics::DriveConditions parse_drive(const Json& j);
magnetics::RunSettings parse_run(const Json& j);
resistors::ResistorParams parse_resistor(const Json& j);
circuit::FetModel parse_fet(const Json& j);
circuit::BsnCircuit parse_circuit(const Json& j);
network::IsingProblem parse_problem(const Json& j);
network::NetworkConfig parse_network(const Json& j);

Json to_json(const magnetics::MagnetParams& p);
Json to_json(const resistors::ResistorParams& p);
Json to_json(const circuit::FetModel& f);
Json to_json(const circuit::BsnCircuit& c);
Json to_json(const network::IsingProblem& p);

}  // namespace bsnkit::config
