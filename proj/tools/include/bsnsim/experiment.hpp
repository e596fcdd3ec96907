#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <bsnkit/config.hpp>

// Experiment runner behind the bsnsim command line. An experiment file is a
// JSON object with a "kind", an optional "seed" and the sections that kind
// reads. Results are CSV tables plus a JSON manifest.
namespace bsnsim {

using bsnkit::config::Json;

enum class ExperimentKind {
  magnet_dynamics,
  current_response,
  pinning_field,
  resistor_histogram,
  transfer_curve,
  timescales,
  power_energy,
  network_run,
  fps_projection,
};

std::string_view to_string(ExperimentKind k);
ExperimentKind kind_from_string(std::string_view name);
// Subcommand that runs a kind: magnet, resistor, circuit, network or fps.
std::string_view subcommand_for(ExperimentKind k);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::fps_projection;
  Json parameters = Json::object();  // the file contents
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// Reads the kind and seed. `subcommand` restricts the kinds accepted and
// supplies the default kind when the file has none.
ExperimentSpec make_spec(const Json& parameters, std::string_view subcommand);

struct Table {
  std::string name;                  // file stem
  std::vector<std::string> columns;  // header cells carry units
  std::vector<std::vector<std::string>> rows;
  std::string csv() const;
};

struct ExperimentResult {
  std::vector<Table> tables;
  Json summary = Json::object();
};

// Throws bsnkit::ConfigError for schema or physics-sanity violations and
// bsnkit::NumericalError when a measurement cannot be extracted.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Writes every table and manifest.json into `dir`, each through a temporary
// file and a rename. Returns the paths written.
std::vector<std::string> write_results(const ExperimentSpec& spec, const ExperimentResult& result,
                                       const std::string& dir);

struct DeviceClass {
  std::string name;
  double tau = 0.0;  // s
};

struct FpsRow {
  std::string device;
  double tau = 0.0;
  double n = 0.0;
  double fps = 0.0;
};

// IMA_continuous, PMA_tunable, telegraphic and CMOS_baseline with their
// default update times.
std::vector<DeviceClass> default_device_classes();
std::vector<FpsRow> fps_projection(const std::vector<DeviceClass>& classes,
                                   const std::vector<double>& sizes);

struct ValidationIssue {
  std::string code;
  std::string message;
  bool fatal = true;
};

struct ValidationReport {
  std::optional<ExperimentKind> kind;
  std::vector<ValidationIssue> issues;
  bool ok() const;
  Json to_json() const;
};

// Schema check plus physics sanity checks that do not need a simulation.
ValidationReport validate_config(const std::string& path);
ValidationReport validate_spec(const Json& parameters);

std::string format_number(double x);

}  // namespace bsnsim
