#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <bsnkit/errors.hpp>

#include "bsnsim/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Options {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "results";
  unsigned threads = 1;
};

int run(const std::string& subcommand, const Options& opt) {
  using bsnsim::Json;
  const Json params = opt.config.empty() ? Json::object() : bsnkit::config::load_file(opt.config);
  bsnsim::ExperimentSpec spec = bsnsim::make_spec(params, subcommand);
  if (opt.seed_given) spec.seed = opt.seed;
  spec.threads = opt.threads;
  const auto result = bsnsim::run_experiment(spec);
  const auto files = bsnsim::write_results(spec, result, opt.out);
  fmt::print("{} seed={}\n", bsnsim::to_string(spec.kind), spec.seed);
  for (const auto& [key, value] : result.summary.items()) fmt::print("  {} = {}\n", key, value.dump());
  for (const auto& f : files) fmt::print("wrote {}\n", f);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Binary stochastic neuron simulator"};
  app.require_subcommand(1);
  Options opt;

  const auto add_run_options = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "experiment JSON file")->check(CLI::ExistingFile);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { opt.seed = s, opt.seed_given = true; },
        "PRNG seed (overrides the file)");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--threads", opt.threads, "worker threads")->check(CLI::PositiveNumber);
  };

  std::vector<std::pair<std::string, std::string>> commands = {
      {"magnet", "macrospin dynamics, current response, pinning field"},
      {"resistor", "stationary resistance histogram"},
      {"circuit", "transfer curve, timescales, power and energy"},
      {"network", "p-bit network sampling"},
      {"fps", "flips-per-second projection"}};
  for (const auto& [name, help] : commands) add_run_options(app.add_subcommand(name, help));

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check an experiment file");
  validate->add_option("--config,config", validate_path, "experiment JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (validate->parsed()) {
      const auto report = bsnsim::validate_config(validate_path);
      std::cout << report.to_json().dump(2) << "\n";
      return report.ok() ? 0 : kExitConfig;
    }
    for (const auto& [name, help] : commands) {
      if (app.got_subcommand(name)) return run(name, opt);
    }
  } catch (const bsnkit::ConfigError& e) {
    fmt::print(stderr, "config error [{}]: {}\n", e.code(), e.what());
    return kExitConfig;
  } catch (const bsnkit::NumericalError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
