#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bsnkit/circuit.hpp"
#include "bsnkit/rng.hpp"

// p-bit Ising networks. Spins are +-1; a state index has bit i set when
// m_i = +1.
namespace bsnkit::network {

struct IsingProblem {
  std::size_t n = 0;
  std::vector<double> j;  // n x n, row major
  std::vector<double> h;
  double i0 = 1.0;  // annealing gain (inverse temperature)

  double coupling(std::size_t a, std::size_t b) const { return j[a * n + b]; }
  void validate() const;
  // E = -I0 (sum_{i<j} J_ij m_i m_j + sum_i h_i m_i)
  double energy(std::span<const int> m) const;
  double energy(std::uint64_t state) const;
};

// Three spins (A, B, C) whose four ground states are C = A AND B. Throws
// NumericalError if the oracle check on the weights fails.
IsingProblem and_gate_problem(double i0 = 1.0);

// sign(tanh(input) - r) with r uniform on (-1, 1).
int bsn_sample(double input, Rng& rng);

// I_i = I0 (sum_j J_ij m_j + h_i).
double synapse(const IsingProblem& problem, std::span<const int> m, std::size_t i);

// Exact p(m) ~ exp(-E(m)) over all 2^n states, n <= 20.
std::vector<double> boltzmann_oracle(const IsingProblem& problem);

std::vector<int> spins_from_state(std::uint64_t state, std::size_t n);
std::uint64_t state_from_spins(std::span<const int> m);

enum class Engine { clocked, autonomous };
enum class UpdateOrder { random_permutation, round_robin };

std::string_view to_string(Engine e);
Engine engine_from_string(std::string_view name);
std::string_view to_string(UpdateOrder o);
UpdateOrder update_order_from_string(std::string_view name);

// Drives a spin through a BSN circuit transient: the input I maps to
// V_IN = v0 + vs I (clamped to the rails), is held for `hold` seconds, and the
// inverter output is read as the new spin.
struct CircuitNeuron {
  circuit::BsnCircuit circuit;
  double v0 = 0.4;
  double vs = 0.02;
  double hold = 1e-9;
  double dt = 2e-11;
};

struct NetworkConfig {
  Engine engine = Engine::clocked;
  double tau_neu = 1e-9;       // mean update interval per neuron, s
  double tau_syn = 1e-11;      // synapse delay, s
  double clock_period = 1e-9;  // s per tick, clocked engine
  std::size_t sweeps = 100000;      // clocked: samples, one per sweep
  std::size_t samples = 100000;     // autonomous: samples, one per tau_neu
  std::size_t burn_in = 100;        // sweeps (clocked) or tau_neu intervals (autonomous)
  std::uint64_t seed = 1;
  UpdateOrder order = UpdateOrder::random_permutation;
  std::optional<CircuitNeuron> neuron;  // unset: behavioral bsn_sample

  double s_ratio() const { return tau_syn / tau_neu; }
  void validate() const;
};

struct SampleHistogram {
  std::size_t n = 0;
  std::vector<std::uint64_t> counts;                  // dense, n <= 20
  std::unordered_map<std::uint64_t, std::uint64_t> sparse;  // n > 20
  std::uint64_t total = 0;
  std::uint64_t flips = 0;  // neuron update events
  double simulated_time = 0.0;
  double s_ratio = 0.0;

  void add(std::uint64_t state);
  std::uint64_t count(std::uint64_t state) const;
  std::vector<double> distribution() const;  // dense only
};

SampleHistogram run_clocked(const IsingProblem& problem, const NetworkConfig& config);
SampleHistogram run_autonomous(const IsingProblem& problem, const NetworkConfig& config);
SampleHistogram run(const IsingProblem& problem, const NetworkConfig& config);

// Sum p ln(p / q) with p the empirical distribution after adding one count to
// every state.
double kl_divergence(const SampleHistogram& empirical, std::span<const double> exact);
double kl_divergence(std::span<const std::uint64_t> counts, std::span<const double> exact);

// f = N / tau.
double flips_per_second(double n, double tau);
// Update events per simulated second.
double flips_per_second(const SampleHistogram& stats);

}  // namespace bsnkit::network
