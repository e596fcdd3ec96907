#include <vector>

#include <benchmark/benchmark.h>

#include "bsnkit/circuit.hpp"
#include "bsnkit/magnetics.hpp"
#include "bsnkit/network.hpp"
#include "bsnkit/resistors.hpp"
#include "bsnkit/rng.hpp"

using namespace bsnkit;

static void BM_SllgStep(benchmark::State& state) {
  const auto g = static_cast<magnetics::Geometry>(state.range(0));
  const auto magnet = magnetics::make_magnet(g, 1000.0, 6.3e-19, 0.0);
  magnetics::SllgIntegrator sllg(magnet, {}, 1e-12, Rng(1), {0, 0, 1});
  for (auto _ : state) {
    sllg.step();
    benchmark::DoNotOptimize(sllg.state());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SllgStep)
    ->Arg(static_cast<int>(magnetics::Geometry::ima_circular))
    ->Arg(static_cast<int>(magnetics::Geometry::isotropic));

static void BM_SolveNode(benchmark::State& state) {
  const auto fet = circuit::default_fet();
  std::vector<double> inputs;
  for (int i = 0; i <= 40; ++i) inputs.push_back(0.02 * i);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(circuit::solve_node(fet, 20e3, inputs[k]));
    k = (k + 1) % inputs.size();
  }
}
BENCHMARK(BM_SolveNode);

static void BM_ResistorStep(benchmark::State& state) {
  const auto kind = static_cast<resistors::ResistorKind>(state.range(0));
  resistors::StochasticResistor r(circuit::default_circuit(kind).resistor, Rng(2));
  for (auto _ : state) benchmark::DoNotOptimize(r.step(15e-6, 2e-11));
}
BENCHMARK(BM_ResistorStep)
    ->Arg(static_cast<int>(resistors::ResistorKind::ntc))
    ->Arg(static_cast<int>(resistors::ResistorKind::ntb))
    ->Arg(static_cast<int>(resistors::ResistorKind::tc))
    ->Arg(static_cast<int>(resistors::ResistorKind::tb));

static void BM_CircuitStep(benchmark::State& state) {
  const auto c = circuit::default_circuit(resistors::ResistorKind::ntc);
  circuit::BsnSimulator sim(c, Rng(3), c.threshold());
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(2e-11));
}
BENCHMARK(BM_CircuitStep);

static void BM_ClockedSweeps(benchmark::State& state) {
  const auto p = network::and_gate_problem();
  network::NetworkConfig c;
  c.sweeps = static_cast<std::size_t>(state.range(0));
  c.burn_in = 0;
  for (auto _ : state) benchmark::DoNotOptimize(network::run_clocked(p, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClockedSweeps)->Arg(100000);

static void BM_AutonomousSamples(benchmark::State& state) {
  const auto p = network::and_gate_problem();
  network::NetworkConfig c;
  c.engine = network::Engine::autonomous;
  c.samples = static_cast<std::size_t>(state.range(0));
  c.burn_in = 0;
  for (auto _ : state) benchmark::DoNotOptimize(network::run_autonomous(p, c));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AutonomousSamples)->Arg(100000);
BENCHMARK_MAIN();
