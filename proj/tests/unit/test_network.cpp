#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "bsnkit/errors.hpp"
#include "bsnkit/network.hpp"

using namespace bsnkit;
using namespace bsnkit::network;

namespace {

IsingProblem pair_problem(double j) {
  IsingProblem p;
  p.n = 2;
  p.j = {0, j, j, 0};
  p.h = {0, 0};
  return p;
}

IsingProblem random_problem(std::size_t n, Rng& rng) {
  IsingProblem p;
  p.n = n;
  p.j.assign(n * n, 0.0);
  p.h.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    p.h[a] = 2.0 * rng.uniform_signed();
    for (std::size_t b = a + 1; b < n; ++b) {
      p.j[a * n + b] = p.j[b * n + a] = 2.0 * rng.uniform_signed();
    }
  }
  p.i0 = 0.5 + 1.5 * rng.uniform();
  return p;
}

bool is_truth_row(std::uint64_t state) {
  const auto m = spins_from_state(state, 3);
  return (m[2] == 1) == (m[0] == 1 && m[1] == 1);
}

}  // namespace

TEST(Problem, EnergyAndValidation) {
  const auto p = pair_problem(1.0);
  const std::vector<int> up{1, 1};
  const std::vector<int> mixed{1, -1};
  EXPECT_DOUBLE_EQ(p.energy(up), -1.0);
  EXPECT_DOUBLE_EQ(p.energy(mixed), 1.0);
  EXPECT_DOUBLE_EQ(p.energy(state_from_spins(up)), -1.0);
  auto bad = p;
  bad.j[1] = 2.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = p;
  bad.j[0] = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Problem, StateEncodingRoundTrip) {
  for (std::uint64_t s = 0; s < 16; ++s) EXPECT_EQ(state_from_spins(spins_from_state(s, 4)), s);
  EXPECT_EQ(spins_from_state(1, 2), (std::vector<int>{1, -1}));
}

TEST(Oracle, SingleFreeSpin) {
  IsingProblem p;
  p.n = 1;
  p.j = {0};
  p.h = {0};
  const auto d = boltzmann_oracle(p);
  EXPECT_DOUBLE_EQ(d[0], 0.5);
  EXPECT_DOUBLE_EQ(d[1], 0.5);
}

// Aligned states weigh e, anti-aligned e^-1.
TEST(Oracle, CoupledPair) {
  const auto d = boltzmann_oracle(pair_problem(1.0));
  const double z = 2.0 * std::exp(1.0) + 2.0 * std::exp(-1.0);
  EXPECT_NEAR(d[0], std::exp(1.0) / z, 1e-12);
  EXPECT_NEAR(d[3], std::exp(1.0) / z, 1e-12);
  EXPECT_NEAR(d[1], std::exp(-1.0) / z, 1e-12);
  EXPECT_NEAR(d[0], 0.440, 5e-4);
  EXPECT_NEAR(d[1], 0.060, 5e-4);
}

TEST(Oracle, AndGateTruthTableOnTop) {
  const auto d = boltzmann_oracle(and_gate_problem());
  std::vector<std::uint64_t> order(8);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] > d[b]; });
  for (int k = 0; k < 4; ++k) EXPECT_TRUE(is_truth_row(order[k])) << order[k];
  for (int k = 4; k < 8; ++k) EXPECT_FALSE(is_truth_row(order[k])) << order[k];
}

TEST(Oracle, AnnealingConcentratesGroundStates) {
  double prev = 0.0;
  for (double i0 : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto d = boltzmann_oracle(and_gate_problem(i0));
    double ground = 0.0;
    for (std::uint64_t s = 0; s < 8; ++s) {
      if (is_truth_row(s)) ground += d[s];
    }
    EXPECT_GT(ground, prev);
    prev = ground;
  }
}

TEST(Oracle, GaugeSymmetry) {
  Rng rng(3);
  auto p = random_problem(4, rng);
  auto flipped = p;
  for (auto& h : flipped.h) h = -h;
  const auto a = boltzmann_oracle(p);
  const auto b = boltzmann_oracle(flipped);
  for (std::uint64_t s = 0; s < 16; ++s) EXPECT_NEAR(a[s], b[s ^ 15u], 1e-12);
}

TEST(Oracle, RejectsLargeProblems) {
  IsingProblem p;
  p.n = 21;
  p.j.assign(21 * 21, 0.0);
  p.h.assign(21, 0.0);
  EXPECT_THROW(boltzmann_oracle(p), ConfigError);
}

TEST(Neuron, SampleStatistics) {
  Rng rng(5);
  const int n = 100000;
  double s = 0.0;
  double zero = 0.0;
  for (int i = 0; i < n; ++i) {
    s += bsn_sample(1.0, rng);
    zero += bsn_sample(0.0, rng) == 1;
  }
  const double sigma = std::sqrt((1.0 - std::tanh(1.0) * std::tanh(1.0)) / n);
  EXPECT_NEAR(s / n, std::tanh(1.0), 3.0 * sigma);
  EXPECT_NEAR(zero / n, 0.5, 3.0 * 0.5 / std::sqrt(n));
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(bsn_sample(50.0, rng), 1);
}

TEST(Synapse, AndGateAndLinearity) {
  const auto p = and_gate_problem(1.0);
  const std::vector<int> m{1, 1, -1};
  EXPECT_GT(synapse(p, m, 2), 0.0);
  const auto p2 = and_gate_problem(2.0);
  EXPECT_DOUBLE_EQ(synapse(p2, m, 2), 2.0 * synapse(p, m, 2));
  IsingProblem zero;
  zero.n = 3;
  zero.j.assign(9, 0.0);
  zero.h.assign(3, 0.0);
  EXPECT_DOUBLE_EQ(synapse(zero, m, 0), 0.0);
}

TEST(Kl, Basics) {
  const std::vector<double> exact{0.1, 0.2, 0.3, 0.4};
  std::vector<std::uint64_t> counts;
  for (double p : exact) counts.push_back(static_cast<std::uint64_t>(p * 1e9));
  EXPECT_LT(kl_divergence(counts, exact), 1e-8);
  const std::vector<double> peaked{1.0 - 3e-12, 1e-12, 1e-12, 1e-12};
  const std::vector<std::uint64_t> elsewhere{0, 1000, 0, 0};
  const double kl = kl_divergence(elsewhere, peaked);
  EXPECT_GT(kl, 10.0);
  EXPECT_TRUE(std::isfinite(kl));
}

TEST(Clocked, AndGateMatchesOracle) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.sweeps = 200000;
  c.seed = 7;
  const auto h = run_clocked(p, c);
  EXPECT_EQ(h.total, c.sweeps);
  EXPECT_LT(kl_divergence(h, boltzmann_oracle(p)), 0.01);
}

TEST(Clocked, RoundRobinMatchesOracle) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.sweeps = 200000;
  c.order = UpdateOrder::round_robin;
  c.seed = 8;
  EXPECT_LT(kl_divergence(run_clocked(p, c), boltzmann_oracle(p)), 0.01);
}

TEST(Clocked, DetailedBalanceOnRandomProblems) {
  Rng rng(11);
  for (int trial = 0; trial < 4; ++trial) {
    const auto p = random_problem(2 + trial % 3, rng);
    NetworkConfig c;
    c.sweeps = 1000000;
    c.seed = 100 + trial;
    EXPECT_LT(kl_divergence(run_clocked(p, c), boltzmann_oracle(p)), 0.01) << "trial " << trial;
  }
}

TEST(Clocked, FlipAccounting) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.sweeps = 1000;
  c.burn_in = 0;
  c.clock_period = 2e-9;
  const auto h = run_clocked(p, c);
  EXPECT_EQ(h.flips, 3u * 1000u);
  EXPECT_NEAR(h.simulated_time, 3000 * 2e-9, 1e-15);
  EXPECT_NEAR(flips_per_second(h), 1.0 / c.clock_period, 1e-3);
}

TEST(Autonomous, SmallDelayMatchesOracle) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.engine = Engine::autonomous;
  c.tau_syn = 0.01 * c.tau_neu;
  c.samples = 200000;
  c.seed = 9;
  const auto h = run_autonomous(p, c);
  EXPECT_NEAR(h.s_ratio, 0.01, 1e-12);
  EXPECT_LT(kl_divergence(h, boltzmann_oracle(p)), 0.01);
}

TEST(Autonomous, SingleSpinIsFair) {
  IsingProblem p;
  p.n = 1;
  p.j = {0};
  p.h = {0};
  for (double s : {0.01, 2.0}) {
    NetworkConfig c;
    c.engine = Engine::autonomous;
    c.tau_syn = s * c.tau_neu;
    c.samples = 50000;
    const auto d = run_autonomous(p, c).distribution();
    EXPECT_NEAR(d[1], 0.5, 0.02) << "s=" << s;
  }
}

TEST(Autonomous, LargeDelayDegradesFidelity) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.engine = Engine::autonomous;
  c.samples = 200000;
  c.seed = 12;
  c.tau_syn = 0.01 * c.tau_neu;
  const double fast = kl_divergence(run_autonomous(p, c), boltzmann_oracle(p));
  c.tau_syn = 2.0 * c.tau_neu;
  const double slow = kl_divergence(run_autonomous(p, c), boltzmann_oracle(p));
  EXPECT_GT(slow, 5.0 * fast);
}

TEST(Autonomous, FlipRateIsNOverTau) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.engine = Engine::autonomous;
  c.samples = 200000;
  c.seed = 13;
  const auto h = run_autonomous(p, c);
  EXPECT_NEAR(flips_per_second(h), 3.0 / c.tau_neu, 0.01 * 3.0 / c.tau_neu);
}

TEST(Autonomous, Reproducible) {
  const auto p = and_gate_problem();
  NetworkConfig c;
  c.engine = Engine::autonomous;
  c.samples = 5000;
  c.seed = 14;
  EXPECT_EQ(run_autonomous(p, c).counts, run_autonomous(p, c).counts);
}

TEST(Fps, ClosedForm) {
  EXPECT_DOUBLE_EQ(flips_per_second(1e4, 10e-9), 1e12);
  EXPECT_DOUBLE_EQ(flips_per_second(1e4, 1e-9), 1e13);
  EXPECT_DOUBLE_EQ(flips_per_second(1.0, 2e-9), 0.5e9);
  EXPECT_THROW(flips_per_second(1.0, 0.0), ConfigError);
}

TEST(Config, NamesAndValidation) {
  EXPECT_EQ(engine_from_string("autonomous"), Engine::autonomous);
  EXPECT_EQ(update_order_from_string("round_robin"), UpdateOrder::round_robin);
  EXPECT_THROW(engine_from_string("quantum"), ConfigError);
  NetworkConfig c;
  c.tau_neu = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
}
