#include "bsnkit/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <string>
#include <tuple>

#include "bsnkit/errors.hpp"

namespace bsnkit::network {

void IsingProblem::validate() const {
  if (n == 0 || n > 64) throw ConfigError("network size must lie in [1, 64]");
  if (j.size() != n * n) throw ConfigError("J must be n x n");
  if (h.size() != n) throw ConfigError("h must have n entries");
  if (!(i0 > 0.0)) throw ConfigError("annealing gain I0 must be positive");
  for (std::size_t a = 0; a < n; ++a) {
    if (j[a * n + a] != 0.0) throw ConfigError("J must have a zero diagonal");
    for (std::size_t b = a + 1; b < n; ++b) {
      if (j[a * n + b] != j[b * n + a]) throw ConfigError("J must be symmetric");
    }
  }
}

double IsingProblem::energy(std::span<const int> m) const {
  double e = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    e += h[a] * m[a];
    for (std::size_t b = a + 1; b < n; ++b) e += j[a * n + b] * m[a] * m[b];
  }
  return -i0 * e;
}

double IsingProblem::energy(std::uint64_t state) const {
  const auto m = spins_from_state(state, n);
  return energy(m);
}

std::vector<int> spins_from_state(std::uint64_t state, std::size_t n) {
  std::vector<int> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = (state >> i) & 1u ? 1 : -1;
  return m;
}

std::uint64_t state_from_spins(std::span<const int> m) {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] > 0) s |= std::uint64_t{1} << i;
  }
  return s;
}

IsingProblem and_gate_problem(double i0) {
  IsingProblem p;
  p.n = 3;
  p.j = {0, -1, 2,
         -1, 0, 2,
         2, 2, 0};
  p.h = {1, 1, -2};
  p.i0 = i0;
  p.validate();

  // The four most probable states must be exactly the truth table.
  const auto probs = boltzmann_oracle(p);
  std::vector<std::uint64_t> order(probs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return probs[a] > probs[b]; });
  for (std::size_t k = 0; k < 4; ++k) {
    const auto m = spins_from_state(order[k], 3);
    const bool c = m[2] > 0;
    if (c != (m[0] > 0 && m[1] > 0)) throw NumericalError("AND-gate weights failed the oracle check");
  }
  if (!(probs[order[3]] > probs[order[4]])) {
    throw NumericalError("AND-gate ground states are not separated");
  }
  return p;
}

int bsn_sample(double input, Rng& rng) {
  return std::tanh(input) - rng.uniform_signed() > 0.0 ? 1 : -1;
}

double synapse(const IsingProblem& problem, std::span<const int> m, std::size_t i) {
  double sum = problem.h[i];
  const double* row = problem.j.data() + i * problem.n;
  for (std::size_t k = 0; k < problem.n; ++k) sum += row[k] * m[k];
  return problem.i0 * sum;
}

std::vector<double> boltzmann_oracle(const IsingProblem& problem) {
  problem.validate();
  if (problem.n > 20) throw ConfigError("exact enumeration needs n <= 20");
  const std::uint64_t states = std::uint64_t{1} << problem.n;
  std::vector<double> logw(states);
  double top = -std::numeric_limits<double>::infinity();
  for (std::uint64_t s = 0; s < states; ++s) {
    logw[s] = -problem.energy(s);
    top = std::max(top, logw[s]);
  }
  double z = 0.0;
  for (auto& w : logw) {
    w = std::exp(w - top);
    z += w;
  }
  for (auto& w : logw) w /= z;
  return logw;
}

std::string_view to_string(Engine e) { return e == Engine::clocked ? "clocked" : "autonomous"; }

Engine engine_from_string(std::string_view name) {
  if (name == "clocked") return Engine::clocked;
  if (name == "autonomous") return Engine::autonomous;
  throw ConfigError("unknown engine '" + std::string(name) + "'");
}

std::string_view to_string(UpdateOrder o) {
  return o == UpdateOrder::round_robin ? "round_robin" : "random_permutation";
}

UpdateOrder update_order_from_string(std::string_view name) {
  if (name == "round_robin") return UpdateOrder::round_robin;
  if (name == "random_permutation") return UpdateOrder::random_permutation;
  throw ConfigError("unknown update order '" + std::string(name) + "'");
}

void NetworkConfig::validate() const {
  if (!(tau_neu > 0.0)) throw ConfigError("tau_neu must be positive");
  if (!(tau_syn > 0.0)) throw ConfigError("tau_syn must be positive");
  if (!(clock_period > 0.0)) throw ConfigError("clock period must be positive");
  if (neuron) {
    neuron->circuit.validate();
    if (!(neuron->hold > 0.0) || !(neuron->dt > 0.0)) {
      throw ConfigError("circuit neuron hold time and dt must be positive");
    }
  }
}

void SampleHistogram::add(std::uint64_t state) {
  if (!counts.empty()) {
    ++counts[state];
  } else {
    ++sparse[state];
  }
  ++total;
}

std::uint64_t SampleHistogram::count(std::uint64_t state) const {
  if (!counts.empty()) return counts[state];
  const auto it = sparse.find(state);
  return it == sparse.end() ? 0 : it->second;
}

std::vector<double> SampleHistogram::distribution() const {
  if (counts.empty()) throw ConfigError("dense distribution needs n <= 20");
  std::vector<double> p(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    p[s] = total ? static_cast<double>(counts[s]) / static_cast<double>(total) : 0.0;
  }
  return p;
}

namespace {

SampleHistogram empty_histogram(const IsingProblem& problem, const NetworkConfig& config) {
  SampleHistogram hist;
  hist.n = problem.n;
  if (problem.n <= 20) hist.counts.assign(std::size_t{1} << problem.n, 0);
  hist.s_ratio = config.s_ratio();
  return hist;
}

// Produces new spin values from synapse inputs, behaviorally or through
// per-spin circuit transients.
class NeuronBank {
 public:
  NeuronBank(const NetworkConfig& config, std::size_t n, Rng& rng) : rng_(rng) {
    if (!config.neuron) return;
    neuron_ = *config.neuron;
    for (std::size_t i = 0; i < n; ++i) {
      sims_.emplace_back(neuron_->circuit, Rng(config.seed, substream(1, i)), neuron_->v0);
    }
    hold_steps_ = std::max<std::size_t>(1, static_cast<std::size_t>(
                                               std::llround(neuron_->hold / neuron_->dt)));
  }

  int update(std::size_t i, double input) {
    if (!neuron_) return bsn_sample(input, rng_);
    auto& sim = sims_[i];
    const double v = std::clamp(neuron_->v0 + neuron_->vs * input, 0.0, neuron_->circuit.fet.vdd);
    sim.set_input(v);
    for (std::size_t k = 0; k < hold_steps_; ++k) sim.step(neuron_->dt);
    return sim.output();
  }

 private:
  Rng& rng_;
  std::optional<CircuitNeuron> neuron_;
  std::vector<circuit::BsnSimulator> sims_;
  std::size_t hold_steps_ = 1;
};

}  // namespace

SampleHistogram run_clocked(const IsingProblem& problem, const NetworkConfig& config) {
  problem.validate();
  config.validate();
  const std::size_t n = problem.n;
  Rng rng(config.seed, 0);
  NeuronBank neurons(config, n, rng);
  std::vector<int> m(n);
  for (auto& s : m) s = rng.bernoulli(0.5) ? 1 : -1;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  SampleHistogram hist = empty_histogram(problem, config);
  const std::size_t sweeps = config.burn_in + config.sweeps;
  for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
    if (config.order == UpdateOrder::random_permutation) {
      for (std::size_t k = n; k > 1; --k) {
        std::swap(order[k - 1], order[rng.next_u64() % k]);
      }
    }
    for (std::size_t i : order) m[i] = neurons.update(i, synapse(problem, m, i));
    if (sweep >= config.burn_in) {
      hist.add(state_from_spins(m));
      hist.flips += n;
    }
  }
  hist.simulated_time = static_cast<double>(hist.flips) * config.clock_period;
  return hist;
}

SampleHistogram run_autonomous(const IsingProblem& problem, const NetworkConfig& config) {
  problem.validate();
  config.validate();
  const std::size_t n = problem.n;
  Rng rng(config.seed, 0);
  NeuronBank neurons(config, n, rng);
  std::vector<int> m(n);
  for (auto& s : m) s = rng.bernoulli(0.5) ? 1 : -1;

  // Per-spin change history; the front entry is the value seen at t - tau_syn.
  std::vector<std::deque<std::pair<double, int>>> history(n);
  for (std::size_t i = 0; i < n; ++i) {
    history[i].emplace_back(-std::numeric_limits<double>::infinity(), m[i]);
  }
  std::vector<int> stale(n);

  // (time, sequence number, neuron); the sequence number breaks exact ties.
  using Event = std::tuple<double, std::uint64_t, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t sequence = 0;
  for (std::size_t i = 0; i < n; ++i) queue.emplace(rng.exponential(config.tau_neu), sequence++, i);

  SampleHistogram hist = empty_histogram(problem, config);
  const double start = static_cast<double>(config.burn_in) * config.tau_neu;
  const std::size_t samples = config.samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const double sample_time = start + static_cast<double>(k + 1) * config.tau_neu;
    while (std::get<0>(queue.top()) < sample_time) {
      const auto [t, seq, i] = queue.top();
      queue.pop();
      const double seen = t - config.tau_syn;
      for (std::size_t j = 0; j < n; ++j) {
        auto& hj = history[j];
        while (hj.size() > 1 && hj[1].first <= seen) hj.pop_front();
        stale[j] = hj.front().second;
      }
      const int next = neurons.update(i, synapse(problem, stale, i));
      if (next != m[i]) {
        m[i] = next;
        history[i].emplace_back(t, next);
      }
      if (t >= start) ++hist.flips;
      queue.emplace(t + rng.exponential(config.tau_neu), sequence++, i);
      if (queue.size() > n) throw NumericalError("event queue overflow");
    }
    hist.add(state_from_spins(m));
  }
  hist.simulated_time = static_cast<double>(samples) * config.tau_neu;
  return hist;
}

SampleHistogram run(const IsingProblem& problem, const NetworkConfig& config) {
  return config.engine == Engine::clocked ? run_clocked(problem, config)
                                          : run_autonomous(problem, config);
}

double kl_divergence(std::span<const std::uint64_t> counts, std::span<const double> exact) {
  if (counts.size() != exact.size() || counts.empty()) {
    throw ConfigError("distributions must share the same support");
  }
  double total = 0.0;
  for (auto c : counts) total += static_cast<double>(c) + 1.0;
  double kl = 0.0;
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const double p = (static_cast<double>(counts[s]) + 1.0) / total;
    const double q = std::max(exact[s], std::numeric_limits<double>::min());
    kl += p * std::log(p / q);
  }
  return std::max(kl, 0.0);
}

double kl_divergence(const SampleHistogram& empirical, std::span<const double> exact) {
  if (empirical.counts.empty()) throw ConfigError("KL divergence needs a dense histogram");
  return kl_divergence(empirical.counts, exact);
}

double flips_per_second(double n, double tau) {
  if (!(tau > 0.0) || !(n >= 0.0)) throw ConfigError("flips per second needs tau > 0 and n >= 0");
  return n / tau;
}

double flips_per_second(const SampleHistogram& stats) {
  if (!(stats.simulated_time > 0.0)) throw ConfigError("no simulated time recorded");
  return static_cast<double>(stats.flips) / stats.simulated_time;
}

}  // namespace bsnkit::network
