#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bsnkit/magnetics.hpp"
#include "bsnkit/rng.hpp"
#include "bsnkit/vec3.hpp"

// Fluctuating two-terminal resistors: non-tunable / tunable by the branch
// current, continuous / bipolar in their resistance distribution.
namespace bsnkit::resistors {

enum class ResistorKind { ntc, ntb, tc, tb };
enum class Backend { behavioral, mtj };

std::string_view to_string(ResistorKind k);
ResistorKind kind_from_string(std::string_view name);
std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view name);

bool is_tunable(ResistorKind k);
bool is_bipolar(ResistorKind k);

struct MtjBackend {
  magnetics::MagnetParams magnet;
  Vec3 fixed_layer{0, 0, 1};  // m . fixed_layer = +1 is the parallel state
  double dt = 1e-12;          // sLLG substep, s
};

struct ResistorParams {
  ResistorKind kind = ResistorKind::ntc;
  double r_p = 10e3;   // ohm
  double r_ap = 30e3;  // ohm
  std::optional<double> i50;  // A, tunable kinds only
  std::optional<double> i0;   // A, tunable kinds only
  double tau_fluct = 1e-9;    // s, behavioral backends
  Backend backend = Backend::behavioral;
  MtjBackend mtj;
  // +1: resistance rises from R_P toward R_AP as the current grows (the
  // orientation a BSN needs); -1 inverts it.
  int orientation = 1;

  double n() const { return r_ap / r_p; }
  bool tunable() const { return is_tunable(kind); }
  // Signed drive x = orientation (I - I50) / I0; zero for non-tunable kinds.
  double drive(double current) const;
  void validate() const;
};

// R from the projection of the free layer on the fixed layer, by linear
// interpolation of the conductance between G_P (m = +1) and G_AP (m = -1).
double resistance_from_m(double m_parallel, double r_p, double r_ap);

// (n - 1) * 100.
double tmr(const ResistorParams& params);

// Spin-polarization efficiency that gives an MTJ-backed tunable resistor the
// configured I0, from the Langevin slope 1/3 of a low-barrier free layer.
double mtj_polarization_for(const ResistorParams& params);
// Field along the fixed layer that cancels the torque at I = I50.
double mtj_bias_field_for(const ResistorParams& params);

struct ResistorState {
  double r = 0.0;
  double m = 1.0;      // +1 parallel, -1 antiparallel
  double phase = 0.0;  // continuous behavioral backends
  Vec3 magnet{0, 0, 1};
};

class StochasticResistor {
 public:
  // Starts from a draw of the zero-current stationary distribution.
  StochasticResistor(const ResistorParams& params, Rng rng);

  // Advances by dt with branch current `current`. Throws ConfigError on
  // dt <= 0 or negative current.
  double step(double current, double dt);

  double resistance() const { return state_.r; }
  double m() const { return state_.m; }
  const ResistorState& state() const { return state_; }
  const ResistorParams& params() const { return params_; }
  void set_m(double m);

 private:
  void update_resistance();
  void step_mtj(double current, double dt);

  ResistorParams params_;
  Rng rng_;
  ResistorState state_;
  std::optional<magnetics::SllgIntegrator> magnet_;
  double polarization_ = 0.0;
  double last_current_ = -1.0;
};

struct Histogram {
  std::vector<double> edges;  // ohm, bins + 1 entries spanning [R_P, R_AP]
  std::vector<double> mass;   // sums to 1
  std::size_t samples = 0;
  bool bipolar = false;  // < 10% of the mass in the central half of the range
};

// Histogram of R at a constant current. Throws NumericalError when fewer
// than 1000 samples would be collected.
Histogram stationary_histogram(const ResistorParams& params, double current, double duration,
                               double dt, std::uint64_t seed, std::size_t bins = 50);

}  // namespace bsnkit::resistors
