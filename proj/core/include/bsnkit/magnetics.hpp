#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "bsnkit/rng.hpp"
#include "bsnkit/stats.hpp"
#include "bsnkit/vec3.hpp"

// Macrospin model of a low-barrier nanomagnet. Energy (erg):
//
//   E = 1/2 H_kp Ms V (1 - m_x^2) + 1/2 H_ki Ms V (1 - m_z^2) - Ms V H_ext . m
//
// with the perpendicular axis along x and the in-plane easy axis along z.
// All fields are in Oe, moments in emu, energies in erg.
namespace bsnkit::magnetics {

enum class Geometry { ima_circular, ima_uniaxial, pma, isotropic };

std::string_view to_string(Geometry g);
Geometry geometry_from_string(std::string_view name);

struct MagnetParams {
  double saturation_magnetization = 1000.0;  // emu/cc
  double volume = 6.3e-19;                   // cc
  double perpendicular_anisotropy = 0.0;     // H_kp, Oe; negative is easy-plane (-H_D)
  double inplane_anisotropy = 0.0;           // H_ki, Oe
  double damping = 0.1;
  double temperature = 300.0;  // K
  Geometry geometry = Geometry::isotropic;
  double spin_polarization = 1.0;  // efficiency factor on the Slonczewski torque

  double moment() const { return saturation_magnetization * volume; }  // emu
  double thermal_energy() const;                                       // erg
  // k_B T / (Ms V): the field whose Zeeman energy equals k_B T.
  double thermal_field() const;

  // Throws ConfigError on invalid values or on a geometry label that does not
  // match the anisotropy fields.
  void validate() const;
};

// Builds a magnet of the requested class with barrier `barrier` (units of k_B T).
// IMA classes get H_kp = -4 pi Ms (thin-film demagnetization).
MagnetParams make_magnet(Geometry g, double ms, double volume, double barrier,
                         double damping = 0.1, double temperature = 300.0);

struct DriveConditions {
  Vec3 external_field;          // Oe
  double spin_current = 0.0;    // A
  Vec3 polarization{0, 0, 1};   // unit vector the torque pushes m toward

  void validate() const;
};

Vec3 effective_field(const MagnetParams& params, const Vec3& m, const DriveConditions& drive);

// Energy barrier between the two lowest stationary states, in units of k_B T.
double energy_barrier(const MagnetParams& params);

// Field-equivalent magnitude of the damping-like torque, (hbar / 2q) I_S / (Ms V).
double spin_torque_field(const MagnetParams& params, double spin_current);

// Standard deviation of each thermal-field component for a step dt.
double thermal_field_sigma(const MagnetParams& params, double dt);

double barrier_to_anisotropy(double barrier, const MagnetParams& params);
double anisotropy_to_barrier(double anisotropy_field, const MagnetParams& params);

// Retention time in the thermally activated regime, tau0 exp(barrier).
double arrhenius_time(double barrier, double attempt_time = 0.5e-9);

// Rough correlation-time scale used for choosing run lengths, not a result.
double estimated_correlation_time(const MagnetParams& params);

struct TimestepCheck {
  double rotation_per_step = 0.0;  // rad, fastest precession times dt
  bool stable = true;              // rotation_per_step <= 0.5
  bool resolved = true;            // dt <= precession period / 20
};

TimestepCheck check_timestep(const MagnetParams& params, const DriveConditions& drive, double dt);

// Stochastic Heun (Stratonovich) integrator of the Landau-Lifshitz-Gilbert
// equation with Slonczewski torque and Brown's thermal field. The thermal
// field is held fixed over each step and m is renormalized after each step.
class SllgIntegrator {
 public:
  SllgIntegrator(const MagnetParams& params, const DriveConditions& drive, double dt, Rng rng,
                 const Vec3& initial);

  void step();
  void run(std::size_t steps) {
    for (std::size_t i = 0; i < steps; ++i) step();
  }

  const Vec3& state() const { return m_; }
  void set_state(const Vec3& m);
  void set_spin_current(double spin_current);
  double dt() const { return dt_; }
  Rng& rng() { return rng_; }

 private:
  Vec3 field(const Vec3& m) const {
    return {hkp_ * m.x + hext_.x, hext_.y, hki_ * m.z + hext_.z};
  }
  Vec3 rhs(const Vec3& m, const Vec3& h) const;

  MagnetParams params_;
  double dt_;
  Rng rng_;
  Vec3 m_;
  Vec3 hext_;
  Vec3 p_;
  double hkp_;
  double hki_;
  double gamma_ll_;  // gamma / (1 + alpha^2)
  double alpha_;
  double torque_;  // gamma_ll * H_stt
  double sigma_;
};

// One integration step from `m`. Rejects dt <= 0 and non-unit m.
Vec3 sllg_step(const Vec3& m, const MagnetParams& params, const DriveConditions& drive, double dt,
               Rng& rng);

Vec3 random_unit_vector(Rng& rng);

struct Trajectory {
  double dt = 0.0;
  double sample_interval = 0.0;
  std::uint64_t seed = 0;
  std::vector<Vec3> samples;
  bool timestep_resolved = true;
  bool duration_sufficient = true;  // >= 1000 estimated correlation times

  std::vector<double> component(int axis) const;
  std::vector<double> projection(const Vec3& direction) const;
};

struct TrajectoryOptions {
  std::size_t stride = 1;
  std::optional<Vec3> initial;
  double burn_in = 0.0;  // s, discarded before recording
  std::uint64_t stream = 0;
};

// Deterministic for a given seed and options. Throws ConfigError on an
// unstable step.
Trajectory simulate_trajectory(const MagnetParams& params, const DriveConditions& drive,
                               double duration, double dt, std::uint64_t seed,
                               const TrajectoryOptions& options = {});

// Component whose fluctuations an MTJ reads out: m_z for IMA, m_x otherwise.
int output_axis(Geometry g);

double autocorrelation_time(const Trajectory& traj, int axis);

struct RunSettings {
  double duration = 1e-6;  // s per sweep point
  double dt = 1e-12;
  std::uint64_t seed = 1;
  double burn_in = 0.02;    // fraction of duration discarded first
  std::size_t replicas = 1;  // independent runs averaged per point
  unsigned threads = 1;
};

struct SweepPoint {
  double drive = 0.0;  // A for current sweeps, Oe for field sweeps
  double mean = 0.0;
  double error = 0.0;
};

// Long-time average of m . p_hat for each spin current.
std::vector<SweepPoint> current_response(const MagnetParams& params,
                                         std::span<const double> spin_currents,
                                         const DriveConditions& base, const RunSettings& run);

// Long-time average of m . direction for a field of each magnitude along direction.
std::vector<SweepPoint> field_response(const MagnetParams& params, std::span<const double> fields,
                                       const Vec3& direction, const RunSettings& run);

// I_0: inverse slope of <m> vs I_S at the zero crossing, least squares over |<m>| < 0.3.
double bias_current(std::span<const SweepPoint> curve);

// Inverse initial slope of <m> vs H, extracted from a field sweep.
double pinning_field_from_curve(std::span<const SweepPoint> curve);

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // last change under order doubling
  int order = 0;
  bool converged = false;
};

using Observable = std::function<double(const Vec3&)>;

// Equilibrium average of an observable over the Boltzmann distribution of the
// magnet energy, by tensor Gauss-Legendre quadrature in cos(theta) and phi
// (theta measured from x) with the order doubled until the relative change
// drops below rtol.
QuadratureResult boltzmann_average(const MagnetParams& params, const Vec3& external_field,
                                   const Observable& observable, double rtol = 1e-8,
                                   int max_order = 2048);

// Pinning field of a low-barrier magnet, the inverse of d<m>/dH at H = 0:
// 3 k_B T / (Ms V) for PMA and isotropic magnets, 2 k_B T / (Ms V) for
// circular IMA. Rejects magnets with a barrier above k_B T.
double pinning_field(const MagnetParams& params, Geometry g);

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int order);

}  // namespace bsnkit::magnetics
