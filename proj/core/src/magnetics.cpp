#include "bsnkit/magnetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "bsnkit/constants.hpp"
#include "bsnkit/errors.hpp"
#include "bsnkit/parallel.hpp"

namespace bsnkit::magnetics {

using constants::kBoltzmannErg;
using constants::kGyromagnetic;
using constants::kPi;

std::string_view to_string(Geometry g) {
  switch (g) {
    case Geometry::ima_circular: return "IMA_circular";
    case Geometry::ima_uniaxial: return "IMA_uniaxial";
    case Geometry::pma: return "PMA";
    case Geometry::isotropic: return "isotropic";
  }
  return "unknown";
}

Geometry geometry_from_string(std::string_view name) {
  for (Geometry g : {Geometry::ima_circular, Geometry::ima_uniaxial, Geometry::pma,
                     Geometry::isotropic}) {
    if (name == to_string(g)) return g;
  }
  throw ConfigError("unknown geometry class '" + std::string(name) + "'");
}

double MagnetParams::thermal_energy() const { return kBoltzmannErg * temperature; }

double MagnetParams::thermal_field() const { return thermal_energy() / moment(); }

namespace {

// Anisotropy field counted as "approximately zero": its uniaxial barrier is
// below half of k_B T.
bool negligible(double field, const MagnetParams& p) {
  return std::abs(field) * p.moment() / (2.0 * p.thermal_energy()) <= 0.5;
}

}  // namespace

void MagnetParams::validate() const {
  if (!(saturation_magnetization > 0.0)) throw ConfigError("Ms must be positive");
  if (!(volume > 0.0)) throw ConfigError("volume must be positive");
  if (!(temperature > 0.0)) throw ConfigError("temperature must be positive");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (!(spin_polarization >= 0.0)) throw ConfigError("spin polarization must be non-negative");
  switch (geometry) {
    case Geometry::ima_circular:
      if (!(perpendicular_anisotropy < 0.0) || !negligible(inplane_anisotropy, *this)) {
        throw ConfigError("IMA_circular requires H_kp < 0 and H_ki ~ 0");
      }
      break;
    case Geometry::ima_uniaxial:
      if (!(perpendicular_anisotropy < 0.0) || !(inplane_anisotropy > 0.0)) {
        throw ConfigError("IMA_uniaxial requires H_kp < 0 and H_ki > 0");
      }
      break;
    case Geometry::pma:
      if (perpendicular_anisotropy < 0.0 || !negligible(inplane_anisotropy, *this)) {
        throw ConfigError("PMA requires H_kp >= 0 and H_ki ~ 0");
      }
      break;
    case Geometry::isotropic:
      if (!negligible(perpendicular_anisotropy, *this) || !negligible(inplane_anisotropy, *this)) {
        throw ConfigError("isotropic requires H_kp ~ 0 and H_ki ~ 0");
      }
      break;
  }
}

MagnetParams make_magnet(Geometry g, double ms, double volume, double barrier, double damping,
                         double temperature) {
  MagnetParams p;
  p.saturation_magnetization = ms;
  p.volume = volume;
  p.damping = damping;
  p.temperature = temperature;
  p.geometry = g;
  const double hk = barrier_to_anisotropy(barrier, p);
  const double demag = -4.0 * kPi * ms;
  switch (g) {
    case Geometry::ima_circular: p.perpendicular_anisotropy = demag; break;
    case Geometry::ima_uniaxial:
      p.perpendicular_anisotropy = demag;
      p.inplane_anisotropy = hk;
      break;
    case Geometry::pma: p.perpendicular_anisotropy = hk; break;
    case Geometry::isotropic: break;
  }
  p.validate();
  return p;
}

void DriveConditions::validate() const {
  if (std::abs(norm(polarization) - 1.0) > 1e-9) {
    throw ConfigError("spin polarization direction must be a unit vector");
  }
}

Vec3 effective_field(const MagnetParams& params, const Vec3& m, const DriveConditions& drive) {
  return Vec3{params.perpendicular_anisotropy * m.x, 0.0, params.inplane_anisotropy * m.z} +
         drive.external_field;
}

double energy_barrier(const MagnetParams& params) {
  // Stationary points of the biaxial energy are the coordinate axes.
  std::array<double, 3> axis_energy{0.5 * params.inplane_anisotropy,
                                    0.5 * (params.perpendicular_anisotropy + params.inplane_anisotropy),
                                    0.5 * params.perpendicular_anisotropy};
  std::sort(axis_energy.begin(), axis_energy.end());
  return (axis_energy[1] - axis_energy[0]) * params.moment() / params.thermal_energy();
}

double spin_torque_field(const MagnetParams& params, double spin_current) {
  return params.spin_polarization * constants::kHbarErg * spin_current /
         (2.0 * constants::kElementaryCharge * params.moment());
}

double thermal_field_sigma(const MagnetParams& params, double dt) {
  return std::sqrt(2.0 * params.damping * params.thermal_energy() /
                   (kGyromagnetic * params.moment() * dt));
}

double barrier_to_anisotropy(double barrier, const MagnetParams& params) {
  if (barrier < 0.0) throw ConfigError("barrier must be non-negative");
  return 2.0 * barrier * params.thermal_energy() / params.moment();
}

double anisotropy_to_barrier(double anisotropy_field, const MagnetParams& params) {
  return anisotropy_field * params.moment() / (2.0 * params.thermal_energy());
}

double arrhenius_time(double barrier, double attempt_time) { return attempt_time * std::exp(barrier); }

double estimated_correlation_time(const MagnetParams& params) {
  const double a = params.damping;
  const double diffusion = a * kGyromagnetic * params.thermal_energy() / ((1.0 + a * a) * params.moment());
  double tau = 1.0 / (2.0 * diffusion);
  if (params.perpendicular_anisotropy < 0.0) {
    // Thermal m_x tilts precess about the demagnetizing field.
    const double precession =
        1.0 / (kGyromagnetic * std::sqrt(-params.perpendicular_anisotropy * params.thermal_field()));
    tau = std::min(tau, precession);
  }
  const double barrier = energy_barrier(params);
  if (barrier > 1.0) tau *= std::exp(barrier) / barrier;
  return tau;
}

TimestepCheck check_timestep(const MagnetParams& params, const DriveConditions& drive, double dt) {
  const double a = params.damping;
  const double gamma_ll = kGyromagnetic / (1.0 + a * a);
  const double deterministic = std::abs(params.perpendicular_anisotropy) +
                               std::abs(params.inplane_anisotropy) + norm(drive.external_field) +
                               (1.0 + a) * std::abs(spin_torque_field(params, drive.spin_current));
  const double thermal = 3.0 * thermal_field_sigma(params, dt);
  TimestepCheck out;
  out.rotation_per_step = gamma_ll * (deterministic + thermal) * dt;
  out.stable = out.rotation_per_step <= 0.5;
  if (deterministic > 0.0) {
    const double period = 2.0 * kPi / (gamma_ll * deterministic);
    out.resolved = dt <= period / 20.0;
  }
  return out;
}

SllgIntegrator::SllgIntegrator(const MagnetParams& params, const DriveConditions& drive, double dt,
                               Rng rng, const Vec3& initial)
    : params_(params),
      dt_(dt),
      rng_(rng),
      m_(initial),
      hext_(drive.external_field),
      p_(drive.polarization),
      hkp_(params.perpendicular_anisotropy),
      hki_(params.inplane_anisotropy),
      gamma_ll_(kGyromagnetic / (1.0 + params.damping * params.damping)),
      alpha_(params.damping),
      torque_(0.0),
      sigma_(thermal_field_sigma(params, dt)) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  drive.validate();
  set_state(initial);
  set_spin_current(drive.spin_current);
}

void SllgIntegrator::set_state(const Vec3& m) {
  if (std::abs(norm(m) - 1.0) > 1e-9) throw ConfigError("magnetization must be a unit vector");
  m_ = m;
}

void SllgIntegrator::set_spin_current(double spin_current) {
  torque_ = gamma_ll_ * spin_torque_field(params_, spin_current);
}

Vec3 SllgIntegrator::rhs(const Vec3& m, const Vec3& h) const {
  const Vec3 mxh = cross(m, h);
  const Vec3 mxmxh = cross(m, mxh);
  const Vec3 mxp = cross(m, p_);
  const Vec3 mxmxp = cross(m, mxp);
  return -gamma_ll_ * (mxh + alpha_ * mxmxh) - torque_ * (mxmxp - alpha_ * mxp);
}

void SllgIntegrator::step() {
  Vec3 thermal;
  if (sigma_ > 0.0) thermal = Vec3{rng_.normal(), rng_.normal(), rng_.normal()} * sigma_;
  const Vec3 k1 = rhs(m_, field(m_) + thermal);
  const Vec3 predicted = m_ + k1 * dt_;
  const Vec3 k2 = rhs(predicted, field(predicted) + thermal);
  m_ = normalized(m_ + (k1 + k2) * (0.5 * dt_));
}

Vec3 sllg_step(const Vec3& m, const MagnetParams& params, const DriveConditions& drive, double dt,
               Rng& rng) {
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  SllgIntegrator integ(params, drive, dt, rng, m);
  integ.step();
  rng = integ.rng();
  return integ.state();
}

Vec3 random_unit_vector(Rng& rng) {
  const double z = rng.uniform_signed();
  const double phi = 2.0 * kPi * rng.uniform();
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

std::vector<double> Trajectory::component(int axis) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& m : samples) out.push_back(axis == 0 ? m.x : axis == 1 ? m.y : m.z);
  return out;
}

std::vector<double> Trajectory::projection(const Vec3& direction) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& m : samples) out.push_back(dot(m, direction));
  return out;
}

Trajectory simulate_trajectory(const MagnetParams& params, const DriveConditions& drive,
                               double duration, double dt, std::uint64_t seed,
                               const TrajectoryOptions& options) {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  const TimestepCheck check = check_timestep(params, drive, dt);
  if (!check.stable) {
    throw ConfigError("time step too large: " + std::to_string(check.rotation_per_step) +
                      " rad per step");
  }
  Rng rng(seed, options.stream);
  const Vec3 initial = options.initial ? normalized(*options.initial) : random_unit_vector(rng);
  SllgIntegrator integ(params, drive, dt, rng, initial);
  integ.run(static_cast<std::size_t>(std::llround(options.burn_in / dt)));

  const std::size_t stride = std::max<std::size_t>(1, options.stride);
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  Trajectory traj;
  traj.dt = dt;
  traj.sample_interval = dt * static_cast<double>(stride);
  traj.seed = seed;
  traj.timestep_resolved = check.resolved;
  traj.duration_sufficient = duration >= 1000.0 * estimated_correlation_time(params);
  traj.samples.reserve(steps / stride + 1);
  for (std::size_t i = 1; i <= steps; ++i) {
    integ.step();
    if (i % stride == 0) traj.samples.push_back(integ.state());
  }
  return traj;
}

int output_axis(Geometry g) {
  return (g == Geometry::ima_circular || g == Geometry::ima_uniaxial) ? 2 : 0;
}

double autocorrelation_time(const Trajectory& traj, int axis) {
  const auto series = traj.component(axis);
  return stats::correlation_time(series, traj.sample_interval);
}

namespace {

// Long-time average of m . direction for one replica, with a batch-means error.
stats::Estimate average_projection(const MagnetParams& params, const DriveConditions& drive,
                                   const RunSettings& run, std::uint64_t stream,
                                   const Vec3& direction) {
  Rng rng(run.seed, stream);
  const Vec3 initial = random_unit_vector(rng);
  SllgIntegrator integ(params, drive, run.dt, rng, initial);
  integ.run(static_cast<std::size_t>(std::llround(run.burn_in * run.duration / run.dt)));

  const auto steps = static_cast<std::size_t>(std::llround(run.duration / run.dt));
  constexpr std::size_t kMaxKept = 1u << 16;
  const std::size_t stride = std::max<std::size_t>(1, steps / kMaxKept);
  std::vector<double> kept;
  kept.reserve(steps / stride + 1);
  double sum = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    integ.step();
    const double v = dot(integ.state(), direction);
    sum += v;
    if (i % stride == 0) kept.push_back(v);
  }
  stats::Estimate est = stats::batch_mean(kept, 32);
  est.mean = sum / static_cast<double>(steps);
  return est;
}

std::vector<SweepPoint> sweep(const MagnetParams& params, std::size_t points,
                              const std::function<DriveConditions(std::size_t)>& drive_at,
                              const std::function<double(std::size_t)>& label_at,
                              const Vec3& direction, const RunSettings& run) {
  params.validate();
  if (!(run.dt > 0.0) || !(run.duration > 0.0)) throw ConfigError("invalid run settings");
  const std::size_t replicas = std::max<std::size_t>(1, run.replicas);
  for (std::size_t i = 0; i < points; ++i) {
    if (!check_timestep(params, drive_at(i), run.dt).stable) {
      throw ConfigError("time step too large for sweep point " + std::to_string(i));
    }
  }
  std::vector<stats::Estimate> results(points * replicas);
  parallel_for(points * replicas, run.threads, [&](std::size_t k) {
    const std::size_t i = k / replicas;
    const std::size_t r = k % replicas;
    results[k] = average_projection(params, drive_at(i), run, substream(i, r), direction);
  });
  std::vector<SweepPoint> out(points);
  for (std::size_t i = 0; i < points; ++i) {
    double sum = 0.0;
    double err2 = 0.0;
    std::vector<double> means;
    for (std::size_t r = 0; r < replicas; ++r) {
      const auto& e = results[i * replicas + r];
      sum += e.mean;
      err2 += e.error * e.error;
      means.push_back(e.mean);
    }
    const auto n = static_cast<double>(replicas);
    double error = std::sqrt(err2) / n;
    if (replicas >= 4) {
      error = std::max(error, std::sqrt(stats::variance(means) / (n - 1.0)));
    }
    out[i] = {label_at(i), sum / n, error};
  }
  return out;
}

}  // namespace

std::vector<SweepPoint> current_response(const MagnetParams& params,
                                         std::span<const double> spin_currents,
                                         const DriveConditions& base, const RunSettings& run) {
  base.validate();
  return sweep(
      params, spin_currents.size(),
      [&](std::size_t i) {
        DriveConditions d = base;
        d.spin_current = spin_currents[i];
        return d;
      },
      [&](std::size_t i) { return spin_currents[i]; }, base.polarization, run);
}

std::vector<SweepPoint> field_response(const MagnetParams& params, std::span<const double> fields,
                                       const Vec3& direction, const RunSettings& run) {
  const Vec3 dir = normalized(direction);
  return sweep(
      params, fields.size(),
      [&](std::size_t i) {
        DriveConditions d;
        d.external_field = dir * fields[i];
        return d;
      },
      [&](std::size_t i) { return fields[i]; }, dir, run);
}

namespace {

double inverse_slope(std::span<const SweepPoint> curve) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : curve) {
    xs.push_back(p.drive);
    ys.push_back(p.mean);
  }
  return stats::inverse_slope_at_zero(xs, ys, 0.3);
}

}  // namespace

double bias_current(std::span<const SweepPoint> curve) { return inverse_slope(curve); }

double pinning_field_from_curve(std::span<const SweepPoint> curve) { return inverse_slope(curve); }

GaussLegendre gauss_legendre(int order) {
  if (order < 1) throw ConfigError("quadrature order must be positive");
  GaussLegendre gl;
  gl.nodes.resize(order);
  gl.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (order == 1) ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    gl.nodes[i] = -x;
    gl.nodes[order - 1 - i] = x;
    gl.weights[i] = w;
    gl.weights[order - 1 - i] = w;
  }
  return gl;
}

namespace {

double quadrature_at(const MagnetParams& params, const Vec3& h, const Observable& observable,
                     int order) {
  const GaussLegendre gl = gauss_legendre(order);
  const double beta = params.moment() / params.thermal_energy();
  const std::size_t n = gl.nodes.size();
  std::vector<double> log_weight(n * n);
  std::vector<Vec3> points(n * n);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double mx = gl.nodes[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - mx * mx));
    for (std::size_t j = 0; j < n; ++j) {
      const double phi = kPi * gl.nodes[j];
      const Vec3 m{mx, s * std::sin(phi), s * std::cos(phi)};
      const double energy = 0.5 * params.perpendicular_anisotropy * (1.0 - m.x * m.x) +
                            0.5 * params.inplane_anisotropy * (1.0 - m.z * m.z) - dot(h, m);
      const double lw = -beta * energy;
      log_weight[i * n + j] = lw;
      points[i * n + j] = m;
      max_log = std::max(max_log, lw);
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = gl.weights[i] * gl.weights[j] * std::exp(log_weight[i * n + j] - max_log);
      num += w * observable(points[i * n + j]);
      den += w;
    }
  }
  return num / den;
}

}  // namespace

QuadratureResult boltzmann_average(const MagnetParams& params, const Vec3& external_field,
                                   const Observable& observable, double rtol, int max_order) {
  QuadratureResult res;
  double previous = quadrature_at(params, external_field, observable, 8);
  for (int order = 16; order <= max_order; order *= 2) {
    const double value = quadrature_at(params, external_field, observable, order);
    res.value = value;
    res.error = std::abs(value - previous);
    res.order = order;
    if (res.error <= rtol * std::abs(value) + 1e-15) {
      res.converged = true;
      return res;
    }
    previous = value;
  }
  return res;
}

double pinning_field(const MagnetParams& params, Geometry g) {
  const double barrier = energy_barrier(params);
  if (barrier > 1.0) {
    throw ConfigError("pinning field formula holds for barriers <= k_B T, got " +
                      std::to_string(barrier));
  }
  switch (g) {
    case Geometry::pma:
    case Geometry::isotropic: return 3.0 * params.thermal_field();
    case Geometry::ima_circular: return 2.0 * params.thermal_field();
    case Geometry::ima_uniaxial: break;
  }
  throw ConfigError("no closed-form pinning field for IMA_uniaxial magnets");
}

}  // namespace bsnkit::magnetics
