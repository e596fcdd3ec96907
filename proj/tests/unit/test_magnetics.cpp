#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bsnkit/constants.hpp"
#include "bsnkit/errors.hpp"
#include "bsnkit/magnetics.hpp"
#include "bsnkit/stats.hpp"

using namespace bsnkit;
using namespace bsnkit::magnetics;

namespace {

constexpr double kB = 1.380649e-16;
constexpr double kGamma = 1.76e7;

double langevin(double h) { return 1.0 / std::tanh(h) - 1.0 / h; }

// <m . z> for an easy-plane magnet by a plain midpoint rule over (m_x, phi).
double easy_plane_average(const MagnetParams& p, double h_z) {
  const double kt = kB * p.temperature;
  const double mv = p.saturation_magnetization * p.volume;
  const int nu = 4000;
  const int nphi = 720;
  double num = 0.0;
  double den = 0.0;
  for (int i = 0; i < nu; ++i) {
    const double u = -1.0 + (i + 0.5) * 2.0 / nu;
    const double s = std::sqrt(1.0 - u * u);
    for (int k = 0; k < nphi; ++k) {
      const double phi = (k + 0.5) * 2.0 * constants::kPi / nphi;
      const double mz = s * std::cos(phi);
      const double e = 0.5 * p.perpendicular_anisotropy * mv * (1.0 - u * u) - mv * h_z * mz;
      const double w = std::exp(-(e - 0.5 * p.perpendicular_anisotropy * mv) / kt);
      num += w * mz;
      den += w;
    }
  }
  return num / den;
}

MagnetParams small_isotropic(double damping = 0.1) {
  return make_magnet(Geometry::isotropic, 1000.0, 1e-19, 0.0, damping);
}

}  // namespace

TEST(Magnet, ThermalFieldMatchesDefinition) {
  const auto p = make_magnet(Geometry::isotropic, 1000.0, 6.3e-19, 0.0);
  EXPECT_NEAR(p.thermal_field(), kB * 300.0 / (1000.0 * 6.3e-19), 1e-9);
}

TEST(Magnet, GeometryNamesRoundTrip) {
  for (auto g : {Geometry::ima_circular, Geometry::ima_uniaxial, Geometry::pma, Geometry::isotropic}) {
    EXPECT_EQ(geometry_from_string(to_string(g)), g);
  }
  EXPECT_THROW(geometry_from_string("cubic"), ConfigError);
}

TEST(Magnet, ValidateRejectsBadValues) {
  auto p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 1.0);
  p.damping = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 1.0);
  p.temperature = -1.0;
  EXPECT_THROW(p.validate(), ConfigError);
  p = make_magnet(Geometry::isotropic, 1000.0, 6.3e-19, 0.0);
  p.perpendicular_anisotropy = 5000.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Magnet, ImaGetsThinFilmDemagnetization) {
  const auto p = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  EXPECT_NEAR(p.perpendicular_anisotropy, -4.0 * constants::kPi * 1000.0, 1e-9);
  EXPECT_DOUBLE_EQ(p.inplane_anisotropy, 0.0);
}

TEST(Magnet, BarrierRoundTrip) {
  const auto p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 5.0);
  EXPECT_NEAR(energy_barrier(p), 5.0, 1e-9);
  EXPECT_NEAR(barrier_to_anisotropy(5.0, p), 2.0 * 5.0 * kB * 300.0 / (1000.0 * 6.3e-19), 1e-9);
  EXPECT_NEAR(anisotropy_to_barrier(barrier_to_anisotropy(3.0, p), p), 3.0, 1e-12);
  const auto u = make_magnet(Geometry::ima_uniaxial, 1000.0, 6.3e-19, 4.0);
  EXPECT_NEAR(energy_barrier(u), 4.0, 1e-9);
}

TEST(Magnet, SpinTorqueField) {
  const auto p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 0.0);
  const double expected = 1.054571817e-27 * 1e-6 / (2.0 * 1.602176634e-19 * 6.3e-16);
  EXPECT_NEAR(spin_torque_field(p, 1e-6), expected, 1e-9 * expected);
}

TEST(Magnet, ThermalSigma) {
  const auto p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 0.0);
  const double expected = std::sqrt(2.0 * 0.1 * kB * 300.0 / (kGamma * 6.3e-16 * 1e-12));
  EXPECT_NEAR(thermal_field_sigma(p, 1e-12), expected, 1e-9 * expected);
}

TEST(Magnet, ArrheniusTime) {
  EXPECT_NEAR(arrhenius_time(0.0), 0.5e-9, 1e-21);
  EXPECT_NEAR(arrhenius_time(10.0, 1e-9), 1e-9 * std::exp(10.0), 1e-15);
}

TEST(Magnet, TimestepCheck) {
  const auto ima = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  EXPECT_TRUE(check_timestep(ima, {}, 1e-12).stable);
  EXPECT_TRUE(check_timestep(ima, {}, 1e-13).resolved);
  EXPECT_FALSE(check_timestep(ima, {}, 1e-10).stable);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto gl = gauss_legendre(8);
  double s10 = 0.0;
  double s15 = 0.0;
  double w = 0.0;
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    s10 += gl.weights[i] * std::pow(gl.nodes[i], 10);
    s15 += gl.weights[i] * std::pow(gl.nodes[i], 14);
    w += gl.weights[i];
  }
  EXPECT_NEAR(w, 2.0, 1e-14);
  EXPECT_NEAR(s10, 2.0 / 11.0, 1e-14);
  EXPECT_NEAR(s15, 2.0 / 15.0, 1e-14);
}

TEST(Quadrature, IsotropicMatchesLangevin) {
  const auto p = make_magnet(Geometry::isotropic, 1000.0, 6.3e-19, 0.0);
  for (double h : {0.1, 0.5, 1.0, 3.0, 10.0}) {
    const auto q = boltzmann_average(p, {0, 0, h * p.thermal_field()},
                                     [](const Vec3& m) { return m.z; });
    EXPECT_TRUE(q.converged);
    EXPECT_NEAR(q.value, langevin(h), 1e-8) << "h=" << h;
  }
}

TEST(Quadrature, EasyPlaneMatchesDirectIntegration) {
  const auto p = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  for (double h : {0.5, 2.0}) {
    const double hz = h * p.thermal_field();
    const auto q = boltzmann_average(p, {0, 0, hz}, [](const Vec3& m) { return m.z; });
    EXPECT_NEAR(q.value, easy_plane_average(p, hz), 1e-4) << "h=" << h;
  }
}

TEST(Quadrature, ZeroFieldAverageVanishes) {
  const auto p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 0.5);
  const auto q = boltzmann_average(p, {}, [](const Vec3& m) { return m.x; });
  EXPECT_NEAR(q.value, 0.0, 1e-12);
}

TEST(PinningField, ClosedForms) {
  const auto iso = make_magnet(Geometry::isotropic, 1000.0, 6.3e-19, 0.0);
  const auto ima = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  EXPECT_NEAR(pinning_field(iso, Geometry::isotropic), 3.0 * iso.thermal_field(), 1e-9);
  EXPECT_NEAR(pinning_field(ima, Geometry::ima_circular), 2.0 * ima.thermal_field(), 1e-9);
}

TEST(PinningField, SpotValuesNearPaper) {
  const auto iso = make_magnet(Geometry::isotropic, 1000.0, 6.3e-19, 0.0);
  const auto ima = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  EXPECT_NEAR(pinning_field(ima, Geometry::ima_circular), 130.0, 0.05 * 130.0);
  EXPECT_NEAR(pinning_field(iso, Geometry::isotropic), 200.0, 0.05 * 200.0);
}

TEST(PinningField, QuadratureSlopeAgrees) {
  const auto ima = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  const double dh = 1e-3 * ima.thermal_field();
  const auto q = boltzmann_average(ima, {0, 0, dh}, [](const Vec3& m) { return m.z; });
  const auto zz = boltzmann_average(ima, {0, 0, 0}, [](const Vec3& m) { return m.z * m.z; });
  // Linear response: d<m_z>/dH = <m_z^2> / H_th.
  EXPECT_NEAR(q.value, dh * zz.value / ima.thermal_field(), 1e-3 * q.value);
  EXPECT_NEAR(dh / q.value, pinning_field(ima, Geometry::ima_circular), 0.01 * dh / q.value);
}

TEST(PinningField, RejectsUnsupported) {
  const auto u = make_magnet(Geometry::ima_uniaxial, 1000.0, 6.3e-19, 0.5);
  EXPECT_THROW(pinning_field(u, Geometry::ima_uniaxial), ConfigError);
  const auto high = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 10.0);
  EXPECT_THROW(pinning_field(high, Geometry::pma), ConfigError);
}

TEST(Sllg, StepKeepsUnitNorm) {
  const auto p = make_magnet(Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  Rng rng(1);
  Vec3 m{0, 0, 1};
  for (int i = 0; i < 10000; ++i) {
    m = sllg_step(m, p, {}, 1e-12, rng);
    ASSERT_NEAR(norm(m), 1.0, 1e-12);
  }
}

TEST(Sllg, StepRejectsBadInput) {
  const auto p = small_isotropic();
  Rng rng(1);
  EXPECT_THROW(sllg_step({0, 0, 1}, p, {}, 0.0, rng), ConfigError);
  EXPECT_THROW(sllg_step({0, 0, 2}, p, {}, 1e-12, rng), ConfigError);
}

TEST(Sllg, LarmorPrecessionFrequency) {
  auto p = small_isotropic(0.001);
  p.temperature = 1e-9;
  DriveConditions d;
  d.external_field = {0, 0, 1000.0};
  const double dt = 1e-14;
  const auto traj = simulate_trajectory(p, d, 5e-9, dt, 3, {.initial = Vec3{1, 0, 0}});
  const auto mx = traj.component(0);
  std::vector<double> crossings;
  for (std::size_t i = 1; i < mx.size(); ++i) {
    if (mx[i - 1] < 0.0 && mx[i] >= 0.0) {
      crossings.push_back((i - 1 + mx[i - 1] / (mx[i - 1] - mx[i])) * traj.sample_interval);
    }
  }
  ASSERT_GE(crossings.size(), 10u);
  const double period = (crossings.back() - crossings.front()) / (crossings.size() - 1);
  const double expected = 2.0 * constants::kPi * (1.0 + 1e-6) / (kGamma * 1000.0);
  EXPECT_NEAR(period, expected, 1e-4 * expected);
}

TEST(Sllg, DampingAlignsWithField) {
  auto p = small_isotropic(0.5);
  p.temperature = 1e-9;
  DriveConditions d;
  d.external_field = {0, 0, 1000.0};
  const auto traj = simulate_trajectory(p, d, 2e-9, 1e-13, 3, {.stride = 100, .initial = Vec3{1, 0, 0}});
  EXPECT_GT(traj.samples.back().z, 0.999);
}

TEST(Sllg, AntiDampingTorqueSwitches) {
  auto p = small_isotropic(0.1);
  p.temperature = 1e-9;
  DriveConditions d;
  d.external_field = {0, 0, 100.0};
  d.polarization = {0, 0, -1};
  // Torque field well above alpha H pushes m against the field.
  const double h_stt_unit = spin_torque_field(p, 1.0);
  d.spin_current = 10.0 * p.damping * 100.0 / h_stt_unit;
  const auto traj = simulate_trajectory(p, d, 5e-9, 1e-13, 3, {.stride = 100, .initial = Vec3{0.1, 0, 0.995}});
  EXPECT_LT(traj.samples.back().z, -0.99);
}

TEST(Sllg, SameSeedSameTrajectory) {
  const auto p = make_magnet(Geometry::pma, 1000.0, 6.3e-19, 1.0);
  const auto a = simulate_trajectory(p, {}, 1e-9, 1e-12, 77);
  const auto b = simulate_trajectory(p, {}, 1e-9, 1e-12, 77);
  const auto c = simulate_trajectory(p, {}, 1e-9, 1e-12, 78);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) ASSERT_EQ(a.samples[i], b.samples[i]);
  EXPECT_NE(a.samples.back(), c.samples.back());
}

TEST(Sllg, RotationalDiffusionTime) {
  const auto p = small_isotropic(0.1);
  const double tau = p.moment() * (1.0 + 0.01) / (2.0 * 0.1 * kGamma * kB * 300.0);
  const auto traj = simulate_trajectory(p, {}, 3000.0 * tau, 1e-12, 5, {.stride = 10});
  EXPECT_NEAR(autocorrelation_time(traj, 0), tau, 0.12 * tau);
}

TEST(Sllg, EquilibriumMatchesLangevin) {
  const auto p = small_isotropic(0.1);
  const double h = 1.0;
  DriveConditions d;
  d.external_field = {0, 0, h * p.thermal_field()};
  RunSettings run;
  run.duration = 2e-6;
  run.replicas = 2;
  run.seed = 21;
  const std::vector<double> fields{h * p.thermal_field()};
  const auto curve = field_response(p, fields, {0, 0, 1}, run);
  EXPECT_NEAR(curve[0].mean, langevin(h), std::max(0.03, 4.0 * curve[0].error));
}

TEST(Sllg, BiasCurrentOfLowBarrierPma) {
  const auto p = make_magnet(Geometry::pma, 1000.0, 1e-19, 0.0);
  const double i0 = 6.0 * 1.602176634e-19 * p.damping * kB * 300.0 / 1.054571817e-27;
  std::vector<double> currents;
  for (int k = -4; k <= 4; ++k) currents.push_back(0.25 * k * i0);
  DriveConditions base;
  base.polarization = {1, 0, 0};
  RunSettings run;
  run.duration = 2e-6;
  run.seed = 4;
  const auto curve = current_response(p, currents, base, run);
  EXPECT_NEAR(bias_current(curve), i0, 0.15 * i0);
}

TEST(Sllg, OutputAxis) {
  EXPECT_EQ(output_axis(Geometry::ima_circular), 2);
  EXPECT_EQ(output_axis(Geometry::ima_uniaxial), 2);
  EXPECT_EQ(output_axis(Geometry::pma), 0);
}
