#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bsnkit/errors.hpp"
#include "bsnkit/resistors.hpp"
#include "bsnkit/stats.hpp"

using namespace bsnkit;
using namespace bsnkit::resistors;

namespace {

ResistorParams behavioral(ResistorKind kind) {
  ResistorParams p;
  p.kind = kind;
  p.r_p = 10e3;
  p.r_ap = 30e3;
  p.tau_fluct = 1e-9;
  if (is_tunable(kind)) {
    p.i50 = 15e-6;
    p.i0 = 5e-6;
  }
  return p;
}

struct Series {
  std::vector<double> m;
  double dt = 0.0;
};

Series run(const ResistorParams& p, double current, double duration, double dt, std::uint64_t seed) {
  StochasticResistor r(p, Rng(seed));
  Series s;
  s.dt = dt;
  const auto steps = static_cast<std::size_t>(duration / dt);
  s.m.reserve(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    r.step(current, dt);
    s.m.push_back(r.m());
  }
  return s;
}

}  // namespace

TEST(Resistance, InterpolatesConductance) {
  EXPECT_DOUBLE_EQ(resistance_from_m(1.0, 10e3, 30e3), 10e3);
  EXPECT_DOUBLE_EQ(resistance_from_m(-1.0, 10e3, 30e3), 30e3);
  EXPECT_NEAR(resistance_from_m(0.0, 10e3, 30e3), 15e3, 1e-9);
  EXPECT_DOUBLE_EQ(resistance_from_m(2.0, 10e3, 30e3), 10e3);
}

TEST(Resistance, Tmr) {
  EXPECT_NEAR(tmr(behavioral(ResistorKind::ntc)), 200.0, 1e-12);
}

TEST(Kinds, NamesAndTraits) {
  for (auto k : {ResistorKind::ntc, ResistorKind::ntb, ResistorKind::tc, ResistorKind::tb}) {
    EXPECT_EQ(kind_from_string(to_string(k)), k);
  }
  EXPECT_TRUE(is_tunable(ResistorKind::tb));
  EXPECT_FALSE(is_tunable(ResistorKind::ntb));
  EXPECT_TRUE(is_bipolar(ResistorKind::ntb));
  EXPECT_FALSE(is_bipolar(ResistorKind::tc));
  EXPECT_EQ(backend_from_string("mtj"), Backend::mtj);
  EXPECT_THROW(kind_from_string("XYZ"), ConfigError);
}

TEST(Params, Validation) {
  auto p = behavioral(ResistorKind::tc);
  p.i0.reset();
  EXPECT_THROW(p.validate(), ConfigError);
  p = behavioral(ResistorKind::ntc);
  p.r_ap = p.r_p;
  EXPECT_THROW(p.validate(), ConfigError);
  p = behavioral(ResistorKind::ntc);
  p.tau_fluct = 0.0;
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Params, DriveSign) {
  auto p = behavioral(ResistorKind::tb);
  EXPECT_DOUBLE_EQ(p.drive(20e-6), 1.0);
  p.orientation = -1;
  EXPECT_DOUBLE_EQ(p.drive(20e-6), -1.0);
  EXPECT_DOUBLE_EQ(behavioral(ResistorKind::ntc).drive(20e-6), 0.0);
}

TEST(Step, RejectsBadArguments) {
  StochasticResistor r(behavioral(ResistorKind::ntc), Rng(1));
  EXPECT_THROW(r.step(1e-6, 0.0), ConfigError);
  EXPECT_THROW(r.step(-1e-6, 1e-12), ConfigError);
}

TEST(Step, ResistanceStaysInRange) {
  for (auto k : {ResistorKind::ntc, ResistorKind::ntb, ResistorKind::tc, ResistorKind::tb}) {
    const auto p = behavioral(k);
    StochasticResistor r(p, Rng(3));
    for (int i = 0; i < 5000; ++i) {
      const double v = r.step(12e-6, 2e-11);
      ASSERT_GE(v, p.r_p);
      ASSERT_LE(v, p.r_ap);
    }
  }
}

TEST(Step, SetM) {
  StochasticResistor r(behavioral(ResistorKind::ntc), Rng(1));
  r.set_m(0.0);
  EXPECT_NEAR(r.resistance(), 15e3, 1e-9);
  StochasticResistor b(behavioral(ResistorKind::ntb), Rng(1));
  b.set_m(0.3);
  EXPECT_EQ(b.m(), 1.0);
  EXPECT_THROW(r.set_m(1.5), ConfigError);
}

// cos of a Brownian phase with diffusion 1/tau decorrelates as exp(-t/tau).
TEST(Behavioral, ContinuousCorrelationTime) {
  const auto p = behavioral(ResistorKind::ntc);
  const auto s = run(p, 10e-6, 3000e-9, 2e-11, 5);
  EXPECT_NEAR(stats::correlation_time(s.m, s.dt), 1e-9, 0.1e-9);
}

// Symmetric telegraph with switching rate 1/(2 tau) each way decorrelates as exp(-t/tau).
TEST(Behavioral, TelegraphCorrelationTime) {
  const auto p = behavioral(ResistorKind::ntb);
  const auto s = run(p, 10e-6, 3000e-9, 2e-11, 6);
  EXPECT_NEAR(stats::correlation_time(s.m, s.dt), 1e-9, 0.1e-9);
  for (double m : s.m) ASSERT_TRUE(m == 1.0 || m == -1.0);
}

TEST(Behavioral, NonTunableIgnoresCurrent) {
  const auto p = behavioral(ResistorKind::ntb);
  const auto s = run(p, 40e-6, 2000e-9, 2e-11, 7);
  EXPECT_NEAR(stats::mean(s.m), 0.0, 0.06);
}

// Two-state balance: p_P / p_AP = exp(-2x), so <m> = -tanh(x).
TEST(Behavioral, TelegraphOccupancyIsTanh) {
  const auto p = behavioral(ResistorKind::tb);
  for (double x : {-1.0, 0.0, 1.0}) {
    const auto s = run(p, *p.i50 + x * *p.i0, 3000e-9, 5e-11, 8);
    EXPECT_NEAR(stats::mean(s.m), -std::tanh(x), 0.05) << "x=" << x;
  }
}

// Stationary phase density exp(kappa cos phi) with kappa = -2x gives <m> = I1(kappa)/I0(kappa).
TEST(Behavioral, ContinuousTunableOccupancy) {
  const auto p = behavioral(ResistorKind::tc);
  for (double x : {-1.0, 0.5, 1.0}) {
    const auto s = run(p, *p.i50 + x * *p.i0, 3000e-9, 2e-11, 9);
    const double kappa = -2.0 * x;
    const double expected = std::copysign(std::cyl_bessel_i(1.0, std::abs(kappa)) /
                                              std::cyl_bessel_i(0.0, std::abs(kappa)),
                                          kappa);
    EXPECT_NEAR(stats::mean(s.m), expected, 0.05) << "x=" << x;
  }
}

TEST(Behavioral, OrientationInvertsResponse) {
  auto p = behavioral(ResistorKind::tb);
  p.orientation = -1;
  const auto s = run(p, *p.i50 + *p.i0, 3000e-9, 5e-11, 10);
  EXPECT_NEAR(stats::mean(s.m), std::tanh(1.0), 0.05);
}

TEST(Behavioral, SameSeedReproduces) {
  const auto p = behavioral(ResistorKind::tc);
  const auto a = run(p, 12e-6, 100e-9, 2e-11, 11);
  const auto b = run(p, 12e-6, 100e-9, 2e-11, 11);
  EXPECT_EQ(a.m, b.m);
}

// For a uniform phase, |cos phi| < 1/2 holds a third of the time.
TEST(Histogram, ContinuousIsArcsine) {
  const auto p = behavioral(ResistorKind::ntc);
  const auto h = stationary_histogram(p, 10e-6, 4000e-9, 2e-11, 12, 50);
  EXPECT_FALSE(h.bipolar);
  double total = 0.0;
  double central = 0.0;
  for (std::size_t i = 0; i < h.mass.size(); ++i) {
    total += h.mass[i];
    const double r = 0.5 * (h.edges[i] + h.edges[i + 1]);
    const double g = 1.0 / r;
    const double m = (2.0 * g - 1.0 / p.r_p - 1.0 / p.r_ap) / (1.0 / p.r_p - 1.0 / p.r_ap);
    if (std::abs(m) < 0.5) central += h.mass[i];
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
  EXPECT_NEAR(central, 1.0 / 3.0, 0.04);
}

TEST(Histogram, TelegraphIsBipolar) {
  const auto h = stationary_histogram(behavioral(ResistorKind::ntb), 10e-6, 1000e-9, 2e-11, 13);
  EXPECT_TRUE(h.bipolar);
  EXPECT_NEAR(h.mass.front() + h.mass.back(), 1.0, 1e-12);
}

TEST(Histogram, NeedsEnoughSamples) {
  EXPECT_THROW(stationary_histogram(behavioral(ResistorKind::ntc), 0.0, 1e-9, 1e-11, 1),
               NumericalError);
}

TEST(Mtj, ContinuousImaBackend) {
  ResistorParams p = behavioral(ResistorKind::ntc);
  p.backend = Backend::mtj;
  p.mtj.magnet = magnetics::make_magnet(magnetics::Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  StochasticResistor r(p, Rng(14));
  for (int i = 0; i < 200; ++i) {
    r.step(10e-6, 1e-11);
    ASSERT_NEAR(r.m(), dot(r.state().magnet, p.mtj.fixed_layer), 1e-12);
    ASSERT_NEAR(r.resistance(), resistance_from_m(r.m(), p.r_p, p.r_ap), 1e-9);
  }
  EXPECT_THROW(r.set_m(0.0), ConfigError);
}

TEST(Mtj, TunableNeedsPmaOrIsotropic) {
  ResistorParams p = behavioral(ResistorKind::tc);
  p.backend = Backend::mtj;
  p.mtj.magnet = magnetics::make_magnet(magnetics::Geometry::ima_circular, 1000.0, 6.3e-19, 0.0);
  EXPECT_THROW(p.validate(), ConfigError);
}

// Langevin slope 1/3 at the balance point: I0 = 6 q alpha kT / (hbar P).
TEST(Mtj, PolarizationForBiasCurrent) {
  ResistorParams p = behavioral(ResistorKind::tc);
  p.backend = Backend::mtj;
  p.mtj.magnet = magnetics::make_magnet(magnetics::Geometry::pma, 1000.0, 6.3e-19, 0.0);
  p.mtj.fixed_layer = {1, 0, 0};
  const double kt = 1.380649e-16 * 300.0;
  const double expected = 6.0 * 1.602176634e-19 * 0.1 * kt / (1.054571817e-27 * 5e-6);
  EXPECT_NEAR(mtj_polarization_for(p), expected, 1e-9 * expected);
  auto mag = p.mtj.magnet;
  mag.spin_polarization = expected;
  EXPECT_NEAR(mtj_bias_field_for(p), magnetics::spin_torque_field(mag, 15e-6) / 0.1, 1e-9);
}

TEST(Mtj, TunablePmaFollowsCurrent) {
  ResistorParams p = behavioral(ResistorKind::tc);
  p.backend = Backend::mtj;
  p.mtj.magnet = magnetics::make_magnet(magnetics::Geometry::pma, 1000.0, 1e-19, 0.0);
  p.mtj.fixed_layer = {1, 0, 0};
  auto mean_m = [&](double current) {
    StochasticResistor r(p, Rng(15));
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      r.step(current, 1e-11);
      s += r.m();
    }
    return s / n;
  };
  EXPECT_NEAR(mean_m(15e-6), 0.0, 0.08);
  EXPECT_LT(mean_m(30e-6), -0.5);
  EXPECT_GT(mean_m(0.0), 0.5);
}
