#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bsnkit/errors.hpp"
#include "bsnkit/rng.hpp"
#include "bsnkit/stats.hpp"

using namespace bsnkit;

// Known-answer vectors published with the Random123 library.
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::generate({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out[0], 0x6627e8d5u);
  EXPECT_EQ(out[1], 0xe169c58du);
  EXPECT_EQ(out[2], 0xbc57ac4cu);
  EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::generate({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto out = Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                        {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out[0], 0xd16cfe09u);
  EXPECT_EQ(out[1], 0x94fdccebu);
  EXPECT_EQ(out[2], 0x5001e420u);
  EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Rng, SameSeedAndStreamReproduce) {
  Rng a(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, StreamsDiffer) {
  Rng a(42, substream(1, 0));
  Rng b(42, substream(1, 1));
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a.next_u32() == b.next_u32();
  EXPECT_LT(equal, 3);
}

TEST(Rng, UniformMoments) {
  Rng rng(3);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
    s2 += u * u;
  }
  EXPECT_NEAR(s / n, 0.5, 5 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0 / 12.0, 2e-3);
}

TEST(Rng, NormalMoments) {
  Rng rng(5);
  const int n = 200000;
  double s = 0.0;
  double s2 = 0.0;
  double s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    s += x;
    s2 += x * x;
    s4 += x * x * x * x;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
  EXPECT_NEAR(s4 / n, 3.0, 0.1);
}

TEST(Rng, ExponentialMean) {
  Rng rng(9);
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.exponential(2.5);
  EXPECT_NEAR(s / n, 2.5, 5 * 2.5 / std::sqrt(n));
}

TEST(Stats, MeanAndVariance) {
  const std::vector<double> xs{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(stats::mean(xs), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(xs), 1.25);
}

TEST(Stats, BatchMeanErrorOfIidNoise) {
  Rng rng(11);
  std::vector<double> xs(64000);
  for (auto& x : xs) x = rng.normal();
  const auto est = stats::batch_mean(xs, 32);
  EXPECT_NEAR(est.error, 1.0 / std::sqrt(xs.size()), 0.35 / std::sqrt(xs.size()));
}

TEST(Stats, Ar1CorrelationTime) {
  const double phi = 0.9;
  Rng rng(13);
  std::vector<double> xs(400000);
  double x = 0.0;
  for (auto& v : xs) {
    x = phi * x + std::sqrt(1 - phi * phi) * rng.normal();
    v = x;
  }
  const auto c = stats::autocorrelation(xs, 5);
  EXPECT_DOUBLE_EQ(c[0], 1.0);
  EXPECT_NEAR(c[1], phi, 0.01);
  EXPECT_NEAR(c[2], phi * phi, 0.01);
  const double expected = -1.0 / std::log(phi);
  EXPECT_NEAR(stats::correlation_time(xs, 1.0), expected, 0.05 * expected);
}

TEST(Stats, CorrelationTimeNeedsDecay) {
  const std::vector<double> flat(1000, 0.25);
  EXPECT_THROW(stats::correlation_time(flat, 1.0), NumericalError);
}

TEST(Stats, FitLineExact) {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, 3, 5, 7};
  const auto line = stats::fit_line(x, y);
  EXPECT_NEAR(line.slope, 2.0, 1e-12);
  EXPECT_NEAR(line.intercept, 1.0, 1e-12);
}

TEST(Stats, InverseSlopeAtZero) {
  std::vector<double> x;
  std::vector<double> y;
  for (int i = -40; i <= 40; ++i) {
    x.push_back(i * 0.0025);
    y.push_back(std::tanh(i * 0.0025 / 2.0));
  }
  EXPECT_NEAR(stats::inverse_slope_at_zero(x, y), 2.0, 0.01);
}

TEST(Stats, WhiteNoiseSpectrumIsFlat) {
  Rng rng(17);
  const double sigma = 0.5;
  const double dt = 1e-3;
  std::vector<double> xs(1 << 18);
  for (auto& x : xs) x = sigma * rng.normal();
  const auto sp = stats::power_spectrum(xs, dt, 1024);
  double mean = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k + 1 < sp.density.size(); ++k, ++count) mean += sp.density[k];
  mean /= static_cast<double>(count);
  EXPECT_NEAR(mean, 2.0 * sigma * sigma * dt, 0.03 * 2.0 * sigma * sigma * dt);
  EXPECT_NEAR(sp.frequency.back(), 0.5 / dt, 1e-9);
}
