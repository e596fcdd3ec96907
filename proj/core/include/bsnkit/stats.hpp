#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bsnkit::stats {

struct Estimate {
  double mean = 0.0;
  double error = 0.0;  // standard error of the mean
};

double mean(std::span<const double> xs);
double variance(std::span<const double> xs);  // population variance

// Standard error from non-overlapping batch means; robust to serial correlation
// as long as each batch is several correlation times long.
Estimate batch_mean(std::span<const double> xs, std::size_t batches = 32);

// Normalized autocorrelation C(k) = <dx_i dx_{i+k}> / <dx^2> for k < max_lag,
// computed by zero-padded FFT. C(0) == 1.
std::vector<double> autocorrelation(std::span<const double> xs, std::size_t max_lag);

// First lag where the normalized autocorrelation falls below 1/e, linearly
// interpolated between neighbouring lags, times the sample interval.
// Throws NumericalError if the crossing is not found within half the record.
double correlation_time(std::span<const double> xs, double sample_interval);

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
};

Line fit_line(std::span<const double> xs, std::span<const double> ys);

// Inverse slope d y/d x at the zero crossing of y, from a least-squares line
// over the points with |y| < window. Requires a sign change in y.
double inverse_slope_at_zero(std::span<const double> xs, std::span<const double> ys,
                             double window = 0.3);

struct Spectrum {
  std::vector<double> frequency;  // Hz
  std::vector<double> density;    // one-sided PSD, units^2/Hz
};

// Welch estimate with Hann windows, 50% overlap, segment length a power of two.
Spectrum power_spectrum(std::span<const double> xs, double sample_interval,
                        std::size_t segment_length);

}  // namespace bsnkit::stats
