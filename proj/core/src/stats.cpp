#include "bsnkit/stats.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>

#include "bsnkit/errors.hpp"

namespace bsnkit::stats {
namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};

using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;
using Plan = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

RealBuffer alloc_real(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer alloc_complex(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double variance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - mu) * (x - mu);
  return acc / static_cast<double>(xs.size());
}

Estimate batch_mean(std::span<const double> xs, std::size_t batches) {
  Estimate out{mean(xs), 0.0};
  batches = std::min(batches, xs.size());
  if (batches < 2) return out;
  const std::size_t len = xs.size() / batches;
  std::vector<double> means;
  means.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) means.push_back(mean(xs.subspan(b * len, len)));
  const double var = variance(means) * static_cast<double>(batches) / static_cast<double>(batches - 1);
  out.error = std::sqrt(var / static_cast<double>(batches));
  return out;
}

std::vector<double> autocorrelation(std::span<const double> xs, std::size_t max_lag) {
  const std::size_t n = xs.size();
  if (n < 2) throw NumericalError("autocorrelation: need at least two samples");
  max_lag = std::min(max_lag, n);
  const std::size_t m = next_pow2(2 * n);
  auto in = alloc_real(m);
  auto spec = alloc_complex(m / 2 + 1);
  const double mu = mean(xs);
  for (std::size_t i = 0; i < n; ++i) in[i] = xs[i] - mu;
  std::fill(in.get() + n, in.get() + m, 0.0);

  Plan fwd(fftw_plan_dft_r2c_1d(static_cast<int>(m), in.get(), spec.get(), FFTW_ESTIMATE));
  fftw_execute(fwd.get());
  for (std::size_t k = 0; k < m / 2 + 1; ++k) {
    spec[k][0] = spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1];
    spec[k][1] = 0.0;
  }
  Plan inv(fftw_plan_dft_c2r_1d(static_cast<int>(m), spec.get(), in.get(), FFTW_ESTIMATE));
  fftw_execute(inv.get());

  std::vector<double> acf(max_lag);
  const double c0 = in[0] / static_cast<double>(n);
  if (c0 <= 0.0) throw NumericalError("autocorrelation: constant series");
  for (std::size_t k = 0; k < max_lag; ++k) {
    acf[k] = in[k] / static_cast<double>(n - k) / c0;
  }
  return acf;
}

double correlation_time(std::span<const double> xs, double sample_interval) {
  const auto acf = autocorrelation(xs, xs.size() / 2);
  const double threshold = std::exp(-1.0);
  for (std::size_t k = 1; k < acf.size(); ++k) {
    if (acf[k] < threshold) {
      const double frac = (acf[k - 1] - threshold) / (acf[k - 1] - acf[k]);
      return (static_cast<double>(k - 1) + frac) * sample_interval;
    }
  }
  throw NumericalError("correlation_time: autocorrelation stays above 1/e within half the record");
}

Line fit_line(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = std::min(xs.size(), ys.size());
  if (n < 2) throw NumericalError("fit_line: need at least two points");
  const double mx = mean(xs.first(n));
  const double my = mean(ys.first(n));
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw NumericalError("fit_line: degenerate abscissa");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

double inverse_slope_at_zero(std::span<const double> xs, std::span<const double> ys,
                             double window) {
  const std::size_t n = std::min(xs.size(), ys.size());
  bool crossing = false;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((ys[i] <= 0.0 && ys[i + 1] >= 0.0) || (ys[i] >= 0.0 && ys[i + 1] <= 0.0)) crossing = true;
  }
  if (!crossing) throw NumericalError("no zero crossing in sweep");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(ys[i]) < window) {
      lx.push_back(xs[i]);
      ly.push_back(ys[i]);
    }
  }
  if (lx.size() < 2) throw NumericalError("fewer than two points in the linear region");
  const Line line = fit_line(lx, ly);
  if (line.slope == 0.0) throw NumericalError("zero slope at crossing");
  return 1.0 / line.slope;
}

Spectrum power_spectrum(std::span<const double> xs, double sample_interval,
                        std::size_t segment_length) {
  std::size_t len = next_pow2(segment_length);
  if (len > xs.size()) len = next_pow2(xs.size()) / 2;
  if (len < 8) throw NumericalError("power_spectrum: series too short");

  std::vector<double> window(len);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * 3.14159265358979323846 * static_cast<double>(i) /
                                     static_cast<double>(len));
    wsum2 += window[i] * window[i];
  }

  auto in = alloc_real(len);
  auto out = alloc_complex(len / 2 + 1);
  Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE));

  Spectrum s;
  s.frequency.resize(len / 2 + 1);
  s.density.assign(len / 2 + 1, 0.0);
  const double fs = 1.0 / sample_interval;
  for (std::size_t k = 0; k < s.frequency.size(); ++k) {
    s.frequency[k] = static_cast<double>(k) * fs / static_cast<double>(len);
  }

  std::size_t segments = 0;
  for (std::size_t start = 0; start + len <= xs.size(); start += len / 2) {
    const double mu = mean(xs.subspan(start, len));
    for (std::size_t i = 0; i < len; ++i) in[i] = (xs[start + i] - mu) * window[i];
    fftw_execute(plan.get());
    for (std::size_t k = 0; k < s.density.size(); ++k) {
      s.density[k] += out[k][0] * out[k][0] + out[k][1] * out[k][1];
    }
    ++segments;
  }
  const double scale = 1.0 / (fs * wsum2 * static_cast<double>(segments));
  for (std::size_t k = 0; k < s.density.size(); ++k) {
    const bool edge = (k == 0 || k == s.density.size() - 1);
    s.density[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return s;
}

}  // namespace bsnkit::stats
