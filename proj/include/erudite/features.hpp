#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/fft.hpp"
#include "erudite/signal.hpp"

namespace erudite::dsp {

// Mean PSD density over a frequency band, unit^2 per Hz. `total_power` is the
// integrated in-band power before the density normalisation and `n_bins` the
// number of periodogram bins that fell inside the band (both are what the
// Parseval-style checks want to see).
struct BandPower {
  double value = 0.0;  // mean PSD density over [lo, hi]
  double lo_hz = 0.0;
  double hi_hz = 0.0;
  double total_power = 0.0;
  std::size_t n_bins = 0;
};

inline BandPower band_power(const Window& w, double lo = 10.0, double hi = 25.0) {
  if (!(w.fs > 0.0)) throw parameter_error("band_power: window has no sampling rate");
  if (!(lo > 0.0) || !(lo < hi) || !(hi < w.fs / 2.0)) {
    throw parameter_error("band_power: band must satisfy 0 < lo < hi < fs/2");
  }
  const auto pg = periodogram_psd(w.samples, w.fs);
  BandPower bp;
  bp.lo_hz = lo;
  bp.hi_hz = hi;
  for (std::size_t k = 0; k < pg.freqs_hz.size(); ++k) {
    const double f = pg.freqs_hz[k];
    if (f >= lo && f <= hi) {
      bp.total_power += pg.psd[k] * pg.bin_hz;
      ++bp.n_bins;
    }
  }
  if (bp.n_bins > 0) {
    bp.value = bp.total_power / (static_cast<double>(bp.n_bins) * pg.bin_hz);
  }
  return bp;
}

// Autoregressive fit, Yule-Walker with unbiased autocorrelation estimates.
// Convention: x[t] = sum_i coeffs[i] * x[t-1-i] + e[t]. A constant (or empty
// of information) window cannot be fit; it returns zeros with the flag set.
struct ArResult {
  std::array<double, 5> coeffs{};
  bool degenerate = false;
};

inline ArResult ar_features(const Window& w, std::size_t order = 5) {
  const std::size_t n = w.samples.size();
  if (order == 0 || order > 5) throw parameter_error("ar_features: order must be 1..5");
  if (n <= order) throw insufficient_data_error("ar_features: window shorter than AR order");

  double mean = 0.0, scale2 = 0.0;
  for (double v : w.samples) {
    mean += v;
    scale2 += v * v;
  }
  mean /= static_cast<double>(n);
  scale2 /= static_cast<double>(n);

  // Unbiased autocorrelation of the demeaned window.
  std::vector<double> r(order + 1, 0.0);
  for (std::size_t k = 0; k <= order; ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) {
      acc += (w.samples[t] - mean) * (w.samples[t + k] - mean);
    }
    r[k] = acc / static_cast<double>(n - k);
  }

  ArResult res;
  if (r[0] <= 1e-24 * (scale2 + 1.0)) {
    res.degenerate = true;
    return res;
  }

  // Levinson-Durbin recursion. A perfectly predictable window (e.g. a pure
  // sinusoid) drives the prediction error to zero before the full order; the
  // partial solution already solves the singular system, so stop there and
  // leave the remaining coefficients at zero.
  std::vector<double> a(order + 1, 0.0);
  double err = r[0];
  for (std::size_t i = 1; i <= order; ++i) {
    if (!(err > 1e-12 * r[0]) || !std::isfinite(err)) break;
    double acc = r[i];
    for (std::size_t j = 1; j < i; ++j) acc -= a[j] * r[i - j];
    const double k = acc / err;
    std::vector<double> next(a);
    next[i] = k;
    for (std::size_t j = 1; j < i; ++j) next[j] = a[j] - k * a[i - j];
    a = std::move(next);
    err *= (1.0 - k * k);
  }
  for (std::size_t i = 0; i < order; ++i) res.coeffs[i] = a[i + 1];
  return res;
}

// Orthonormal Haar analysis. When a level has odd length the trailing sample
// is carried into the approximation unchanged, so the transform conserves
// energy for any input length.
struct HaarDecomposition {
  std::vector<std::vector<double>> details;  // level 1 first
  std::vector<double> approx;
};

inline HaarDecomposition haar_decompose(const std::vector<double>& x, std::size_t levels) {
  HaarDecomposition out;
  std::vector<double> a = x;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t lvl = 0; lvl < levels; ++lvl) {
    const std::size_t pairs = a.size() / 2;
    std::vector<double> approx(pairs + (a.size() % 2));
    std::vector<double> detail(pairs);
    for (std::size_t i = 0; i < pairs; ++i) {
      approx[i] = (a[2 * i] + a[2 * i + 1]) * inv_sqrt2;
      detail[i] = (a[2 * i] - a[2 * i + 1]) * inv_sqrt2;
    }
    if (a.size() % 2) approx[pairs] = a.back();
    out.details.push_back(std::move(detail));
    a = std::move(approx);
  }
  out.approx = std::move(a);
  return out;
}

namespace detail {

inline double zero_crossing_rate(const std::vector<double>& c) {
  if (c.size() < 2) return 0.0;
  std::size_t crossings = 0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    if (c[i] * c[i + 1] < 0.0) ++crossings;
  }
  return static_cast<double>(crossings) / static_cast<double>(c.size() - 1);
}

// The four per-sub-band summaries: mean(|c|), variance, energy, zero-crossing rate.
inline std::array<double, 4> subband_summary(const std::vector<double>& c) {
  std::array<double, 4> f{};
  if (c.empty()) return f;
  double mean = 0.0, mean_abs = 0.0, energy = 0.0;
  for (double v : c) {
    mean += v;
    mean_abs += std::fabs(v);
    energy += v * v;
  }
  const double n = static_cast<double>(c.size());
  mean /= n;
  double var = 0.0;
  for (double v : c) var += (v - mean) * (v - mean);
  var /= n;
  f[0] = mean_abs / n;
  f[1] = var;
  f[2] = energy;
  f[3] = zero_crossing_rate(c);
  return f;
}

}  // namespace detail

inline constexpr std::size_t kWaveletLevels = 5;

// 20 wavelet features: four summaries for each of the five Haar detail
// sub-bands, ordered level 1..5.
inline std::array<double, 20> wavelet_features(const Window& w) {
  if (w.samples.size() < (std::size_t{1} << kWaveletLevels)) {
    throw insufficient_data_error("wavelet_features: window shorter than 2^levels");
  }
  const auto dec = haar_decompose(w.samples, kWaveletLevels);
  std::array<double, 20> out{};
  for (std::size_t lvl = 0; lvl < kWaveletLevels; ++lvl) {
    const auto f = detail::subband_summary(dec.details[lvl]);
    for (std::size_t j = 0; j < 4; ++j) out[lvl * 4 + j] = f[j];
  }
  return out;
}

// 4 spectral features from the window periodogram:
//   [ total power (unit^2), peak frequency (Hz), spectral centroid (Hz),
//     spectral entropy (nats; 0 for an all-zero window) ]
inline std::array<double, 4> stft_features(const Window& w) {
  if (!(w.fs > 0.0)) throw parameter_error("stft_features: window has no sampling rate");
  std::array<double, 4> out{};
  if (w.samples.empty()) return out;
  const auto pg = periodogram_psd(w.samples, w.fs);
  double total = 0.0;
  for (double p : pg.psd) total += p;
  if (!(total > 0.0)) return out;

  double peak = 0.0, peak_f = 0.0, centroid = 0.0, entropy = 0.0;
  for (std::size_t k = 0; k < pg.psd.size(); ++k) {
    if (pg.psd[k] > peak) {
      peak = pg.psd[k];
      peak_f = pg.freqs_hz[k];
    }
    centroid += pg.freqs_hz[k] * pg.psd[k];
    const double p = pg.psd[k] / total;
    if (p > 0.0) entropy -= p * std::log(p);
  }
  out[0] = total * pg.bin_hz;
  out[1] = peak_f;
  out[2] = centroid / total;
  out[3] = entropy;
  return out;
}

// The 29-dimensional window descriptor: AR(5) ++ wavelet(20) ++ STFT(4).
struct FeatureVector {
  std::array<double, 29> values{};
  bool degenerate = false;
};

inline FeatureVector feature_vector(const Window& w) {
  FeatureVector fv;
  const auto ar = ar_features(w);
  const auto wl = wavelet_features(w);
  const auto st = stft_features(w);
  fv.degenerate = ar.degenerate;
  std::size_t i = 0;
  for (double v : ar.coeffs) fv.values[i++] = v;
  for (double v : wl) fv.values[i++] = v;
  for (double v : st) fv.values[i++] = v;
  return fv;
}

}  // namespace erudite::dsp
