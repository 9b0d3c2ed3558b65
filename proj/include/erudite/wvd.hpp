#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/fft.hpp"
#include "erudite/signal.hpp"

namespace erudite::dsp {

// Time-frequency energy image. energy is row-major [n_time x n_freq], cells in
// unit^2/Hz; integrating cells * dt * df recovers the (demeaned) window energy
// up to smoothing losses.
struct TfImage {
  std::vector<double> energy;
  std::vector<double> time_axis_s;
  std::vector<double> freq_axis_hz;
  std::size_t n_time = 0;
  std::size_t n_freq = 0;

  double at(std::size_t t, std::size_t f) const { return energy[t * n_freq + f]; }
  double& at(std::size_t t, std::size_t f) { return energy[t * n_freq + f]; }

  // Frequency with the largest energy at time index t.
  double argmax_freq_at(std::size_t t) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < n_freq; ++k) {
      if (at(t, k) > at(t, best)) best = k;
    }
    return freq_axis_hz[best];
  }
};

namespace detail {

inline std::vector<double> gaussian_kernel(std::size_t length) {
  // length is odd; the kernel spans +-3 sigma.
  std::vector<double> k(length);
  const double half = static_cast<double>(length - 1) / 2.0;
  const double sigma = std::max(half / 3.0, 1e-9);
  double sum = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double d = (static_cast<double>(i) - half) / sigma;
    k[i] = std::exp(-0.5 * d * d);
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// 1-D convolution along one axis of the image with edge renormalisation, so
// row/column sums are preserved up to the truncated tails.
inline void smooth_axis(TfImage& img, const std::vector<double>& kernel, bool along_time) {
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
  const std::size_t nt = img.n_time, nf = img.n_freq;
  std::vector<double> line(along_time ? nt : nf);
  std::vector<double> smoothed(line.size());
  const std::size_t n_lines = along_time ? nf : nt;
  for (std::size_t li = 0; li < n_lines; ++li) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      line[i] = along_time ? img.at(i, li) : img.at(li, i);
    }
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(line.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      double acc = 0.0, wsum = 0.0;
      for (std::ptrdiff_t j = -half; j <= half; ++j) {
        const std::ptrdiff_t p = i + j;
        if (p < 0 || p >= n) continue;
        const double kv = kernel[static_cast<std::size_t>(j + half)];
        acc += kv * line[static_cast<std::size_t>(p)];
        wsum += kv;
      }
      smoothed[static_cast<std::size_t>(i)] = wsum > 0.0 ? acc / wsum : 0.0;
    }
    for (std::size_t i = 0; i < line.size(); ++i) {
      (along_time ? img.at(i, li) : img.at(li, i)) = smoothed[i];
    }
  }
}

}  // namespace detail

// Smoothed Wigner-Ville distribution of one analysis window.
//
// Pipeline: demean -> analytic signal -> discrete WVD over even lags with a
// Gaussian lag taper (the frequency smoothing; a Gaussian window has no
// sidelobes, which is what suppresses the oscillatory cross-term interference
// of the raw distribution) -> Gaussian smoothing along time -> clamp the small
// negative residuals that remain. freq_smoothing is the equivalent kernel
// length in frequency bins, time_smoothing the kernel length in samples. The
// taper width shrinks near the window edges where fewer lags are available.
//
// Frequency axis: fs/(2*M) spacing over [0, fs/2), M the padded lag count.
inline TfImage smoothed_wvd(const Window& w,
                            std::size_t time_smoothing = 31,
                            std::size_t freq_smoothing = 7) {
  if (!(w.fs > 0.0)) throw parameter_error("smoothed_wvd: window has no sampling rate");
  if (time_smoothing < 1 || time_smoothing % 2 == 0 ||
      freq_smoothing < 1 || freq_smoothing % 2 == 0) {
    throw parameter_error("smoothed_wvd: smoothing lengths must be odd and >= 1");
  }
  const std::size_t n = w.samples.size();
  if (n < 2) throw insufficient_data_error("smoothed_wvd: window too short");

  double mean = 0.0;
  for (double v : w.samples) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = w.samples[i] - mean;

  const auto z = analytic_signal(x);
  const std::size_t m_fft = detail::next_pow2(n);

  TfImage img;
  img.n_time = n;
  img.n_freq = m_fft;
  img.energy.assign(n * m_fft, 0.0);
  img.time_axis_s.resize(n);
  img.freq_axis_hz.resize(m_fft);
  for (std::size_t t = 0; t < n; ++t) {
    img.time_axis_s[t] = w.start_time_s + static_cast<double>(t) / w.fs;
  }
  const double df = w.fs / (2.0 * static_cast<double>(m_fft));
  for (std::size_t k = 0; k < m_fft; ++k) img.freq_axis_hz[k] = static_cast<double>(k) * df;

  // Lag-domain sigma equivalent to a frequency-domain Gaussian whose kernel
  // spans freq_smoothing bins (sigma_f = bins/6).
  const double sigma_f_bins = std::max(static_cast<double>(freq_smoothing) / 6.0, 1e-3);
  const double sigma_lag = static_cast<double>(m_fft) / (2.0 * M_PI * sigma_f_bins);

  // K(t, m) = g(m) * z[t+m] * conj(z[t-m]); lag m maps to FFT slot (m mod M).
  // g(0) == 1 keeps the time marginal (and so the total energy) intact.
  std::vector<cplx> lags(m_fft);
  const double scale = 1.0 / w.fs;
  for (std::size_t t = 0; t < n; ++t) {
    std::fill(lags.begin(), lags.end(), cplx(0, 0));
    const std::size_t max_lag = std::min({t, n - 1 - t, m_fft / 2 - 1});
    const double sigma_eff =
        std::max(1.0, std::min(sigma_lag, static_cast<double>(max_lag) / 3.0));
    lags[0] = z[t] * std::conj(z[t]);
    for (std::size_t m = 1; m <= max_lag; ++m) {
      const double d = static_cast<double>(m) / sigma_eff;
      const double g = std::exp(-0.5 * d * d);
      const cplx k = z[t + m] * std::conj(z[t - m]) * g;
      lags[m] = k;
      lags[m_fft - m] = std::conj(k);
    }
    fft(lags, false);
    for (std::size_t k = 0; k < m_fft; ++k) img.at(t, k) = lags[k].real() * scale;
  }

  if (time_smoothing > 1) detail::smooth_axis(img, detail::gaussian_kernel(time_smoothing), true);
  for (auto& v : img.energy) v = std::max(v, 0.0);
  return img;
}

// Integral of the image, unit^2: sum of cells * dt * df.
inline double tf_total_energy(const TfImage& img, double fs) {
  double acc = 0.0;
  for (double v : img.energy) acc += v;
  const double df = img.freq_axis_hz.size() > 1 ? img.freq_axis_hz[1] - img.freq_axis_hz[0] : 0.0;
  return acc * df / fs;
}

}  // namespace erudite::dsp
