#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "erudite/errors.hpp"

namespace erudite::dsp {

// Uniformly sampled single-channel EEG series, values in microvolts.
struct SampleBuffer {
  std::vector<double> samples;
  double fs = 0.0;  // Hz
  std::string channel_label;

  double duration_s() const {
    return fs > 0.0 ? static_cast<double>(samples.size()) / fs : 0.0;
  }
};

inline void validate(const SampleBuffer& buf, const char* who) {
  if (!(buf.fs > 0.0)) throw parameter_error(std::string(who) + ": sampling rate must be positive");
  for (double v : buf.samples) {
    if (!std::isfinite(v)) throw validation_error(std::string(who) + ": non-finite sample");
  }
}

// Analysis window: exactly round(4*fs) samples, hop 3 s (4 s window, 1 s overlap).
struct Window {
  std::vector<double> samples;
  double start_time_s = 0.0;
  double fs = 0.0;
};

inline constexpr double kWindowSeconds = 4.0;
inline constexpr double kWindowHopSeconds = 3.0;

inline std::size_t window_length_samples(double fs) {
  return static_cast<std::size_t>(std::llround(kWindowSeconds * fs));
}

// Slice a buffer into 4 s windows with 1 s overlap (window k starts at 3k s).
// Buffers shorter than one window yield an empty list.
inline std::vector<Window> segment_windows(const SampleBuffer& buf) {
  validate(buf, "segment_windows");
  const std::size_t win = window_length_samples(buf.fs);
  const std::size_t hop = static_cast<std::size_t>(std::llround(kWindowHopSeconds * buf.fs));
  std::vector<Window> out;
  if (win == 0 || hop == 0 || buf.samples.size() < win) return out;
  const std::size_t count = (buf.samples.size() - win) / hop + 1;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    Window w;
    w.fs = buf.fs;
    w.start_time_s = static_cast<double>(k) * kWindowHopSeconds;
    const auto begin = buf.samples.begin() + static_cast<std::ptrdiff_t>(k * hop);
    w.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(win));
    out.push_back(std::move(w));
  }
  return out;
}

namespace detail {

// Second-order IIR section, direct form II transposed.
struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0, a1 = 0, a2 = 0;

  void apply(std::vector<double>& x) const {
    double z1 = 0.0, z2 = 0.0;
    for (double& v : x) {
      const double in = v;
      const double out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      v = out;
    }
  }
};

// RBJ cookbook biquads for one Butterworth second-order section.
inline Biquad butterworth_section(double f0, double fs, double q, bool highpass) {
  const double w0 = 2.0 * M_PI * f0 / fs;
  const double cw = std::cos(w0);
  const double alpha = std::sin(w0) / (2.0 * q);
  const double a0 = 1.0 + alpha;
  Biquad s;
  if (highpass) {
    s.b0 = (1.0 + cw) / 2.0 / a0;
    s.b1 = -(1.0 + cw) / a0;
    s.b2 = s.b0;
  } else {
    s.b0 = (1.0 - cw) / 2.0 / a0;
    s.b1 = (1.0 - cw) / a0;
    s.b2 = s.b0;
  }
  s.a1 = -2.0 * cw / a0;
  s.a2 = (1.0 - alpha) / a0;
  return s;
}

// Order-4 Butterworth = cascade of two sections with these Q values.
inline constexpr double kButterQ1 = 0.54119610014619698;
inline constexpr double kButterQ2 = 1.30656296487637653;

inline void filter_cascade_once(std::vector<double>& x, const std::vector<Biquad>& sections) {
  for (const auto& s : sections) s.apply(x);
}

// Zero-phase forward-backward filtering with symmetric edge padding. The
// mirrored pads keep the local mean unchanged across the junctions, which
// matters for the very low high-pass cut-off: a displaced pad mean would ring
// back into the buffer ends.
inline std::vector<double> filtfilt(const std::vector<double>& x,
                                    const std::vector<Biquad>& sections,
                                    std::size_t pad) {
  pad = std::min(pad, x.empty() ? std::size_t{0} : x.size() - 1);
  std::vector<double> ext;
  ext.reserve(x.size() + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(x[x.size() - 1 - i]);

  filter_cascade_once(ext, sections);
  std::reverse(ext.begin(), ext.end());
  filter_cascade_once(ext, sections);
  std::reverse(ext.begin(), ext.end());

  return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                             ext.begin() + static_cast<std::ptrdiff_t>(pad + x.size()));
}

}  // namespace detail

// Minimum buffer length accepted by band_limit: roughly one period of the
// low cut-off so the zero-phase pass has something to settle on.
inline std::size_t band_limit_settling_samples(double fs, double lo) {
  return static_cast<std::size_t>(std::ceil(fs / lo));
}

// Band-limit a buffer to [lo, hi] Hz with a zero-phase order-4 Butterworth
// pass in each direction (high-pass at lo, low-pass at hi). Output has the
// same length, rate and label; stop-band content is attenuated well past
// 20 dB relative to the pass-band.
inline SampleBuffer band_limit(const SampleBuffer& buf, double lo = 0.5, double hi = 40.0) {
  validate(buf, "band_limit");
  if (!(lo > 0.0) || !(lo < hi) || !(hi < buf.fs / 2.0)) {
    throw parameter_error("band_limit: band must satisfy 0 < lo < hi < fs/2");
  }
  if (buf.samples.size() < band_limit_settling_samples(buf.fs, lo)) {
    throw insufficient_data_error("band_limit: buffer shorter than filter settling length");
  }
  const std::vector<detail::Biquad> sections = {
      detail::butterworth_section(lo, buf.fs, detail::kButterQ1, true),
      detail::butterworth_section(lo, buf.fs, detail::kButterQ2, true),
      detail::butterworth_section(hi, buf.fs, detail::kButterQ1, false),
      detail::butterworth_section(hi, buf.fs, detail::kButterQ2, false),
  };
  const auto pad = static_cast<std::size_t>(std::ceil(3.0 * buf.fs / lo));
  SampleBuffer out;
  out.fs = buf.fs;
  out.channel_label = buf.channel_label;
  out.samples = detail::filtfilt(buf.samples, sections, pad);
  return out;
}

// Artifact-removal slot in the preprocessing pipeline. Real deployments put a
// multichannel ICA stage here; the single-channel library keeps the slot as an
// identity pass so pipeline code stays shaped the same.
inline SampleBuffer remove_artifacts(const SampleBuffer& buf) { return buf; }

}  // namespace erudite::dsp
