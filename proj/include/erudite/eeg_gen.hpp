#pragma once

#include <cmath>
#include <vector>

#include "erudite/classify.hpp"
#include "erudite/errors.hpp"
#include "erudite/participant.hpp"
#include "erudite/rng.hpp"
#include "erudite/signal.hpp"

namespace erudite::sim {

// Synthetic EEG calibrated so that the dsp pipeline reads the intended band
// powers back out:
//   10-25 Hz mean PSD density ~= 0.127 unit^2/Hz in the not-learning state and
//   0.127 * 1.7652 when learning; 0.5-8 Hz density ~= 0.30 when alert and
//   double that when drowsy. A VR stage adds broadband 25-40 Hz content and a
//   stronger wideband floor, which raises the signal's fractal dimension.
//
// The signal is a bed of sinusoids on a 0.5 Hz grid (every tone lands exactly
// on a periodogram bin of a 4 s window, so the measured densities match the
// designed ones) plus a 1/f tone background and a small white floor.
inline constexpr double kNotLearningBandDensity = 0.127;   // unit^2/Hz over 10-25 Hz
inline constexpr double kLearningBandRatio = 1.7652;       // learning vs not-learning
inline constexpr double kAlertLowBandDensity = 0.30;       // unit^2/Hz over 0.5-8 Hz
inline constexpr double kDrowsyLowBandRatio = 2.0;
inline constexpr double kBackgroundLevel = 0.10;           // 1/f density at 1 Hz
inline constexpr double kVrBroadbandPower = 1.0;           // unit^2 spread over 25-40 Hz
inline constexpr double kToneGridHz = 0.5;

namespace detail {

struct Tone {
  double freq = 0.0;
  double amp = 0.0;
  double phase = 0.0;
};

// Power carried by periodogram bins inside [lo, hi] of a 4 s window, given
// the density target: the band holds round((hi-lo)/0.25)+1 bins of 0.25 Hz.
inline double band_total_power(double density, double lo, double hi) {
  const double bins = std::round((hi - lo) / 0.25) + 1.0;
  return density * bins * 0.25;
}

inline void add_band_tones(std::vector<Tone>& tones, double lo, double hi, double total_power,
                           Rng& rng) {
  const int n = static_cast<int>(std::round((hi - lo) / kToneGridHz)) + 1;
  const double per_tone = std::max(total_power, 0.0) / n;
  for (int i = 0; i < n; ++i) {
    // Phases are always drawn so the stream stays aligned across states.
    const double phase = rng.uniform(0.0, 2.0 * M_PI);
    tones.push_back({lo + i * kToneGridHz, std::sqrt(2.0 * per_tone), phase});
  }
}

}  // namespace detail

inline dsp::SampleBuffer generate_eeg(const inference::MentalState& state, double duration_s,
                                      double fs, const ParticipantProfile& profile, Rng& rng,
                                      Presentation presentation = Presentation::two_d) {
  if (!(duration_s > 0.0)) throw parameter_error("generate_eeg: duration must be positive");
  if (!(fs > 90.0)) throw parameter_error("generate_eeg: sampling rate must exceed 90 Hz");
  inference::validate(state, "generate_eeg");
  validate(profile);

  const double white_sigma = presentation == Presentation::vr ? 0.15 : 0.05;
  const double white_density = 2.0 * white_sigma * white_sigma / fs;

  std::vector<detail::Tone> tones;

  // 1/f background over 0.5..40 Hz; its in-band share is subtracted from the
  // dedicated band components below.
  double bg_high = 0.0, bg_low = 0.0;
  for (double f = kToneGridHz; f <= 40.0 + 1e-9; f += kToneGridHz) {
    const double power = kBackgroundLevel / f * kToneGridHz;
    tones.push_back({f, std::sqrt(2.0 * power), rng.uniform(0.0, 2.0 * M_PI)});
    if (f >= inference::kLsBandLoHz && f <= inference::kLsBandHiHz) bg_high += power;
    if (f >= inference::kDsBandLoHz && f <= inference::kDsBandHiHz) bg_low += power;
  }

  // Learning band 10-25 Hz.
  const double high_density =
      kNotLearningBandDensity * (state.ls == 1 ? kLearningBandRatio : 1.0);
  const double high_total =
      detail::band_total_power(high_density - white_density, inference::kLsBandLoHz,
                               inference::kLsBandHiHz) -
      bg_high;
  detail::add_band_tones(tones, inference::kLsBandLoHz, inference::kLsBandHiHz, high_total, rng);

  // Drowsiness band 0.5-8 Hz.
  const double low_density = kAlertLowBandDensity * (state.ds == 0 ? kDrowsyLowBandRatio : 1.0);
  const double low_total =
      detail::band_total_power(low_density - white_density, inference::kDsBandLoHz,
                               inference::kDsBandHiHz) -
      bg_low;
  detail::add_band_tones(tones, inference::kDsBandLoHz, inference::kDsBandHiHz, low_total, rng);

  // Broadband VR engagement content above the learning band. The tones are
  // drawn either way to keep the random stream aligned between modes.
  std::vector<detail::Tone> vr_tones;
  detail::add_band_tones(vr_tones, 25.5, 40.0, kVrBroadbandPower, rng);
  if (presentation == Presentation::vr) {
    tones.insert(tones.end(), vr_tones.begin(), vr_tones.end());
  }

  dsp::SampleBuffer out;
  out.fs = fs;
  out.channel_label = "F3F4";
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  out.samples.assign(n, 0.0);
  const double omega = 2.0 * M_PI / fs;
  for (const auto& tone : tones) {
    const double w = omega * tone.freq;
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] += tone.amp * std::sin(w * static_cast<double>(i) + tone.phase);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.samples[i] = profile.amplitude_scale * (out.samples[i] + white_sigma * rng.gaussian());
  }
  return out;
}

}  // namespace erudite::sim
