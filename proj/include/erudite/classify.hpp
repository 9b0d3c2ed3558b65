#pragma once

#include <functional>

#include "erudite/errors.hpp"
#include "erudite/features.hpp"

namespace erudite::inference {

// Stand-in for the trained window classifiers: a band-power threshold against
// a per-participant baseline measured during the calibration stage. `external`
// lets a caller plug any other decision function over the same input; it
// returns the classifier's output bit directly.
struct ClassifierRef {
  enum class Kind { reference_threshold, external };

  Kind kind = Kind::reference_threshold;
  double multiplier = 1.35;
  double baseline = 0.0;  // unit^2/Hz, from the baseline stage
  std::function<int(double power)> external_fn;
};

namespace detail {

inline bool exceeds_threshold(double power, const ClassifierRef& clf, const char* who) {
  if (!(clf.baseline > 0.0)) throw config_error(std::string(who) + ": baseline power must be positive");
  return power >= clf.multiplier * clf.baseline;
}

inline int run_external(double power, const ClassifierRef& clf, const char* who) {
  if (!clf.external_fn) throw config_error(std::string(who) + ": external classifier has no function");
  return clf.external_fn(power) ? 1 : 0;
}

}  // namespace detail

// Learning state from 10-25 Hz band power: 1 (learning) when the window power
// reaches multiplier * baseline. Default multiplier 1.35 sits midway between
// the no-change ratio 1.0 and the observed learning-state ratio ~1.77.
inline int classify_ls(const dsp::BandPower& window_power, const ClassifierRef& clf) {
  if (clf.kind == ClassifierRef::Kind::external) {
    return detail::run_external(window_power.value, clf, "classify_ls");
  }
  if (!(clf.multiplier > 1.0)) throw config_error("classify_ls: multiplier must exceed 1");
  return detail::exceeds_threshold(window_power.value, clf, "classify_ls") ? 1 : 0;
}

// Drowsiness state from 0.5-8 Hz band power: elevated low-band power relative
// to the alert baseline reads as drowsy (0), otherwise alert (1).
inline int classify_ds(const dsp::BandPower& window_power_low, const ClassifierRef& clf) {
  if (clf.kind == ClassifierRef::Kind::external) {
    return detail::run_external(window_power_low.value, clf, "classify_ds");
  }
  return detail::exceeds_threshold(window_power_low.value, clf, "classify_ds") ? 0 : 1;
}

inline constexpr double kLsBandLoHz = 10.0;
inline constexpr double kLsBandHiHz = 25.0;
inline constexpr double kDsBandLoHz = 0.5;
inline constexpr double kDsBandHiHz = 8.0;
inline constexpr double kDefaultLsMultiplier = 1.35;
inline constexpr double kDefaultDsMultiplier = 1.5;

}  // namespace erudite::inference
