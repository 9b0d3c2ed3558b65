#pragma once

#include <array>
#include <cmath>
#include <string_view>

#include "erudite/errors.hpp"

namespace erudite::inference {

// Simulator Sickness Questionnaire: 16 symptoms rated 0 (none) .. 3 (severe).
inline constexpr std::size_t kSsqSymptomCount = 16;

inline constexpr std::array<std::string_view, kSsqSymptomCount> kSsqSymptoms = {
    "general discomfort",
    "fatigue",
    "headache",
    "eye strain",
    "difficulty focusing",
    "increased salivation",
    "sweating",
    "nausea",
    "concentrating",
    "fullness of head",
    "blurred vision",
    "dizzy (eyes open)",
    "dizzy (eyes closed)",
    "vertigo",
    "stomach awareness",
    "burping",
};

// Subfactor membership per symptom row: {nausea, oculomotor, disorientation}.
inline constexpr std::array<std::array<int, 3>, kSsqSymptomCount> kSsqSubfactorWeights = {{
    {1, 1, 0},  // general discomfort
    {0, 1, 0},  // fatigue
    {0, 1, 0},  // headache
    {0, 1, 0},  // eye strain
    {0, 1, 1},  // difficulty focusing
    {1, 0, 0},  // increased salivation
    {1, 0, 0},  // sweating
    {1, 0, 1},  // nausea
    {1, 1, 0},  // concentrating
    {0, 0, 1},  // fullness of head
    {0, 1, 1},  // blurred vision
    {0, 0, 1},  // dizzy (eyes open)
    {0, 0, 1},  // dizzy (eyes closed)
    {0, 0, 1},  // vertigo
    {1, 0, 0},  // stomach awareness
    {1, 0, 0},  // burping
}};

inline constexpr double kSsqNauseaScale = 9.54;
inline constexpr double kSsqOculomotorScale = 7.58;
inline constexpr double kSsqDisorientationScale = 13.92;
inline constexpr double kSsqTotalScale = 3.74;

// Highest reachable total severity: all 16 symptoms at 3 gives subfactor
// totals of 21 each, (21+21+21) * 3.74.
inline constexpr double kSsqTotalSeverityMax = 235.62;

// Threshold recommended as TS_max / 4.
inline constexpr double kSsqDefaultThreshold = kSsqTotalSeverityMax / 4.0;

struct SsqResponse {
  std::array<int, kSsqSymptomCount> severities{};
};

struct SsqScore {
  int n_t = 0;  // raw subfactor totals
  int o_t = 0;
  int d_t = 0;
  double n = 0.0;  // scaled subfactor scores
  double o = 0.0;
  double d = 0.0;
  double ts = 0.0;  // total severity
};

inline SsqScore ssq_score(const SsqResponse& r) {
  SsqScore s;
  for (std::size_t i = 0; i < kSsqSymptomCount; ++i) {
    const int sev = r.severities[i];
    if (sev < 0 || sev > 3) {
      throw validation_error("ssq_score: severity out of range 0..3 for symptom '" +
                             std::string(kSsqSymptoms[i]) + "'");
    }
    s.n_t += kSsqSubfactorWeights[i][0] * sev;
    s.o_t += kSsqSubfactorWeights[i][1] * sev;
    s.d_t += kSsqSubfactorWeights[i][2] * sev;
  }
  s.n = s.n_t * kSsqNauseaScale;
  s.o = s.o_t * kSsqOculomotorScale;
  s.d = s.d_t * kSsqDisorientationScale;
  s.ts = (s.n_t + s.o_t + s.d_t) * kSsqTotalScale;
  return s;
}

// Binary SSQ state: 0 (dizzy) when total severity strictly exceeds the
// threshold, 1 (not dizzy) otherwise.
inline int ssq_binary(const SsqScore& score, double threshold = kSsqDefaultThreshold) {
  if (!(threshold > 0.0) || threshold > kSsqTotalSeverityMax) {
    throw parameter_error("ssq_binary: threshold must be in (0, 235.62]");
  }
  return score.ts > threshold ? 0 : 1;
}

}  // namespace erudite::inference
