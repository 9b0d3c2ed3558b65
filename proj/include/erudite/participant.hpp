#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/rl.hpp"
#include "erudite/rng.hpp"
#include "erudite/ssq.hpp"
#include "erudite/state.hpp"

namespace erudite::sim {

enum class Presentation { two_d, vr, rest };

inline std::string presentation_name(Presentation p) {
  switch (p) {
    case Presentation::two_d: return "2D";
    case Presentation::vr: return "VR";
    case Presentation::rest: return "break";
  }
  return "?";
}

// Stochastic simulated human. All fields except the id, the amplitude scale
// and the seed are probabilities in [0, 1].
struct ParticipantProfile {
  std::string id = "p1";

  double base_learning_prob = 0.35;      // P(ls=1) per stage under 2D
  double vr_learning_gain = 0.40;        // added to the above under VR
  double vr_ssq_susceptibility = 0.20;   // P(ssq -> dizzy) per VR stage
  double drowsiness_drift = 0.25;        // P(alert -> drowsy) per stage without intervention
  double break_recovery = 0.90;          // P(a break clears drowsiness / sickness)
  double content_refresh_recovery = 0.80;  // P(content change restores alertness)
  double vr_engagement_recovery = 0.70;    // P(switching to VR restores alertness)
  double vr_off_ssq_recovery = 0.90;     // P(leaving VR clears sickness)
  double ssq_natural_recovery = 0.30;    // P(sickness fades during a 2D stage)
  double drowsy_ls_penalty = 0.25;       // learning-prob penalty while drowsy
  double sick_ls_penalty = 0.30;         // learning-prob penalty while dizzy
  double quiz_skill = 0.40;              // base per-question success probability
  double quiz_ls_bonus = 0.45;           // added, scaled by the stage's learning fraction

  double amplitude_scale = 1.0;  // scales the synthetic EEG amplitude
  std::uint64_t rng_seed = 1;
};

inline void validate(const ParticipantProfile& p) {
  const double probs[] = {
      p.base_learning_prob, p.vr_learning_gain, p.vr_ssq_susceptibility, p.drowsiness_drift,
      p.break_recovery, p.content_refresh_recovery, p.vr_engagement_recovery,
      p.vr_off_ssq_recovery, p.ssq_natural_recovery, p.drowsy_ls_penalty, p.sick_ls_penalty,
      p.quiz_skill, p.quiz_ls_bonus,
  };
  for (double v : probs) {
    if (v < 0.0 || v > 1.0) {
      throw config_error("participant '" + p.id + "': probabilities must be in [0, 1]");
    }
  }
  if (!(p.amplitude_scale > 0.0)) {
    throw config_error("participant '" + p.id + "': amplitude_scale must be positive");
  }
}

// Presentation change implied by an adaptation action. `resume_to` remembers
// the mode a break interrupted.
inline Presentation apply_action_presentation(Presentation current, rl::Action action,
                                              Presentation& resume_to) {
  if (current != Presentation::rest) resume_to = current;
  switch (action) {
    case rl::Action::give_break: return Presentation::rest;
    case rl::Action::enable_vr: return Presentation::vr;
    case rl::Action::disable_vr: return Presentation::two_d;
    case rl::Action::change_content:
    case rl::Action::no_change:
      return current == Presentation::rest ? resume_to : current;
  }
  throw validation_error("apply_action_presentation: bad action");
}

// One stage-to-stage transition of the underlying mental state, given the
// action just taken and the presentation mode of the upcoming stage.
//
//   a1 clears drowsiness and sickness with break_recovery each.
//   a2 / a4 restore alertness with their recovery probabilities; staying put
//   (a3 / a5) lets alertness drift down.
//   Any VR stage risks sickness with vr_ssq_susceptibility; leaving VR or
//   resting clears it with the corresponding recovery probability.
//   The learning bit is redrawn each stage from the presentation mode minus
//   penalties for entering the stage drowsy or dizzy; a break teaches nothing.
inline inference::MentalState participant_transition(const ParticipantProfile& profile,
                                                     const inference::MentalState& current,
                                                     rl::Action action,
                                                     Presentation next_presentation, Rng& rng) {
  inference::validate(current, "participant_transition");
  inference::MentalState next = current;

  // Drowsiness.
  switch (action) {
    case rl::Action::give_break:
      if (current.ds == 0 && rng.bernoulli(profile.break_recovery)) next.ds = 1;
      break;
    case rl::Action::change_content:
      if (current.ds == 0 && rng.bernoulli(profile.content_refresh_recovery)) next.ds = 1;
      break;
    case rl::Action::enable_vr:
      if (current.ds == 0 && rng.bernoulli(profile.vr_engagement_recovery)) next.ds = 1;
      break;
    case rl::Action::disable_vr:
    case rl::Action::no_change:
      if (current.ds == 1 && rng.bernoulli(profile.drowsiness_drift)) next.ds = 0;
      break;
  }

  // Simulator sickness.
  if (action == rl::Action::give_break) {
    if (current.ssq == 0 && rng.bernoulli(profile.break_recovery)) next.ssq = 1;
  } else if (next_presentation == Presentation::vr) {
    if (current.ssq == 1 && rng.bernoulli(profile.vr_ssq_susceptibility)) next.ssq = 0;
  } else if (current.ssq == 0) {
    const double recovery = action == rl::Action::disable_vr ? profile.vr_off_ssq_recovery
                                                             : profile.ssq_natural_recovery;
    if (rng.bernoulli(recovery)) next.ssq = 1;
  }

  // Learning.
  double p_ls = profile.base_learning_prob;
  if (next_presentation == Presentation::vr) p_ls += profile.vr_learning_gain;
  if (next.ds == 0) p_ls -= profile.drowsy_ls_penalty;
  if (next.ssq == 0) p_ls -= profile.sick_ls_penalty;
  if (next_presentation == Presentation::rest) p_ls = 0.0;
  next.ls = rng.bernoulli(std::clamp(p_ls, 0.0, 1.0)) ? 1 : 0;

  return next;
}

// End-of-stage quiz: 10 questions, each answered correctly with probability
// quiz_skill plus the learning bonus scaled by the fraction of windows the
// stage spent in the learning state.
inline int quiz(const ParticipantProfile& profile, const std::vector<int>& ls_history, Rng& rng) {
  double fraction = 0.0;
  if (!ls_history.empty()) {
    for (int v : ls_history) fraction += v != 0 ? 1.0 : 0.0;
    fraction /= static_cast<double>(ls_history.size());
  }
  const double p = std::clamp(profile.quiz_skill + profile.quiz_ls_bonus * fraction, 0.0, 1.0);
  return rng.binomial(10, p);
}

// Questionnaire responses consistent with the underlying sickness bit: a
// dizzy participant reports strong disorientation symptoms (total severity
// well above the threshold), a comfortable one scatters a few mild ones.
inline inference::SsqResponse simulate_ssq_response(int ssq_bit, Rng& rng) {
  inference::SsqResponse r;
  if (ssq_bit == 0) {
    r.severities[4] = 2;                                    // difficulty focusing
    r.severities[7] = 2;                                    // nausea
    r.severities[9] = 2;                                    // fullness of head
    r.severities[10] = 2;                                   // blurred vision
    r.severities[11] = 2 + static_cast<int>(rng.uniform_index(2));  // dizzy (eyes open)
    r.severities[12] = 2 + static_cast<int>(rng.uniform_index(2));  // dizzy (eyes closed)
    r.severities[13] = 2 + static_cast<int>(rng.uniform_index(2));  // vertigo
  } else {
    // A few mild symptoms at most keeps the total severity under the threshold.
    const auto n_mild = rng.uniform_index(4);
    for (std::uint64_t i = 0; i < n_mild; ++i) {
      r.severities[rng.uniform_index(inference::kSsqSymptomCount)] = 1;
    }
  }
  return r;
}

}  // namespace erudite::sim
