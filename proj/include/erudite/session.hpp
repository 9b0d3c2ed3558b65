#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erudite/classify.hpp"
#include "erudite/eeg_gen.hpp"
#include "erudite/errors.hpp"
#include "erudite/features.hpp"
#include "erudite/participant.hpp"
#include "erudite/rl.hpp"
#include "erudite/signal.hpp"
#include "erudite/ssq.hpp"
#include "erudite/state.hpp"

namespace erudite::sim {

struct SessionConfig {
  double stage_len_s = 60.0;  // deployment stages are 600 s; desk scale defaults shorter
  int n_stages = 5;
  double fs = 200.0;
  double ls_multiplier = inference::kDefaultLsMultiplier;
  double ds_multiplier = inference::kDefaultDsMultiplier;
  double ssq_threshold = inference::kSsqDefaultThreshold;
  std::uint64_t seed = 1;
  bool static_a5 = false;  // comparison policy: always a5
  bool greedy = false;     // evaluate with epsilon = 0
  bool learn = true;       // apply Q updates
};

inline void validate(const SessionConfig& cfg) {
  if (!(cfg.stage_len_s >= 12.0)) {
    throw config_error("session: stage_len_s must be at least 12 s (three windows)");
  }
  if (cfg.n_stages < 0) throw config_error("session: n_stages must be >= 0");
  if (!(cfg.fs > 90.0)) throw config_error("session: fs must exceed 90 Hz");
  if (!(cfg.ls_multiplier > 1.0)) throw config_error("session: ls_multiplier must exceed 1");
  if (!(cfg.ds_multiplier > 0.0)) throw config_error("session: ds_multiplier must be positive");
}

// One row of the session transcript. Stage 0 is the 2D baseline stage.
// `action` is the adaptation selected at this stage's end (it shapes the next
// stage); `reward` is the reward settled at this stage's end for the previous
// stage's action, 0 for the baseline.
struct StageRecord {
  int stage = 0;
  Presentation presentation = Presentation::two_d;
  inference::MentalState inferred{};
  int state_id = 0;
  int quiz_correct = 0;
  rl::Action action = rl::Action::no_change;
  double reward = 0.0;
  inference::MentalState underlying{};  // simulator ground truth, for diagnostics
};

// Quiz and state rank folded onto one 0..100 scale, averaged.
inline double stage_composite(const StageRecord& rec) {
  const double quiz_pct = rec.quiz_correct * 10.0;
  const double rank_pct = (rec.state_id - 1) / 7.0 * 100.0;
  return 0.5 * (quiz_pct + rank_pct);
}

// Improvement of the final stage over the baseline, in percent of baseline.
inline double session_improvement_pct(const std::vector<StageRecord>& records) {
  if (records.size() < 2) return 0.0;
  const double base = stage_composite(records.front());
  const double final = stage_composite(records.back());
  if (!(base > 1e-9)) return final > 1e-9 ? 100.0 : 0.0;
  return (final - base) / base * 100.0;
}

// Mean composite over the adaptation stages (the baseline excluded).
inline double session_mean_composite(const std::vector<StageRecord>& records) {
  if (records.size() < 2) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 1; i < records.size(); ++i) acc += stage_composite(records[i]);
  return acc / static_cast<double>(records.size() - 1);
}

struct StageSignals {
  std::vector<int> ls_labels;  // per voted window
  std::vector<int> ds_labels;
  double mean_high_density = 0.0;
  double mean_low_density = 0.0;
};

inline StageSignals analyze_stage(const dsp::SampleBuffer& eeg,
                                  const inference::ClassifierRef* ls_clf,
                                  const inference::ClassifierRef* ds_clf) {
  StageSignals out;
  const auto filtered = dsp::band_limit(dsp::remove_artifacts(eeg));
  const auto windows = dsp::segment_windows(filtered);
  if (windows.empty()) throw insufficient_data_error("session: stage yielded no windows");
  for (const auto& w : windows) {
    const auto high = dsp::band_power(w, inference::kLsBandLoHz, inference::kLsBandHiHz);
    const auto low = dsp::band_power(w, inference::kDsBandLoHz, inference::kDsBandHiHz);
    out.mean_high_density += high.value;
    out.mean_low_density += low.value;
    if (ls_clf != nullptr) out.ls_labels.push_back(inference::classify_ls(high, *ls_clf));
    if (ds_clf != nullptr) out.ds_labels.push_back(inference::classify_ds(low, *ds_clf));
  }
  out.mean_high_density /= static_cast<double>(windows.size());
  out.mean_low_density /= static_cast<double>(windows.size());
  // The final window is reserved for shipping the state, not for voting.
  if (!out.ls_labels.empty()) out.ls_labels.pop_back();
  if (!out.ds_labels.empty()) out.ds_labels.pop_back();
  return out;
}

// Closed-loop session: a 2D baseline stage to calibrate the classifiers and
// take the reference quiz, then n adaptation stages of
//   generate EEG -> band-limit -> window -> classify -> vote -> state ->
//   action -> participant transition -> quiz -> reward -> Q update.
inline std::vector<StageRecord> run_session(const ParticipantProfile& profile,
                                            rl::QLearningEngine& engine,
                                            const SessionConfig& cfg) {
  validate(profile);
  validate(cfg);

  Rng base = Rng(cfg.seed).stream(profile.rng_seed);
  Rng gen_rng = base.stream(1);
  Rng part_rng = base.stream(2);
  Rng quiz_rng = base.stream(3);
  Rng form_rng = base.stream(4);

  std::vector<StageRecord> records;
  records.reserve(static_cast<std::size_t>(cfg.n_stages) + 1);

  // --- Baseline stage -------------------------------------------------------
  inference::MentalState underlying{0, 1, 1};
  Presentation presentation = Presentation::two_d;
  Presentation resume_to = Presentation::two_d;

  const auto baseline_eeg =
      generate_eeg(underlying, cfg.stage_len_s, cfg.fs, profile, gen_rng, presentation);
  const auto baseline_sig = analyze_stage(baseline_eeg, nullptr, nullptr);

  inference::ClassifierRef ls_clf;
  ls_clf.multiplier = cfg.ls_multiplier;
  ls_clf.baseline = baseline_sig.mean_high_density;
  inference::ClassifierRef ds_clf;
  ds_clf.multiplier = cfg.ds_multiplier;
  ds_clf.baseline = baseline_sig.mean_low_density;

  const auto score_stage = [&](const inference::MentalState& truth, int prev_ls, int prev_ds,
                               const dsp::SampleBuffer& eeg) {
    const auto sig = analyze_stage(eeg, &ls_clf, &ds_clf);
    inference::MentalState inferred;
    inferred.ls = inference::majority_vote(sig.ls_labels, prev_ls);
    inferred.ds = inference::majority_vote(sig.ds_labels, prev_ds);
    const auto form = simulate_ssq_response(truth.ssq, form_rng);
    inferred.ssq = inference::ssq_binary(inference::ssq_score(form), cfg.ssq_threshold);
    return std::pair<inference::MentalState, std::vector<int>>(inferred, sig.ls_labels);
  };

  auto [baseline_inferred, baseline_ls_labels] = score_stage(underlying, 0, 1, baseline_eeg);
  StageRecord base_rec;
  base_rec.stage = 0;
  base_rec.presentation = presentation;
  base_rec.inferred = baseline_inferred;
  base_rec.state_id = inference::compose_state(baseline_inferred);
  base_rec.quiz_correct = quiz(profile, baseline_ls_labels, quiz_rng);
  base_rec.underlying = underlying;

  const auto pick_action = [&](int state_id) {
    if (cfg.static_a5) return rl::Action::no_change;
    return cfg.greedy ? engine.select_greedy(state_id) : engine.select(state_id);
  };

  base_rec.action = pick_action(base_rec.state_id);
  records.push_back(base_rec);

  // --- Adaptation stages ----------------------------------------------------
  for (int stage = 1; stage <= cfg.n_stages; ++stage) {
    const auto& prev = records.back();
    presentation = apply_action_presentation(presentation, prev.action, resume_to);
    underlying = participant_transition(profile, underlying, prev.action, presentation, part_rng);

    const auto eeg = generate_eeg(underlying, cfg.stage_len_s, cfg.fs, profile, gen_rng, presentation);
    auto [inferred, ls_labels] = score_stage(underlying, prev.inferred.ls, prev.inferred.ds, eeg);

    StageRecord rec;
    rec.stage = stage;
    rec.presentation = presentation;
    rec.inferred = inferred;
    rec.state_id = inference::compose_state(inferred);
    rec.quiz_correct = quiz(profile, ls_labels, quiz_rng);
    rec.underlying = underlying;
    rec.reward = engine.reward_for(
        {prev.quiz_correct, rec.quiz_correct, prev.state_id, rec.state_id});
    if (cfg.learn && !cfg.static_a5) {
      engine.apply(prev.state_id, prev.action, rec.reward, rec.state_id);
    }
    rec.action = pick_action(rec.state_id);
    records.push_back(rec);
  }
  return records;
}

}  // namespace erudite::sim
