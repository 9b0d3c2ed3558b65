#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/session.hpp"
#include "erudite/transport.hpp"
#include "erudite/wire.hpp"

namespace erudite::net {

// Edge-side closed loop: the state inference runs here against a simulated
// participant; only the (LS, DS, SSQ) tuple travels to the cloud and only the
// chosen action comes back.
struct EdgeConfig {
  sim::ParticipantProfile profile{};
  sim::SessionConfig session{};
  LatencyBudget budget{};
  // The edge annotates its transcript with locally recomputed rewards; the
  // authoritative bookkeeping lives in the cloud.
  rl::Hyperparams hp{};
  // When true, sleep for budget.inference_s before dispatching each state,
  // simulating the classifier execution time of the deployment hardware.
  bool simulate_inference_delay = false;
  int max_reconnects = 3;
};

struct EdgeStageLog {
  sim::StageRecord record;
  bool deadline_missed = false;
  bool action_from_cloud = false;
  double turnaround_s = 0.0;  // state dispatch -> action applied
  std::int64_t policy_version = 0;
};

struct EdgeRunResult {
  std::vector<EdgeStageLog> stages;
  int deadline_misses = 0;
  int reconnects = 0;
};

using LinkFactory = std::function<std::unique_ptr<MessageLink>()>;

namespace detail {

inline std::int64_t epoch_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

}  // namespace detail

inline EdgeRunResult edge_run(const LinkFactory& connect, const EdgeConfig& cfg) {
  sim::validate(cfg.profile);
  sim::validate(cfg.session);
  validate(cfg.budget);

  EdgeRunResult result;
  std::unique_ptr<MessageLink> link = connect();
  if (!link) throw io_error("edge: transport factory returned no link");

  const auto send_with_retry = [&](const std::string& line) {
    for (int attempt = 0;; ++attempt) {
      try {
        link->send_line(line);
        return;
      } catch (const io_error&) {
        if (attempt >= cfg.max_reconnects) throw;
        ++result.reconnects;
        link = connect();
        if (!link) throw io_error("edge: reconnect failed");
      }
    }
  };

  // Wait for the matching ACTION; stale or foreign lines are discarded. A
  // missed deadline falls back to a5 so the learning environment is left
  // untouched.
  const auto await_action = [&](int stage) -> std::optional<ActionMessage> {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::milliseconds(static_cast<long>(cfg.budget.window_s * 1000));
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      if (now >= deadline) return std::nullopt;
      const auto remain = std::chrono::duration_cast<millis>(deadline - now);
      std::optional<std::string> line;
      try {
        line = link->recv_line(remain);
      } catch (const io_error&) {
        if (result.reconnects >= cfg.max_reconnects) throw;
        ++result.reconnects;
        link = connect();
        if (!link) throw io_error("edge: reconnect failed");
        return std::nullopt;  // the pending request is lost with the connection
      }
      if (!line.has_value()) return std::nullopt;
      Message msg;
      try {
        msg = decode(*line);
      } catch (const decode_error&) {
        continue;
      }
      if (const auto* action = std::get_if<ActionMessage>(&msg)) {
        if (action->participant_id == cfg.profile.id && action->stage == stage) return *action;
      }
      // ERROR lines and stale replies are logged by dropping them here.
    }
  };

  // The session loop mirrors sim::run_session with the policy moved across
  // the wire.
  Rng base = Rng(cfg.session.seed).stream(cfg.profile.rng_seed);
  Rng gen_rng = base.stream(1);
  Rng part_rng = base.stream(2);
  Rng quiz_rng = base.stream(3);
  Rng form_rng = base.stream(4);

  inference::MentalState underlying{0, 1, 1};
  sim::Presentation presentation = sim::Presentation::two_d;
  sim::Presentation resume_to = sim::Presentation::two_d;

  const auto baseline_eeg = sim::generate_eeg(underlying, cfg.session.stage_len_s, cfg.session.fs,
                                              cfg.profile, gen_rng, presentation);
  const auto baseline_sig = sim::analyze_stage(baseline_eeg, nullptr, nullptr);
  inference::ClassifierRef ls_clf;
  ls_clf.multiplier = cfg.session.ls_multiplier;
  ls_clf.baseline = baseline_sig.mean_high_density;
  inference::ClassifierRef ds_clf;
  ds_clf.multiplier = cfg.session.ds_multiplier;
  ds_clf.baseline = baseline_sig.mean_low_density;

  const auto infer_stage = [&](const dsp::SampleBuffer& eeg, int prev_ls, int prev_ds,
                               int true_ssq) {
    const auto sig = sim::analyze_stage(eeg, &ls_clf, &ds_clf);
    inference::MentalState inferred;
    inferred.ls = inference::majority_vote(sig.ls_labels, prev_ls);
    inferred.ds = inference::majority_vote(sig.ds_labels, prev_ds);
    const auto form = sim::simulate_ssq_response(true_ssq, form_rng);
    inferred.ssq = inference::ssq_binary(inference::ssq_score(form), cfg.session.ssq_threshold);
    return std::pair<inference::MentalState, std::vector<int>>(inferred, sig.ls_labels);
  };

  auto [inferred, ls_labels] = infer_stage(baseline_eeg, 0, 1, underlying.ssq);

  EdgeStageLog log;
  log.record.stage = 0;
  log.record.presentation = presentation;
  log.record.inferred = inferred;
  log.record.state_id = inference::compose_state(inferred);
  log.record.quiz_correct = sim::quiz(cfg.profile, ls_labels, quiz_rng);
  log.record.underlying = underlying;

  // Baseline quiz and state seed the cloud's reward bookkeeping.
  send_with_retry(encode(RewardMessage{cfg.profile.id, 0, log.record.quiz_correct,
                                       log.record.state_id}));

  for (int stage = 1; stage <= cfg.session.n_stages; ++stage) {
    // During the final window of the previous stage the inferred state goes
    // out and the reply must land within one window length.
    if (cfg.simulate_inference_delay) {
      std::this_thread::sleep_for(
          std::chrono::microseconds(static_cast<std::int64_t>(cfg.budget.inference_s * 1e6)));
    }
    StateMessage state;
    state.participant_id = cfg.profile.id;
    state.stage = stage;
    state.ls = log.record.inferred.ls;
    state.ds = log.record.inferred.ds;
    state.ssq = log.record.inferred.ssq;
    state.sent_at_ms = detail::epoch_ms();
    const auto sent_at = std::chrono::steady_clock::now();
    send_with_retry(encode(state));
    const auto reply = await_action(stage);
    const double turnaround =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - sent_at).count();

    rl::Action action = rl::Action::no_change;
    log.deadline_missed = !reply.has_value();
    log.action_from_cloud = reply.has_value();
    log.turnaround_s = turnaround;
    if (reply.has_value()) {
      action = reply->action;
      log.policy_version = reply->policy_version;
    } else {
      ++result.deadline_misses;
    }
    log.record.action = action;
    result.stages.push_back(log);

    presentation = sim::apply_action_presentation(presentation, action, resume_to);
    underlying = sim::participant_transition(cfg.profile, underlying, action, presentation, part_rng);
    const auto eeg = sim::generate_eeg(underlying, cfg.session.stage_len_s, cfg.session.fs,
                                       cfg.profile, gen_rng, presentation);
    auto [next_inferred, next_labels] =
        infer_stage(eeg, log.record.inferred.ls, log.record.inferred.ds, underlying.ssq);

    EdgeStageLog next;
    next.record.stage = stage;
    next.record.presentation = presentation;
    next.record.inferred = next_inferred;
    next.record.state_id = inference::compose_state(next_inferred);
    next.record.quiz_correct = sim::quiz(cfg.profile, next_labels, quiz_rng);
    next.record.underlying = underlying;
    next.record.reward = rl::compute_reward({log.record.quiz_correct, next.record.quiz_correct,
                                             log.record.state_id, next.record.state_id},
                                            cfg.hp);
    log = next;

    send_with_retry(encode(RewardMessage{cfg.profile.id, stage, log.record.quiz_correct,
                                         log.record.state_id}));
  }
  result.stages.push_back(log);
  return result;
}

}  // namespace erudite::net
