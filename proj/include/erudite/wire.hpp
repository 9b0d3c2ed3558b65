#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "erudite/errors.hpp"
#include "erudite/rl.hpp"

namespace erudite::net {

// Newline-delimited text protocol between the edge (state inference) and the
// cloud (RL policy). One message per line:
//   type=STATE;participant_id=p1;stage=2;ls=1;ds=0;ssq=1;sent_at_ms=...
//   type=ACTION;participant_id=p1;stage=2;action=a2;policy_version=17
//   type=REWARD;participant_id=p1;stage=3;quiz_correct=7;state_id=6
//   type=ERROR;reason=...

struct StateMessage {
  std::string participant_id;
  int stage = 1;  // >= 1
  int ls = 0;
  int ds = 0;
  int ssq = 0;
  std::int64_t sent_at_ms = 0;
};

struct ActionMessage {
  std::string participant_id;
  int stage = 1;  // echoes the request's stage
  rl::Action action = rl::Action::no_change;
  std::int64_t policy_version = 0;
};

struct RewardMessage {
  std::string participant_id;
  int stage = 0;  // stage 0 carries the baseline quiz and state
  int quiz_correct = 0;
  int state_id = 1;
};

struct ErrorMessage {
  std::string reason;
};

using Message = std::variant<StateMessage, ActionMessage, RewardMessage, ErrorMessage>;

// Execution-time budget of one stage hand-off. The defaults are the measured
// figures the system is sized for: state inference on the edge, one transfer
// hop each way, and the policy lookup, all inside one 4 s window.
struct LatencyBudget {
  double inference_s = 1.15;
  double transfer_s = 0.016;
  double policy_s = 0.12;
  double window_s = 4.0;
};

inline void validate(const LatencyBudget& b) {
  if (!(b.inference_s >= 0.0) || !(b.transfer_s >= 0.0) || !(b.policy_s >= 0.0)) {
    throw config_error("latency budget: delays must be nonnegative");
  }
  if (!(b.inference_s + b.transfer_s + b.policy_s < b.window_s)) {
    throw config_error("latency budget: inference + transfer + policy must fit in one window");
  }
}

namespace detail {

inline void check_bit(int v, const char* field) {
  if (v != 0 && v != 1) throw decode_error(std::string("wire: field out of range: ") + field, field);
}

inline void check_participant_id(const std::string& id, const char* field) {
  if (id.empty()) throw decode_error("wire: empty participant_id", field);
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '-' || c == '.';
    if (!ok) throw decode_error("wire: participant_id must be [A-Za-z0-9_.-]", field);
  }
}

inline void check_reason(const std::string& reason) {
  for (char c : reason) {
    if (c == ';' || c == '\n' || c == '\r' || c == '=') {
      throw decode_error("wire: reason must not contain ';', '=' or newlines", "reason");
    }
  }
}

struct FieldMap {
  std::map<std::string, std::string> kv;

  const std::string& get(const char* field) const {
    const auto it = kv.find(field);
    if (it == kv.end()) throw decode_error(std::string("wire: missing field: ") + field, field);
    return it->second;
  }

  std::int64_t get_int(const char* field, std::int64_t lo, std::int64_t hi) const {
    const std::string& s = get(field);
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw decode_error(std::string("wire: field is not an integer: ") + field, field);
    }
    if (value < lo || value > hi) {
      throw decode_error(std::string("wire: field out of range: ") + field, field);
    }
    return value;
  }
};

}  // namespace detail

inline std::string encode(const Message& msg) {
  std::string line;
  if (const auto* m = std::get_if<StateMessage>(&msg)) {
    detail::check_participant_id(m->participant_id, "participant_id");
    if (m->stage < 1) throw validation_error("wire: STATE stage must be >= 1");
    detail::check_bit(m->ls, "ls");
    detail::check_bit(m->ds, "ds");
    detail::check_bit(m->ssq, "ssq");
    line = "type=STATE;participant_id=" + m->participant_id + ";stage=" + std::to_string(m->stage) +
           ";ls=" + std::to_string(m->ls) + ";ds=" + std::to_string(m->ds) +
           ";ssq=" + std::to_string(m->ssq) + ";sent_at_ms=" + std::to_string(m->sent_at_ms);
  } else if (const auto* m = std::get_if<ActionMessage>(&msg)) {
    detail::check_participant_id(m->participant_id, "participant_id");
    if (m->stage < 1) throw validation_error("wire: ACTION stage must be >= 1");
    line = "type=ACTION;participant_id=" + m->participant_id + ";stage=" + std::to_string(m->stage) +
           ";action=" + rl::action_name(m->action) +
           ";policy_version=" + std::to_string(m->policy_version);
  } else if (const auto* m = std::get_if<RewardMessage>(&msg)) {
    detail::check_participant_id(m->participant_id, "participant_id");
    if (m->stage < 0) throw validation_error("wire: REWARD stage must be >= 0");
    if (m->quiz_correct < 0 || m->quiz_correct > 10) {
      throw validation_error("wire: REWARD quiz_correct must be 0..10");
    }
    if (m->state_id < 1 || m->state_id > 8) throw validation_error("wire: REWARD state_id must be 1..8");
    line = "type=REWARD;participant_id=" + m->participant_id + ";stage=" + std::to_string(m->stage) +
           ";quiz_correct=" + std::to_string(m->quiz_correct) +
           ";state_id=" + std::to_string(m->state_id);
  } else if (const auto* m = std::get_if<ErrorMessage>(&msg)) {
    detail::check_reason(m->reason);
    line = "type=ERROR;reason=" + m->reason;
  } else {
    throw validation_error("wire: unknown message variant");
  }
  line.push_back('\n');
  return line;
}

inline Message decode(const std::string& line) {
  detail::FieldMap fields;
  std::size_t pos = 0;
  const std::size_t end = line.find_first_of("\n\r");
  const std::string body = line.substr(0, end == std::string::npos ? line.size() : end);
  while (pos < body.size()) {
    std::size_t sep = body.find(';', pos);
    if (sep == std::string::npos) sep = body.size();
    const std::string pair = body.substr(pos, sep - pos);
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw decode_error("wire: malformed key=value pair: '" + pair + "'", "");
    }
    fields.kv[pair.substr(0, eq)] = pair.substr(eq + 1);
    pos = sep + 1;
  }

  const std::string& type = fields.get("type");
  if (type == "STATE") {
    StateMessage m;
    m.participant_id = fields.get("participant_id");
    detail::check_participant_id(m.participant_id, "participant_id");
    m.stage = static_cast<int>(fields.get_int("stage", 1, 1 << 30));
    m.ls = static_cast<int>(fields.get_int("ls", 0, 1));
    m.ds = static_cast<int>(fields.get_int("ds", 0, 1));
    m.ssq = static_cast<int>(fields.get_int("ssq", 0, 1));
    m.sent_at_ms = fields.get_int("sent_at_ms", INT64_MIN, INT64_MAX);
    return m;
  }
  if (type == "ACTION") {
    ActionMessage m;
    m.participant_id = fields.get("participant_id");
    detail::check_participant_id(m.participant_id, "participant_id");
    m.stage = static_cast<int>(fields.get_int("stage", 1, 1 << 30));
    const std::string& a = fields.get("action");
    try {
      m.action = rl::action_from_name(a);
    } catch (const validation_error&) {
      throw decode_error("wire: field out of range: action", "action");
    }
    m.policy_version = fields.get_int("policy_version", 0, INT64_MAX);
    return m;
  }
  if (type == "REWARD") {
    RewardMessage m;
    m.participant_id = fields.get("participant_id");
    detail::check_participant_id(m.participant_id, "participant_id");
    m.stage = static_cast<int>(fields.get_int("stage", 0, 1 << 30));
    m.quiz_correct = static_cast<int>(fields.get_int("quiz_correct", 0, 10));
    m.state_id = static_cast<int>(fields.get_int("state_id", 1, 8));
    return m;
  }
  if (type == "ERROR") {
    ErrorMessage m;
    m.reason = fields.get("reason");
    return m;
  }
  throw decode_error("wire: unknown type '" + type + "'", "type");
}

}  // namespace erudite::net
