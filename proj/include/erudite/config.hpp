#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "erudite/csv.hpp"
#include "erudite/errors.hpp"
#include "erudite/participant.hpp"
#include "erudite/rl.hpp"
#include "erudite/session.hpp"
#include "erudite/wcst.hpp"

namespace erudite::cli {

// Flat `key = value` configuration with [section] headers and '#' comments.
//
//   [rl]          alpha, gamma, epsilon0, epsilon_decay, reward_scheme
//   [session]     stage_len_s, n_stages, fs, ls_multiplier, ds_multiplier,
//                 ssq_threshold, seed, train_sessions
//   [wcst]        rule_switch_prob, seed
//   [participant <id>]  one section per simulated participant
struct Config {
  rl::Hyperparams hp{};
  sim::SessionConfig session{};
  sim::WcstConfig wcst{};
  int train_sessions = 40;
  std::vector<sim::ParticipantProfile> profiles;
  std::uint64_t config_hash = 0;
};

namespace detail {

struct ConfigCursor {
  std::string section = "";
  std::string participant_id = "";
  std::size_t line_no = 0;
};

inline bool parse_number(const std::string& text, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(text, &used);
    return used == text.size();
  } catch (const std::exception&) {
    return false;
  }
}

inline bool parse_u64(const std::string& text, std::uint64_t& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace detail

inline std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (const char c : text) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return h;
}

// Parse and validate a configuration. All problems are collected and reported
// together in one config_error.
inline Config parse_config(const std::string& text) {
  Config cfg;
  cfg.config_hash = fnv1a_hash(text);
  std::vector<std::string> errors;
  detail::ConfigCursor cur;
  sim::ParticipantProfile* current_profile = nullptr;

  const auto fail = [&](const std::string& msg) {
    errors.push_back("line " + std::to_string(cur.line_no) + ": " + msg);
  };

  const auto set_double = [&](double& slot, const std::string& value, const std::string& key) {
    double v = 0.0;
    if (detail::parse_number(value, v)) {
      slot = v;
    } else {
      fail("bad numeric value for '" + key + "': '" + value + "'");
    }
  };

  std::istringstream in(text);
  std::string raw;
  while (std::getline(in, raw)) {
    ++cur.line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        fail("unterminated section header");
        continue;
      }
      const std::string inner = trim(line.substr(1, line.size() - 2));
      if (inner == "rl" || inner == "session" || inner == "wcst") {
        cur.section = inner;
        current_profile = nullptr;
      } else if (inner.rfind("participant", 0) == 0) {
        const std::string id = trim(inner.substr(std::string("participant").size()));
        if (id.empty()) {
          fail("participant section needs an id: [participant <id>]");
          current_profile = nullptr;
          continue;
        }
        cur.section = "participant";
        cfg.profiles.emplace_back();
        cfg.profiles.back().id = id;
        current_profile = &cfg.profiles.back();
      } else {
        fail("unknown section [" + inner + "]");
        cur.section = "";
        current_profile = nullptr;
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail("expected 'key = value'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      fail("empty key or value");
      continue;
    }

    if (cur.section == "rl") {
      if (key == "alpha") set_double(cfg.hp.alpha, value, key);
      else if (key == "gamma") set_double(cfg.hp.gamma, value, key);
      else if (key == "epsilon0") set_double(cfg.hp.epsilon0, value, key);
      else if (key == "epsilon_decay") set_double(cfg.hp.epsilon_decay, value, key);
      else if (key == "reward_scheme") {
        if (value == "incremental") cfg.hp.reward_scheme = rl::RewardScheme::incremental;
        else if (value == "absolute") cfg.hp.reward_scheme = rl::RewardScheme::absolute;
        else fail("reward_scheme must be 'incremental' or 'absolute'");
      } else fail("unknown [rl] key '" + key + "'");
    } else if (cur.section == "session") {
      if (key == "stage_len_s") set_double(cfg.session.stage_len_s, value, key);
      else if (key == "fs") set_double(cfg.session.fs, value, key);
      else if (key == "ls_multiplier") set_double(cfg.session.ls_multiplier, value, key);
      else if (key == "ds_multiplier") set_double(cfg.session.ds_multiplier, value, key);
      else if (key == "ssq_threshold") set_double(cfg.session.ssq_threshold, value, key);
      else if (key == "n_stages") {
        double v = 0.0;
        if (detail::parse_number(value, v) && v >= 0 && v == static_cast<int>(v)) {
          cfg.session.n_stages = static_cast<int>(v);
        } else fail("n_stages must be a nonnegative integer");
      } else if (key == "train_sessions") {
        double v = 0.0;
        if (detail::parse_number(value, v) && v >= 0 && v == static_cast<int>(v)) {
          cfg.train_sessions = static_cast<int>(v);
        } else fail("train_sessions must be a nonnegative integer");
      } else if (key == "seed") {
        if (!detail::parse_u64(value, cfg.session.seed)) fail("seed must be an unsigned integer");
      } else fail("unknown [session] key '" + key + "'");
    } else if (cur.section == "wcst") {
      if (key == "rule_switch_prob") set_double(cfg.wcst.rule_switch_prob, value, key);
      else if (key == "seed") {
        if (!detail::parse_u64(value, cfg.wcst.seed)) fail("seed must be an unsigned integer");
      } else fail("unknown [wcst] key '" + key + "'");
    } else if (cur.section == "participant" && current_profile != nullptr) {
      auto& p = *current_profile;
      if (key == "base_learning_prob") set_double(p.base_learning_prob, value, key);
      else if (key == "vr_learning_gain") set_double(p.vr_learning_gain, value, key);
      else if (key == "vr_ssq_susceptibility") set_double(p.vr_ssq_susceptibility, value, key);
      else if (key == "drowsiness_drift") set_double(p.drowsiness_drift, value, key);
      else if (key == "break_recovery") set_double(p.break_recovery, value, key);
      else if (key == "content_refresh_recovery") set_double(p.content_refresh_recovery, value, key);
      else if (key == "vr_engagement_recovery") set_double(p.vr_engagement_recovery, value, key);
      else if (key == "vr_off_ssq_recovery") set_double(p.vr_off_ssq_recovery, value, key);
      else if (key == "ssq_natural_recovery") set_double(p.ssq_natural_recovery, value, key);
      else if (key == "drowsy_ls_penalty") set_double(p.drowsy_ls_penalty, value, key);
      else if (key == "sick_ls_penalty") set_double(p.sick_ls_penalty, value, key);
      else if (key == "quiz_skill") set_double(p.quiz_skill, value, key);
      else if (key == "quiz_ls_bonus") set_double(p.quiz_ls_bonus, value, key);
      else if (key == "amplitude_scale") set_double(p.amplitude_scale, value, key);
      else if (key == "rng_seed") {
        if (!detail::parse_u64(value, p.rng_seed)) fail("rng_seed must be an unsigned integer");
      } else fail("unknown participant key '" + key + "'");
    } else {
      fail("key '" + key + "' outside of any known section");
    }
  }

  // Semantic validation, still collecting everything.
  try {
    rl::validate(cfg.hp);
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  try {
    sim::validate(cfg.session);
  } catch (const std::exception& e) {
    errors.emplace_back(e.what());
  }
  if (cfg.wcst.rule_switch_prob < 0.0 || cfg.wcst.rule_switch_prob > 1.0) {
    errors.emplace_back("wcst: rule_switch_prob must be in [0, 1]");
  }
  for (const auto& p : cfg.profiles) {
    try {
      sim::validate(p);
    } catch (const std::exception& e) {
      errors.emplace_back(e.what());
    }
  }

  if (!errors.empty()) {
    std::string joined = "config: " + std::to_string(errors.size()) + " problem(s):";
    for (const auto& e : errors) joined += "\n  - " + e;
    throw config_error(joined);
  }
  return cfg;
}

inline Config default_config() {
  Config cfg;
  cfg.profiles.emplace_back();
  return cfg;
}

}  // namespace erudite::cli
