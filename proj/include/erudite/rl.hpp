#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/rng.hpp"
#include "erudite/state.hpp"

namespace erudite::rl {

// The five adaptation actions.
//   a1 give a break, a2 enable VR (2D -> 3D), a3 disable VR (3D -> 2D),
//   a4 change content, a5 no change.
enum class Action : int {
  give_break = 1,
  enable_vr = 2,
  disable_vr = 3,
  change_content = 4,
  no_change = 5,
};

inline constexpr int kActionCount = 5;

inline int action_index(Action a) { return static_cast<int>(a) - 1; }

inline Action action_from_index(int idx) {
  if (idx < 0 || idx >= kActionCount) throw validation_error("action_from_index: index out of range");
  return static_cast<Action>(idx + 1);
}

inline std::string action_name(Action a) { return "a" + std::to_string(static_cast<int>(a)); }

inline Action action_from_name(const std::string& name) {
  if (name.size() == 2 && name[0] == 'a' && name[1] >= '1' && name[1] <= '5') {
    return static_cast<Action>(name[1] - '0');
  }
  throw validation_error("action_from_name: expected a1..a5, got '" + name + "'");
}

// 8x5 action-value table plus visit counts.
struct QTable {
  std::array<std::array<double, kActionCount>, inference::kStateCount> q{};
  std::array<std::array<std::uint64_t, kActionCount>, inference::kStateCount> visits{};

  double value(int state_id, Action a) const { return q[check(state_id)][action_index(a)]; }

  std::uint64_t total_updates() const {
    std::uint64_t n = 0;
    for (const auto& row : visits) {
      for (auto v : row) n += v;
    }
    return n;
  }

  static std::size_t check(int state_id) {
    if (state_id < 1 || state_id > inference::kStateCount) {
      throw validation_error("QTable: state id must be 1..8");
    }
    return static_cast<std::size_t>(state_id - 1);
  }
};

enum class RewardScheme { incremental, absolute };

struct Hyperparams {
  double alpha = 0.05;
  double gamma = 0.001;
  double epsilon0 = 1.0;
  double epsilon_decay = 0.01;
  RewardScheme reward_scheme = RewardScheme::incremental;
};

inline void validate(const Hyperparams& hp) {
  if (!(hp.alpha > 0.0) || hp.alpha > 1.0) throw config_error("hyperparams: alpha must be in (0, 1]");
  if (hp.gamma < 0.0 || !(hp.gamma < 1.0)) throw config_error("hyperparams: gamma must be in [0, 1)");
  if (!(hp.epsilon0 > 0.0) || hp.epsilon0 > 1.0) throw config_error("hyperparams: epsilon0 must be in (0, 1]");
  if (hp.epsilon_decay < 0.0) throw config_error("hyperparams: epsilon_decay must be >= 0");
}

// Epsilon-greedy selection: explore uniformly with probability epsilon,
// otherwise pick uniformly among the argmax set of the state's row.
inline Action select_action(const QTable& table, int state_id, double epsilon, Rng& rng) {
  if (epsilon < 0.0 || epsilon > 1.0) throw parameter_error("select_action: epsilon must be in [0, 1]");
  const auto& row = table.q[QTable::check(state_id)];
  if (epsilon > 0.0 && rng.uniform() < epsilon) {
    return action_from_index(static_cast<int>(rng.uniform_index(kActionCount)));
  }
  double best = row[0];
  for (int i = 1; i < kActionCount; ++i) best = std::max(best, row[i]);
  std::array<int, kActionCount> ties{};
  int n_ties = 0;
  for (int i = 0; i < kActionCount; ++i) {
    if (row[i] == best) ties[n_ties++] = i;
  }
  return action_from_index(ties[rng.uniform_index(static_cast<std::uint64_t>(n_ties))]);
}

// One Q-learning backup:
//   q[s,a] += alpha * (r + gamma * max_a' q[s',a'] - q[s,a])
// Every other cell is untouched; the (s,a) visit count is incremented.
inline QTable update_q(QTable table, int state_id, Action a, double reward, int next_state_id,
                       const Hyperparams& hp) {
  if (!std::isfinite(reward)) throw parameter_error("update_q: reward must be finite");
  const auto s = QTable::check(state_id);
  const auto sn = QTable::check(next_state_id);
  const auto ai = static_cast<std::size_t>(action_index(a));
  double best_next = table.q[sn][0];
  for (int i = 1; i < kActionCount; ++i) best_next = std::max(best_next, table.q[sn][i]);
  table.q[s][ai] += hp.alpha * (reward + hp.gamma * best_next - table.q[s][ai]);
  table.visits[s][ai] += 1;
  return table;
}

// Exploration schedule: epsilon(step) = epsilon0 * exp(-decay * step), the
// step counter advancing once per Q update.
inline double decay_epsilon(double epsilon0, std::uint64_t step, const Hyperparams& hp) {
  return epsilon0 * std::exp(-hp.epsilon_decay * static_cast<double>(step));
}

struct RewardInput {
  int quiz_prev = 0;  // correct answers 0..10
  int quiz_now = 0;
  int state = 1;  // state ids 1..8; rank order matches the id
  int next_state = 1;
};

inline constexpr double kQuizUnitReward = 10.0;
inline constexpr double kStateUnitReward = 100.0 / 8.0;      // incremental unit
inline constexpr double kAbsoluteStateSpacing = 100.0 / 7.0; // s1 -> 0, s8 -> 100

// Reward for one stage transition.
//
// incremental (default): one +-10 unit for any quiz change plus one +-12.5
// unit for any state-rank change. absolute: 10 * quiz plus the next state's
// rank mapped linearly onto [0, 100].
inline double compute_reward(const RewardInput& in, const Hyperparams& hp) {
  if (in.quiz_prev < 0 || in.quiz_prev > 10 || in.quiz_now < 0 || in.quiz_now > 10) {
    throw validation_error("compute_reward: quiz counts must be 0..10");
  }
  QTable::check(in.state);
  QTable::check(in.next_state);
  if (hp.reward_scheme == RewardScheme::absolute) {
    return kQuizUnitReward * in.quiz_now +
           static_cast<double>(in.next_state - 1) * kAbsoluteStateSpacing;
  }
  const auto sign = [](int d) { return d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0); };
  return kQuizUnitReward * sign(in.quiz_now - in.quiz_prev) +
         kStateUnitReward * sign(in.next_state - in.state);
}

// --- Q-table persistence -----------------------------------------------------
//
// Layout (little endian): magic "ERQT", u32 version, u32 states, u32 actions,
// 40 x f64 Q values row-major, 40 x u64 visit counts.

inline constexpr std::uint32_t kQTableFormatVersion = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_f64(std::vector<std::uint8_t>& out, double d) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(d));
  std::memcpy(&bits, &d, sizeof(bits));
  put_u64(out, bits);
}

struct ByteReader {
  const std::vector<std::uint8_t>& buf;
  std::size_t pos = 0;

  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[pos + i]) << (8 * i);
    pos += 4;
    return v;
  }

  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[pos + i]) << (8 * i);
    pos += 8;
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }

  void require(std::size_t n) const {
    if (pos + n > buf.size()) throw decode_error("qtable: truncated data");
  }
};

}  // namespace detail

inline std::vector<std::uint8_t> save_qtable(const QTable& table) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + inference::kStateCount * kActionCount * 16);
  out.insert(out.end(), {'E', 'R', 'Q', 'T'});
  detail::put_u32(out, kQTableFormatVersion);
  detail::put_u32(out, inference::kStateCount);
  detail::put_u32(out, kActionCount);
  for (const auto& row : table.q) {
    for (double v : row) detail::put_f64(out, v);
  }
  for (const auto& row : table.visits) {
    for (auto v : row) detail::put_u64(out, v);
  }
  return out;
}

inline QTable load_qtable(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader rd{bytes};
  rd.require(4);
  if (!(bytes[0] == 'E' && bytes[1] == 'R' && bytes[2] == 'Q' && bytes[3] == 'T')) {
    throw decode_error("qtable: bad magic");
  }
  rd.pos = 4;
  const auto version = rd.u32();
  if (version != kQTableFormatVersion) {
    throw decode_error("qtable: unsupported version " + std::to_string(version));
  }
  const auto states = rd.u32();
  const auto actions = rd.u32();
  if (states != inference::kStateCount || actions != kActionCount) {
    throw decode_error("qtable: unexpected dimensions");
  }
  QTable table;
  for (auto& row : table.q) {
    for (auto& v : row) {
      v = rd.f64();
      if (!std::isfinite(v)) throw decode_error("qtable: non-finite value");
    }
  }
  for (auto& row : table.visits) {
    for (auto& v : row) v = rd.u64();
  }
  if (rd.pos != bytes.size()) throw decode_error("qtable: trailing bytes");
  return table;
}

// Single-owner adaptation engine: one Q table, the exploration schedule keyed
// to the update count, and a private RNG stream.
class QLearningEngine {
 public:
  QLearningEngine(Hyperparams hp, Rng rng) : hp_(hp), rng_(rng) { validate(hp_); }
  QLearningEngine(QTable table, Hyperparams hp, Rng rng) : table_(table), hp_(hp), rng_(rng) {
    validate(hp_);
  }

  double epsilon() const { return decay_epsilon(hp_.epsilon0, table_.total_updates(), hp_); }

  Action select(int state_id) { return select_action(table_, state_id, epsilon(), rng_); }

  Action select_greedy(int state_id) { return select_action(table_, state_id, 0.0, rng_); }

  void apply(int state_id, Action a, double reward, int next_state_id) {
    table_ = update_q(table_, state_id, a, reward, next_state_id, hp_);
  }

  double reward_for(const RewardInput& in) const { return compute_reward(in, hp_); }

  const QTable& table() const { return table_; }
  void set_table(const QTable& t) { table_ = t; }
  const Hyperparams& hyperparams() const { return hp_; }
  std::uint64_t updates() const { return table_.total_updates(); }

 private:
  QTable table_{};
  Hyperparams hp_{};
  Rng rng_;
};

}  // namespace erudite::rl
