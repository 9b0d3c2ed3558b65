#pragma once

#include <cstddef>
#include <vector>

#include "erudite/errors.hpp"

namespace erudite::inference {

// Binary mental-state triple: ls 1 = learning, ds 1 = alert, ssq 1 = not dizzy.
struct MentalState {
  int ls = 0;
  int ds = 0;
  int ssq = 0;
};

inline void validate(const MentalState& m, const char* who) {
  if ((m.ls | m.ds | m.ssq) < 0 || m.ls > 1 || m.ds > 1 || m.ssq > 1) {
    throw validation_error(std::string(who) + ": state bits must be 0 or 1");
  }
}

// States s1..s8: s1 = (0,0,0) is the worst, s8 = (1,1,1) the best.
inline int compose_state(const MentalState& m) {
  validate(m, "compose_state");
  return 1 + 4 * m.ls + 2 * m.ds + m.ssq;
}

inline MentalState decompose_state(int state_id) {
  if (state_id < 1 || state_id > 8) throw validation_error("decompose_state: id must be 1..8");
  const int v = state_id - 1;
  return MentalState{(v >> 2) & 1, (v >> 1) & 1, v & 1};
}

inline constexpr int kStateCount = 8;

// Karolinska Sleepiness Scale 1..9 folded to alert (1) for 1..6, drowsy (0)
// for 7..9.
inline int kss_to_binary(int kss) {
  if (kss < 1 || kss > 9) throw validation_error("kss_to_binary: KSS must be 1..9");
  return kss <= 6 ? 1 : 0;
}

// Majority vote over per-window binary labels. The caller is expected to have
// dropped the final window's label already. A strict majority wins; an exact
// tie or an empty list falls back to the previous stage's label.
inline int majority_vote(const std::vector<int>& labels, int previous) {
  std::size_t ones = 0;
  for (int v : labels) {
    if (v != 0 && v != 1) throw validation_error("majority_vote: labels must be bits");
    ones += static_cast<std::size_t>(v);
  }
  const std::size_t zeros = labels.size() - ones;
  if (ones > zeros) return 1;
  if (zeros > ones) return 0;
  return previous;
}

}  // namespace erudite::inference
