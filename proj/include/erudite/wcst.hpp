#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/rng.hpp"

namespace erudite::sim {

// Card-sorting task: four stimulus cards, a 128-card response deck, and a
// hidden matching rule that switches at random times.

enum class CardColor : int { red, green, yellow, blue };
enum class CardShape : int { triangle, star, cross, circle };

struct Card {
  CardColor color = CardColor::red;
  CardShape shape = CardShape::triangle;
  int count = 1;  // 1..4
};

enum class WcstRule : int { color, shape, count };

enum class WcstFeedback { correct, wrong, round_exhausted };

inline constexpr int kWcstDeckSize = 128;
inline constexpr int kWcstMaxTries = 5;
inline constexpr int kWcstStimulusCount = 4;

// The four stimulus cards differ in every attribute, so each response card
// matches exactly one stimulus under each rule.
inline const std::array<Card, kWcstStimulusCount>& wcst_stimulus_cards() {
  static const std::array<Card, kWcstStimulusCount> cards = {{
      {CardColor::red, CardShape::triangle, 1},
      {CardColor::green, CardShape::star, 2},
      {CardColor::yellow, CardShape::cross, 3},
      {CardColor::blue, CardShape::circle, 4},
  }};
  return cards;
}

struct WcstConfig {
  double rule_switch_prob = 0.1;  // per finished round
  std::uint64_t seed = 1;
};

struct WcstMove {
  int round = 0;
  int choice = 0;
  bool correct = false;
};

class WcstGame {
 public:
  explicit WcstGame(const WcstConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    if (cfg.rule_switch_prob < 0.0 || cfg.rule_switch_prob > 1.0) {
      throw config_error("wcst: rule_switch_prob must be in [0, 1]");
    }
    // Deck: each of the 64 attribute combinations twice, shuffled.
    deck_.reserve(kWcstDeckSize);
    for (int rep = 0; rep < 2; ++rep) {
      for (int c = 0; c < 4; ++c) {
        for (int s = 0; s < 4; ++s) {
          for (int n = 1; n <= 4; ++n) {
            deck_.push_back({static_cast<CardColor>(c), static_cast<CardShape>(s), n});
          }
        }
      }
    }
    for (std::size_t i = deck_.size(); i > 1; --i) {
      std::swap(deck_[i - 1], deck_[rng_.uniform_index(i)]);
    }
    rule_ = static_cast<WcstRule>(rng_.uniform_index(3));
  }

  bool finished() const { return round_ >= kWcstDeckSize; }
  int round_index() const { return round_; }
  int tries_this_round() const { return tries_; }
  int correct_rounds() const { return correct_rounds_; }
  const Card& response_card() const {
    if (finished()) throw validation_error("wcst: game finished");
    return deck_[static_cast<std::size_t>(round_)];
  }
  // The hidden rule; scripted agents and tests may peek, a human player
  // only sees feedback.
  WcstRule rule() const { return rule_; }
  const std::vector<WcstMove>& history() const { return history_; }

  WcstFeedback step(int stimulus_index) {
    if (finished()) throw validation_error("wcst: game finished");
    if (stimulus_index < 0 || stimulus_index >= kWcstStimulusCount) {
      throw validation_error("wcst: stimulus index must be 0..3");
    }
    const Card& response = response_card();
    const Card& chosen = wcst_stimulus_cards()[static_cast<std::size_t>(stimulus_index)];
    const bool correct = matches(response, chosen, rule_);
    history_.push_back({round_, stimulus_index, correct});
    if (correct) {
      ++correct_rounds_;
      advance_round();
      return WcstFeedback::correct;
    }
    ++tries_;
    if (tries_ >= kWcstMaxTries) {
      advance_round();
      return WcstFeedback::round_exhausted;
    }
    return WcstFeedback::wrong;
  }

  static bool matches(const Card& response, const Card& stimulus, WcstRule rule) {
    switch (rule) {
      case WcstRule::color: return response.color == stimulus.color;
      case WcstRule::shape: return response.shape == stimulus.shape;
      case WcstRule::count: return response.count == stimulus.count;
    }
    throw validation_error("wcst: bad rule");
  }

  // Stimulus index that matches the response card under the given rule.
  static int matching_stimulus(const Card& response, WcstRule rule) {
    for (int i = 0; i < kWcstStimulusCount; ++i) {
      if (matches(response, wcst_stimulus_cards()[static_cast<std::size_t>(i)], rule)) return i;
    }
    throw validation_error("wcst: no matching stimulus");
  }

 private:
  void advance_round() {
    ++round_;
    tries_ = 0;
    // The rule may switch between rounds, uniformly to a different rule,
    // without telling the player.
    if (!finished() && rng_.bernoulli(cfg_.rule_switch_prob)) {
      const auto shift = 1 + rng_.uniform_index(2);
      rule_ = static_cast<WcstRule>((static_cast<std::uint64_t>(rule_) + shift) % 3);
    }
  }

  WcstConfig cfg_;
  Rng rng_;
  std::vector<Card> deck_;
  WcstRule rule_ = WcstRule::color;
  int round_ = 0;
  int tries_ = 0;
  int correct_rounds_ = 0;
  std::vector<WcstMove> history_;
};

// Learning labels from a move history: a not-learning event (0) at every
// wrong move, a learning event (1) at the move where a run of correct moves
// reaches five. Longer runs emit a single event at that point; the counter
// restarts only after a wrong move.
struct WcstLabelEvent {
  std::size_t move_index = 0;
  int label = 0;
};

inline std::vector<WcstLabelEvent> wcst_label(const std::vector<WcstMove>& history) {
  std::vector<WcstLabelEvent> events;
  int streak = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (history[i].correct) {
      ++streak;
      if (streak == 5) events.push_back({i, 1});
    } else {
      streak = 0;
      events.push_back({i, 0});
    }
  }
  return events;
}

}  // namespace erudite::sim
