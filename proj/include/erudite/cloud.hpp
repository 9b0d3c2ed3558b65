#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/rl.hpp"
#include "erudite/rng.hpp"
#include "erudite/transport.hpp"
#include "erudite/wire.hpp"

namespace erudite::net {

struct CloudConfig {
  rl::Hyperparams hp{};
  std::string qtable_dir;      // empty disables checkpointing
  double policy_delay_s = 0.0; // simulated policy execution time
  std::uint64_t seed = 1;
};

namespace detail {

inline std::filesystem::path qtable_path(const std::string& dir, const std::string& pid) {
  return std::filesystem::path(dir) / (pid + ".qtable");
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cloud: cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::optional<std::vector<std::uint8_t>> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

}  // namespace detail

// The cloud-side adaptation service: one Q-learning engine per participant,
// checkpointed after every update. STATE messages answer with an ACTION; the
// REWARD that settles the action arrives with the next stage's quiz and state.
// All handling for one participant is serialized behind that participant's
// mutex; different participants proceed concurrently.
class CloudEngine {
 public:
  explicit CloudEngine(CloudConfig cfg) : cfg_(std::move(cfg)) {
    rl::validate(cfg_.hp);
    if (!cfg_.qtable_dir.empty()) std::filesystem::create_directories(cfg_.qtable_dir);
  }

  // Process one wire line; returns the reply line to send, if any.
  std::optional<std::string> handle_line(const std::string& line) {
    Message msg;
    try {
      msg = decode(line);
    } catch (const decode_error& e) {
      std::string reason = e.what();
      for (auto& c : reason) {
        if (c == ';' || c == '=' || c == '\n' || c == '\r') c = ' ';
      }
      return encode(ErrorMessage{reason});
    }

    if (const auto* state = std::get_if<StateMessage>(&msg)) return handle_state(*state);
    if (const auto* reward = std::get_if<RewardMessage>(&msg)) {
      handle_reward(*reward);
      return std::nullopt;
    }
    return encode(ErrorMessage{"unexpected message type"});
  }

  rl::QTable table_snapshot(const std::string& pid) {
    auto& slot = slot_for(pid);
    std::lock_guard<std::mutex> lock(slot.m);
    return slot.engine->table();
  }

  std::uint64_t policy_version(const std::string& pid) {
    auto& slot = slot_for(pid);
    std::lock_guard<std::mutex> lock(slot.m);
    return slot.engine->updates();
  }

 private:
  struct Slot {
    std::mutex m;
    std::unique_ptr<rl::QLearningEngine> engine;
    std::optional<std::pair<int, int>> prev_state_quiz;      // (state_id, quiz)
    std::optional<std::pair<int, rl::Action>> pending;       // awaiting its reward
  };

  Slot& slot_for(const std::string& pid) {
    std::lock_guard<std::mutex> lock(map_mutex_);
    auto it = slots_.find(pid);
    if (it == slots_.end()) {
      auto slot = std::make_unique<Slot>();
      rl::QTable table;
      if (!cfg_.qtable_dir.empty()) {
        if (const auto bytes = detail::read_file(detail::qtable_path(cfg_.qtable_dir, pid))) {
          table = rl::load_qtable(*bytes);
        }
      }
      std::uint64_t pid_hash = 1469598103934665603ull;
      for (const char c : pid) pid_hash = (pid_hash ^ static_cast<unsigned char>(c)) * 1099511628211ull;
      slot->engine = std::make_unique<rl::QLearningEngine>(table, cfg_.hp,
                                                           Rng(cfg_.seed).stream(pid_hash));
      it = slots_.emplace(pid, std::move(slot)).first;
    }
    return *it->second;
  }

  std::string handle_state(const StateMessage& m) {
    auto& slot = slot_for(m.participant_id);
    std::lock_guard<std::mutex> lock(slot.m);
    if (cfg_.policy_delay_s > 0.0) {
      std::this_thread::sleep_for(
          std::chrono::microseconds(static_cast<std::int64_t>(cfg_.policy_delay_s * 1e6)));
    }
    const int state_id = inference::compose_state({m.ls, m.ds, m.ssq});
    const rl::Action action = slot.engine->select(state_id);
    slot.pending = {state_id, action};
    ActionMessage reply;
    reply.participant_id = m.participant_id;
    reply.stage = m.stage;
    reply.action = action;
    reply.policy_version = static_cast<std::int64_t>(slot.engine->updates());
    return encode(reply);
  }

  void handle_reward(const RewardMessage& m) {
    auto& slot = slot_for(m.participant_id);
    std::lock_guard<std::mutex> lock(slot.m);
    if (slot.prev_state_quiz.has_value() && slot.pending.has_value()) {
      const auto [prev_state, prev_quiz] = *slot.prev_state_quiz;
      const auto [acted_state, action] = *slot.pending;
      const double r =
          slot.engine->reward_for({prev_quiz, m.quiz_correct, prev_state, m.state_id});
      slot.engine->apply(acted_state, action, r, m.state_id);
      slot.pending.reset();
      if (!cfg_.qtable_dir.empty()) {
        detail::write_file(detail::qtable_path(cfg_.qtable_dir, m.participant_id),
                           rl::save_qtable(slot.engine->table()));
      }
    }
    slot.prev_state_quiz = {m.state_id, m.quiz_correct};
  }

  CloudConfig cfg_;
  std::mutex map_mutex_;
  std::unordered_map<std::string, std::unique_ptr<Slot>> slots_;
};

// Serve one already-connected link until it drops.
inline void cloud_serve_link(CloudEngine& engine, MessageLink& link) {
  try {
    for (;;) {
      const auto line = link.recv_line(millis{250});
      if (!line.has_value()) continue;
      if (const auto reply = engine.handle_line(*line)) link.send_line(*reply);
    }
  } catch (const io_error&) {
    // peer gone; nothing to clean up beyond the link itself
  }
}

// TCP front end: accepts connections and serves each on its own thread.
class CloudServer {
 public:
  CloudServer(CloudConfig cfg, std::uint16_t port)
      : engine_(std::move(cfg)), listener_(std::make_unique<TcpListener>(port)) {}

  ~CloudServer() { stop(); }

  std::uint16_t port() const { return listener_->port(); }
  CloudEngine& engine() { return engine_; }

  void start() {
    running_ = true;
    accept_thread_ = std::thread([this] {
      while (running_) {
        auto conn = listener_->accept(millis{200});
        if (!conn) continue;
        std::lock_guard<std::mutex> lock(workers_mutex_);
        workers_.emplace_back(
            [this](std::shared_ptr<TcpConnection> c) { cloud_serve_link_loop(std::move(c)); },
            std::shared_ptr<TcpConnection>(conn.release()));
      }
    });
  }

  void stop() {
    running_ = false;
    listener_->close();
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> workers;
    std::vector<std::weak_ptr<TcpConnection>> conns;
    {
      // Swap under the lock, join outside it: a worker may be waiting on the
      // mutex to register itself.
      std::lock_guard<std::mutex> lock(workers_mutex_);
      workers.swap(workers_);
      conns.swap(open_connections_);
    }
    for (auto& conn : conns) {
      if (auto c = conn.lock()) c->close();
    }
    for (auto& w : workers) {
      if (w.joinable()) w.join();
    }
  }

 private:
  void cloud_serve_link_loop(std::shared_ptr<TcpConnection> conn) {
    {
      std::lock_guard<std::mutex> lock(workers_mutex_);
      open_connections_.push_back(conn);
    }
    try {
      while (running_) {
        const auto line = conn->recv_line(millis{200});
        if (!line.has_value()) continue;
        if (const auto reply = engine_.handle_line(*line)) conn->send_line(*reply);
      }
    } catch (const io_error&) {
      // connection dropped
    }
  }

  CloudEngine engine_;
  std::unique_ptr<TcpListener> listener_;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex workers_mutex_;
  std::vector<std::thread> workers_;
  std::vector<std::weak_ptr<TcpConnection>> open_connections_;
};

}  // namespace erudite::net
