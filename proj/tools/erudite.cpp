// Command-line front end: closed-loop simulation, SSQ scoring, EEG analysis,
// the edge/cloud processes, and a WCST playthrough generator.
//
// Exit codes: 0 ok, 1 validation, 2 runtime, 3 deadline/IO.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "erudite/cloud.hpp"
#include "erudite/commands.hpp"
#include "erudite/config.hpp"
#include "erudite/csv.hpp"
#include "erudite/edge.hpp"
#include "erudite/eeg_gen.hpp"
#include "erudite/errors.hpp"
#include "erudite/wcst.hpp"

namespace {

using namespace erudite;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitDeadlineIo = 3;

cli::Config load_config(const std::string& path) {
  if (path.empty()) return cli::default_config();
  std::ifstream in(path);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return cli::parse_config(text.str());
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& ep) {
  const auto colon = ep.rfind(':');
  if (colon == std::string::npos) throw validation_error("endpoint must be host:port");
  const std::string host = ep.substr(0, colon);
  const int port = std::stoi(ep.substr(colon + 1));
  if (port < 0 || port > 65535) throw validation_error("port out of range");
  return {host.empty() ? "127.0.0.1" : host, static_cast<std::uint16_t>(port)};
}

sim::ParticipantProfile pick_profile(const cli::Config& cfg, const std::string& id) {
  if (cfg.profiles.empty()) throw config_error("config defines no participants");
  if (id.empty()) return cfg.profiles.front();
  for (const auto& p : cfg.profiles) {
    if (p.id == id) return p;
  }
  throw config_error("participant '" + id + "' not found in config");
}

const char* color_name(sim::CardColor c) {
  switch (c) {
    case sim::CardColor::red: return "red";
    case sim::CardColor::green: return "green";
    case sim::CardColor::yellow: return "yellow";
    case sim::CardColor::blue: return "blue";
  }
  return "?";
}

const char* shape_name(sim::CardShape s) {
  switch (s) {
    case sim::CardShape::triangle: return "triangle";
    case sim::CardShape::star: return "star";
    case sim::CardShape::cross: return "cross";
    case sim::CardShape::circle: return "circle";
  }
  return "?";
}

std::string card_text(const sim::Card& c) {
  std::ostringstream out;
  out << c.count << " " << color_name(c.color) << " " << shape_name(c.shape);
  return out.str();
}

int cmd_run_sim(const std::string& config_path, const std::string& out_dir) {
  const auto cfg = load_config(config_path);
  const auto report = cli::cmd_run_sim(cfg, out_dir);
  std::cout << "wrote " << out_dir << "/report.json (mean improvement "
            << report["mean_improvement_pct"] << "%)\n";
  return kExitOk;
}

int cmd_score_ssq(const std::string& input) {
  inference::SsqResponse response;
  if (input.empty()) {
    // Interactive questionnaire on stdin.
    for (std::size_t i = 0; i < inference::kSsqSymptomCount; ++i) {
      std::cout << inference::kSsqSymptoms[i] << " (0=none, 1=slight, 2=moderate, 3=severe): "
                << std::flush;
      int sev = -1;
      if (!(std::cin >> sev)) throw validation_error("expected a severity 0..3");
      response.severities[i] = sev;
    }
  } else {
    std::ifstream in(input);
    if (!in) throw io_error("cannot open '" + input + "'");
    response = cli::read_ssq_csv(in);
  }
  const auto score = inference::ssq_score(response);
  const int bit = inference::ssq_binary(score);
  std::cout << "N_T=" << score.n_t << " O_T=" << score.o_t << " D_T=" << score.d_t << "\n"
            << "N=" << score.n << " O=" << score.o << " D=" << score.d << "\n"
            << "TS=" << score.ts << "\n"
            << "ssq_state=" << bit << " (" << (bit ? "not-dizzy" : "dizzy") << ")\n";
  return kExitOk;
}

int cmd_analyze(const std::string& input, const std::string& out_path, const std::string& channel,
                double fs, bool no_filter) {
  std::ifstream in(input);
  if (!in) throw io_error("cannot open '" + input + "'");
  const auto buf = cli::read_eeg_csv(in, channel, fs);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw io_error("cannot write '" + out_path + "'");
    out = &file;
  }
  cli::cmd_analyze(buf, *out, !no_filter);
  return kExitOk;
}

int cmd_cloud(const std::string& listen, const std::string& config_path,
              const std::string& qtable_dir, double policy_ms, const std::string& port_file,
              double serve_seconds) {
  const auto cfg = load_config(config_path);
  const auto [host, port] = parse_endpoint(listen);
  (void)host;  // the listener binds all local interfaces
  net::CloudConfig ccfg;
  ccfg.hp = cfg.hp;
  ccfg.qtable_dir = qtable_dir;
  ccfg.policy_delay_s = policy_ms / 1000.0;
  ccfg.seed = cfg.session.seed;
  net::CloudServer server(ccfg, port);
  if (!port_file.empty()) {
    std::ofstream pf(port_file);
    pf << server.port() << "\n";
  }
  std::cerr << "cloud: listening on port " << server.port() << "\n";
  server.start();
  if (serve_seconds > 0.0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(serve_seconds * 1000)));
    server.stop();
  } else {
    for (;;) std::this_thread::sleep_for(std::chrono::seconds(3600));
  }
  return kExitOk;
}

int cmd_edge(const std::string& connect, const std::string& config_path,
             const std::string& participant, double latency_ms, double inference_ms,
             double window_s, const std::string& out_path, const std::string& states_path) {
  const auto cfg = load_config(config_path);
  const auto [host, port] = parse_endpoint(connect);

  net::EdgeConfig ecfg;
  ecfg.profile = pick_profile(cfg, participant);
  ecfg.session = cfg.session;
  ecfg.hp = cfg.hp;
  if (inference_ms > 0.0) {
    ecfg.budget.inference_s = inference_ms / 1000.0;
    ecfg.simulate_inference_delay = true;
  }
  if (window_s > 0.0) ecfg.budget.window_s = window_s;
  ecfg.budget.transfer_s = latency_ms / 1000.0;

  const net::LinkFactory factory = [&, host = host, port = port]() -> std::unique_ptr<net::MessageLink> {
    auto link = net::tcp_connect(host, port, 30, net::millis{200});
    if (latency_ms > 0.0) {
      return std::make_unique<net::DelayedLink>(std::move(link),
                                                net::millis{static_cast<long>(latency_ms)});
    }
    return link;
  };

  const auto result = net::edge_run(factory, ecfg);
  for (const auto& stage : result.stages) {
    if (stage.deadline_missed) {
      std::cerr << "edge: missed deadline after stage " << stage.record.stage
                << "; applied a5 locally\n";
    }
  }

  std::vector<sim::StageRecord> records;
  records.reserve(result.stages.size());
  for (const auto& s : result.stages) records.push_back(s.record);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw io_error("cannot write '" + out_path + "'");
    out = &file;
  }
  cli::write_transcript_csv(*out, records);
  if (!states_path.empty()) {
    std::ofstream st(states_path);
    if (!st) throw io_error("cannot write '" + states_path + "'");
    cli::write_state_csv(st, records);
  }
  return result.deadline_misses > 0 ? kExitDeadlineIo : kExitOk;
}

int cmd_wcst(const std::string& agent, double switch_prob, std::uint64_t seed,
             const std::string& out_path) {
  sim::WcstConfig wcfg;
  wcfg.rule_switch_prob = switch_prob;
  wcfg.seed = seed;
  sim::WcstGame game(wcfg);
  Rng rng(seed + 1);

  const bool interactive = agent == "interactive";
  while (!game.finished()) {
    int pick;
    if (agent == "perfect") {
      pick = sim::WcstGame::matching_stimulus(game.response_card(), game.rule());
    } else if (agent == "random") {
      pick = static_cast<int>(rng.uniform_index(4));
    } else {
      std::cout << "round " << game.round_index() << ", card: " << card_text(game.response_card())
                << "\n";
      for (int i = 0; i < 4; ++i) {
        std::cout << "  [" << i << "] " << card_text(sim::wcst_stimulus_cards()[i]) << "\n";
      }
      std::cout << "choice: " << std::flush;
      if (!(std::cin >> pick)) throw validation_error("expected a stimulus index 0..3");
    }
    const auto fb = game.step(pick);
    if (interactive) {
      std::cout << (fb == sim::WcstFeedback::correct
                        ? "correct\n"
                        : fb == sim::WcstFeedback::wrong ? "wrong\n" : "round exhausted\n");
    }
  }

  const auto& history = game.history();
  const auto events = sim::wcst_label(history);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw io_error("cannot write '" + out_path + "'");
    out = &file;
  }
  *out << "move,round,choice,correct,label\n";
  std::size_t event_idx = 0;
  for (std::size_t i = 0; i < history.size(); ++i) {
    std::string label;
    if (event_idx < events.size() && events[event_idx].move_index == i) {
      label = std::to_string(events[event_idx].label);
      ++event_idx;
    }
    *out << i << ',' << history[i].round << ',' << history[i].choice << ','
         << (history[i].correct ? 1 : 0) << ',' << label << '\n';
  }
  std::cerr << "wcst: " << game.correct_rounds() << "/128 rounds correct\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ERUDITE closed-loop learning-environment toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", input, out_path, channel, participant;
  std::string listen = "127.0.0.1:7071", connect = "127.0.0.1:7071", qtable_dir, port_file;
  std::string agent = "perfect", states_path;
  double fs = 0.0, latency_ms = 16.0, inference_ms = 0.0, policy_ms = 0.0, serve_seconds = 0.0;
  double window_s = 0.0, switch_prob = 0.1;
  std::uint64_t seed = 1;
  bool no_filter = false;

  auto* run = app.add_subcommand("run-sim", "run closed-loop training and evaluation sessions");
  run->add_option("--config", config_path, "config file");
  run->add_option("--out", out_dir, "output directory")->capture_default_str();

  auto* ssq = app.add_subcommand("score-ssq", "score a simulator sickness questionnaire");
  ssq->add_option("input", input, "CSV file 'symptom,severity' (omit for interactive entry)");

  auto* analyze = app.add_subcommand("analyze", "per-window metrics from an EEG CSV");
  analyze->add_option("input", input, "CSV file 't_s,channel,uv'")->required();
  analyze->add_option("--out", out_path, "output CSV (default stdout)");
  analyze->add_option("--channel", channel, "channel label (default: first seen)");
  analyze->add_option("--fs", fs, "override the inferred sampling rate (Hz)");
  analyze->add_flag("--no-filter", no_filter, "skip the 0.5-40 Hz band-limiting stage");

  auto* cloud = app.add_subcommand("cloud", "run the RL adaptation service");
  cloud->add_option("--listen", listen, "host:port (port 0 picks a free one)")->capture_default_str();
  cloud->add_option("--config", config_path, "config file");
  cloud->add_option("--qtable-path", qtable_dir, "directory for Q-table checkpoints");
  cloud->add_option("--policy-ms", policy_ms, "simulated policy execution time");
  cloud->add_option("--port-file", port_file, "write the bound port to this file");
  cloud->add_option("--serve-seconds", serve_seconds, "stop after this long (0 = forever)");

  auto* edge = app.add_subcommand("edge", "run the edge inference loop for one participant");
  edge->add_option("--connect", connect, "cloud host:port")->capture_default_str();
  edge->add_option("--config", config_path, "config file");
  edge->add_option("--participant", participant, "participant id (default: first in config)");
  edge->add_option("--latency-ms", latency_ms, "injected transfer latency")->capture_default_str();
  edge->add_option("--inference-ms", inference_ms, "simulated per-stage inference time");
  edge->add_option("--window-s", window_s, "override the 4 s action deadline");
  edge->add_option("--out", out_path, "transcript CSV (default stdout)");
  edge->add_option("--states-out", states_path, "inferred-state records CSV");

  auto* wcst = app.add_subcommand("wcst", "play a scripted or interactive card-sorting session");
  wcst->add_option("--agent", agent, "perfect | random | interactive")->capture_default_str();
  wcst->add_option("--switch-prob", switch_prob, "per-round rule switch probability")
      ->capture_default_str();
  wcst->add_option("--seed", seed, "deck and rule seed")->capture_default_str();
  wcst->add_option("--out", out_path, "history CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run_sim(config_path, out_dir);
    if (ssq->parsed()) return cmd_score_ssq(input);
    if (analyze->parsed()) return cmd_analyze(input, out_path, channel, fs, no_filter);
    if (cloud->parsed()) return cmd_cloud(listen, config_path, qtable_dir, policy_ms, port_file, serve_seconds);
    if (edge->parsed()) return cmd_edge(connect, config_path, participant, latency_ms, inference_ms, window_s, out_path, states_path);
    if (wcst->parsed()) return cmd_wcst(agent, switch_prob, seed, out_path);
  } catch (const erudite::io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitDeadlineIo;
  } catch (const erudite::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const erudite::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const erudite::parameter_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const erudite::insufficient_data_error& e) {
    std::cerr << "insufficient data: " << e.what() << "\n";
    return kExitValidation;
  } catch (const erudite::decode_error& e) {
    std::cerr << "decode error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
