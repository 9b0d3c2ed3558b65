#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "erudite/commands.hpp"
#include "erudite/config.hpp"
#include "erudite/csv.hpp"
#include "erudite/eeg_gen.hpp"

using namespace erudite;
using namespace erudite::cli;

namespace {

namespace fs = std::filesystem;

const char* kGoodConfig = R"(# comment
[rl]
alpha = 0.05
gamma = 0.001
epsilon0 = 1.0
epsilon_decay = 0.01
reward_scheme = incremental

[session]
stage_len_s = 24
fs = 128
n_stages = 4
train_sessions = 6
seed = 77

[wcst]
rule_switch_prob = 0.1

[participant alpha]
base_learning_prob = 0.3
vr_learning_gain = 0.5
vr_ssq_susceptibility = 0.1
rng_seed = 21

[participant beta]
base_learning_prob = 0.45
drowsiness_drift = 0.4
rng_seed = 22
)";

fs::path temp_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string golden_ssq_csv(const std::array<int, 16>& severities) {
  std::ostringstream out;
  out << "symptom,severity\n";
  for (std::size_t i = 0; i < 16; ++i) {
    out << inference::kSsqSymptoms[i] << ',' << severities[i] << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("config parses sections, values and profiles") {
  const auto cfg = parse_config(kGoodConfig);
  CHECK(cfg.hp.alpha == 0.05);
  CHECK(cfg.hp.gamma == 0.001);
  CHECK(cfg.session.stage_len_s == 24.0);
  CHECK(cfg.session.fs == 128.0);
  CHECK(cfg.session.n_stages == 4);
  CHECK(cfg.session.seed == 77);
  CHECK(cfg.train_sessions == 6);
  CHECK(cfg.wcst.rule_switch_prob == 0.1);
  REQUIRE(cfg.profiles.size() == 2);
  CHECK(cfg.profiles[0].id == "alpha");
  CHECK(cfg.profiles[0].vr_learning_gain == 0.5);
  CHECK(cfg.profiles[1].id == "beta");
  CHECK(cfg.profiles[1].drowsiness_drift == 0.4);
  CHECK(cfg.config_hash == fnv1a_hash(kGoodConfig));
}

TEST_CASE("config reports every problem at once") {
  const char* bad = R"(
[rl]
alpha = nope
gamma = 2.0

[session]
stage_len_s = 3
mystery = 1

[participant]
)";
  try {
    parse_config(bad);
    FAIL("expected config_error");
  } catch (const config_error& e) {
    const std::string msg = e.what();
    // alpha parse, unknown key, missing id, gamma range, stage_len range
    CHECK(msg.find("bad numeric value for 'alpha'") != std::string::npos);
    CHECK(msg.find("unknown [session] key 'mystery'") != std::string::npos);
    CHECK(msg.find("participant section needs an id") != std::string::npos);
    CHECK(msg.find("gamma") != std::string::npos);
    CHECK(msg.find("stage_len_s") != std::string::npos);
    std::size_t bullets = 0;
    for (std::size_t pos = 0; (pos = msg.find("\n  - ", pos)) != std::string::npos; ++pos) ++bullets;
    CHECK(bullets >= 5);
  }
}

TEST_CASE("run-sim writes reproducible reports whose improvement matches the transcript") {
  auto cfg = parse_config(kGoodConfig);
  cfg.train_sessions = 4;

  const auto dir_a = temp_dir("erudite_cli_a");
  const auto dir_b = temp_dir("erudite_cli_b");
  const auto report_a = cmd_run_sim(cfg, dir_a.string());
  const auto report_b = cmd_run_sim(cfg, dir_b.string());

  CHECK(slurp(dir_a / "report.json") == slurp(dir_b / "report.json"));
  CHECK(report_a["config_hash"] == report_b["config_hash"]);

  for (const auto& p : report_a["participants"]) {
    const auto id = p["id"].get<std::string>();
    std::ifstream tr(dir_a / (id + "_transcript.csv"));
    const auto records = read_transcript_csv(tr);
    CHECK(records.size() == 5);  // baseline + 4 stages
    CHECK(p["improvement_pct"].get<double>() ==
          doctest::Approx(sim::session_improvement_pct(records)).epsilon(1e-12));
    CHECK(p["baseline_composite"].get<double>() ==
          doctest::Approx(sim::stage_composite(records.front())).epsilon(1e-12));
  }

  // Q-table files round trip.
  std::ifstream qt(dir_a / "alpha.qtable", std::ios::binary);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(qt)),
                                  std::istreambuf_iterator<char>());
  CHECK_NOTHROW(rl::load_qtable(bytes));

  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
}

TEST_CASE("run-sim with zero stages yields a baseline-only report with zero improvement") {
  auto cfg = parse_config(kGoodConfig);
  cfg.session.n_stages = 0;
  cfg.train_sessions = 0;
  const auto runs = run_simulation(cfg);
  for (const auto& run : runs) {
    CHECK(run.transcript.size() == 1);
    CHECK(run.improvement_pct == 0.0);
  }
}

TEST_CASE("ssq csv scoring handles the golden forms and rejects bad input") {
  std::array<int, 16> zeros{};
  std::istringstream all_zero(golden_ssq_csv(zeros));
  auto s = inference::ssq_score(read_ssq_csv(all_zero));
  CHECK(s.ts == 0.0);
  CHECK(inference::ssq_binary(s) == 1);

  std::array<int, 16> threes;
  threes.fill(3);
  std::istringstream all_three(golden_ssq_csv(threes));
  s = inference::ssq_score(read_ssq_csv(all_three));
  CHECK(s.ts == doctest::Approx(235.62).epsilon(1e-12));
  CHECK(inference::ssq_binary(s) == 0);

  std::array<int, 16> nausea{};
  nausea[7] = 2;
  std::istringstream nausea_form(golden_ssq_csv(nausea));
  s = inference::ssq_score(read_ssq_csv(nausea_form));
  CHECK(s.ts == doctest::Approx(14.96).epsilon(1e-12));
  CHECK(inference::ssq_binary(s) == 1);

  std::array<int, 16> bad{};
  bad[2] = 4;
  std::istringstream bad_form(golden_ssq_csv(bad));
  try {
    read_ssq_csv(bad_form);
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }

  std::istringstream wrong_order("symptom,severity\nfatigue,1\n");
  CHECK_THROWS_AS(read_ssq_csv(wrong_order), validation_error);
}

TEST_CASE("eeg csv round trips and validates rows") {
  sim::ParticipantProfile profile;
  Rng rng(4);
  auto buf = sim::generate_eeg({1, 1, 1}, 16.0, 128.0, profile, rng);
  buf.channel_label = "F3";
  std::ostringstream out;
  write_eeg_csv(out, buf);

  std::istringstream in(out.str());
  const auto back = read_eeg_csv(in);
  CHECK(back.channel_label == "F3");
  CHECK(back.samples.size() == buf.samples.size());
  CHECK(back.fs == doctest::Approx(128.0).epsilon(1e-6));
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(back.samples[i] == doctest::Approx(buf.samples[i]).epsilon(1e-9));
  }

  std::istringstream bad_header("time,chan,val\n0,a,1\n");
  CHECK_THROWS_AS(read_eeg_csv(bad_header), validation_error);

  std::istringstream bad_row("t_s,channel,uv\n0,F3,1.0\n0.01,F3,oops\n");
  try {
    read_eeg_csv(bad_row);
    FAIL("expected validation_error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  std::istringstream nonmono("t_s,channel,uv\n0,F3,1.0\n0,F3,2.0\n");
  CHECK_THROWS_AS(read_eeg_csv(nonmono), validation_error);
}

TEST_CASE("analyze emits one row per window with the calibrated band power") {
  sim::ParticipantProfile profile;
  Rng rng(9);
  const auto buf = sim::generate_eeg({1, 1, 1}, 19.0, 128.0, profile, rng);
  std::ostringstream out;
  cmd_analyze(buf, out);

  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  CHECK(header.rfind("start_s,band_power,fd,f1", 0) == 0);
  std::size_t rows = 0;
  double power_acc = 0.0;
  std::string line;
  while (std::getline(lines, line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv_row(line);
    REQUIRE(cells.size() == 32);  // start_s, band_power, fd, f1..f29
    power_acc += std::stod(cells[1]);
    const double fd = std::stod(cells[2]);
    CHECK(fd >= 1.0);
    CHECK(fd <= 2.0);
    ++rows;
  }
  CHECK(rows == 6);  // 19 s -> floor((19-4)/3)+1
  CHECK(power_acc / static_cast<double>(rows) == doctest::Approx(0.127 * 1.7652).epsilon(0.10));

  // Empty input: header only.
  dsp::SampleBuffer empty;
  empty.fs = 128.0;
  std::ostringstream empty_out;
  cmd_analyze(empty, empty_out);
  std::istringstream empty_lines(empty_out.str());
  std::getline(empty_lines, header);
  CHECK(!std::getline(empty_lines, line));
}

#ifdef ERUDITE_CLI_PATH
TEST_CASE("cli subprocesses: score-ssq, analyze and an edge/cloud loopback session") {
  const std::string cli = ERUDITE_CLI_PATH;
  const auto dir = temp_dir("erudite_cli_proc");

  // score-ssq golden form.
  std::array<int, 16> threes;
  threes.fill(3);
  {
    std::ofstream f(dir / "form.csv");
    f << golden_ssq_csv(threes);
  }
  CHECK(std::system((cli + " score-ssq " + (dir / "form.csv").string() + " > " +
                     (dir / "ssq.out").string())
                        .c_str()) == 0);
  CHECK(slurp(dir / "ssq.out").find("TS=235.62") != std::string::npos);

  // analyze: malformed row exits with the validation code and names the line.
  {
    std::ofstream f(dir / "bad.csv");
    f << "t_s,channel,uv\n0,F3,1.0\nbroken\n";
  }
  const int rc = std::system(
      (cli + " analyze " + (dir / "bad.csv").string() + " > /dev/null 2> " +
       (dir / "analyze.err").string())
          .c_str());
  CHECK(WEXITSTATUS(rc) == 1);
  CHECK(slurp(dir / "analyze.err").find("line 3") != std::string::npos);

  // Loopback session: cloud in the background, edge to completion.
  {
    std::ofstream f(dir / "loop.conf");
    f << kGoodConfig;
  }
  const std::string port_file = (dir / "port").string();
  std::thread cloud([&] {
    const int rc_cloud = std::system((cli + " cloud --listen 127.0.0.1:0 --config " + (dir / "loop.conf").string() +
                 " --qtable-path " + (dir / "qt").string() + " --port-file " + port_file +
                 " --serve-seconds 20 > /dev/null 2>&1")
                    .c_str());
    (void)rc_cloud;
  });
  std::uint16_t port = 0;
  for (int i = 0; i < 100 && port == 0; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    std::ifstream pf(port_file);
    int p = 0;
    if (pf >> p && p > 0) port = static_cast<std::uint16_t>(p);
  }
  REQUIRE(port != 0);
  const int edge_rc = std::system((cli + " edge --connect 127.0.0.1:" + std::to_string(port) +
                                   " --config " + (dir / "loop.conf").string() +
                                   " --participant alpha --latency-ms 5 --out " +
                                   (dir / "edge.csv").string() + " 2> /dev/null")
                                      .c_str());
  CHECK(WEXITSTATUS(edge_rc) == 0);
  std::ifstream tr(dir / "edge.csv");
  const auto records = read_transcript_csv(tr);
  CHECK(records.size() == 5);  // baseline + 4 stages per the config
  CHECK(fs::exists(dir / "qt" / "alpha.qtable"));
  cloud.join();
  fs::remove_all(dir);
}
#endif
