#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "erudite/config.hpp"
#include "erudite/csv.hpp"
#include "erudite/features.hpp"
#include "erudite/fractal.hpp"
#include "erudite/rl.hpp"
#include "erudite/session.hpp"
#include "erudite/ssq.hpp"

namespace erudite::cli {

using json = nlohmann::json;

// --- transcripts ---------------------------------------------------------

inline void write_transcript_csv(std::ostream& out, const std::vector<sim::StageRecord>& records) {
  out << std::setprecision(12);
  out << "stage,presentation,ls,ds,ssq,state_id,action,quiz,reward\n";
  for (const auto& r : records) {
    out << r.stage << ',' << sim::presentation_name(r.presentation) << ',' << r.inferred.ls << ','
        << r.inferred.ds << ',' << r.inferred.ssq << ',' << r.state_id << ','
        << rl::action_name(r.action) << ',' << r.quiz_correct << ',' << r.reward << '\n';
  }
}

// Inferred-state records only, one row per stage.
inline void write_state_csv(std::ostream& out, const std::vector<sim::StageRecord>& records) {
  out << "stage,ls,ds,ssq,state_id\n";
  for (const auto& r : records) {
    out << r.stage << ',' << r.inferred.ls << ',' << r.inferred.ds << ',' << r.inferred.ssq << ','
        << r.state_id << '\n';
  }
}

inline std::vector<sim::StageRecord> read_transcript_csv(std::istream& in) {
  std::vector<sim::StageRecord> records;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) return records;
  ++line_no;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_row(line);
    if (cells.size() != 9) {
      throw validation_error("line " + std::to_string(line_no) + ": expected 9 columns");
    }
    sim::StageRecord r;
    r.stage = static_cast<int>(parse_long(cells[0], line_no, "stage"));
    const std::string pres = trim(cells[1]);
    if (pres == "2D") r.presentation = sim::Presentation::two_d;
    else if (pres == "VR") r.presentation = sim::Presentation::vr;
    else if (pres == "break") r.presentation = sim::Presentation::rest;
    else throw validation_error("line " + std::to_string(line_no) + ": bad presentation");
    r.inferred.ls = static_cast<int>(parse_long(cells[2], line_no, "ls"));
    r.inferred.ds = static_cast<int>(parse_long(cells[3], line_no, "ds"));
    r.inferred.ssq = static_cast<int>(parse_long(cells[4], line_no, "ssq"));
    r.state_id = static_cast<int>(parse_long(cells[5], line_no, "state_id"));
    r.action = rl::action_from_name(trim(cells[6]));
    r.quiz_correct = static_cast<int>(parse_long(cells[7], line_no, "quiz"));
    r.reward = parse_double(cells[8], line_no, "reward");
    records.push_back(r);
  }
  return records;
}

// --- run-sim ------------------------------------------------------------

struct ParticipantRun {
  sim::ParticipantProfile profile;
  std::vector<sim::StageRecord> transcript;  // greedy evaluation session
  rl::QTable table;
  double improvement_pct = 0.0;
};

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
  return Rng(base).stream(salt).seed();
}

// Train one adaptation engine per participant, then record a frozen greedy
// evaluation session.
inline std::vector<ParticipantRun> run_simulation(const Config& cfg) {
  std::vector<ParticipantRun> runs;
  for (const auto& profile : cfg.profiles) {
    ParticipantRun run;
    run.profile = profile;
    rl::QLearningEngine engine(cfg.hp,
                               Rng(cfg.session.seed).stream(fnv1a_hash(profile.id)));
    for (int t = 0; t < cfg.train_sessions; ++t) {
      sim::SessionConfig sc = cfg.session;
      sc.seed = derive_seed(cfg.session.seed, 0x1000 + static_cast<std::uint64_t>(t));
      sim::run_session(profile, engine, sc);
    }
    sim::SessionConfig eval = cfg.session;
    eval.seed = derive_seed(cfg.session.seed, 0x9000);
    eval.greedy = true;
    eval.learn = false;
    run.transcript = sim::run_session(profile, engine, eval);
    run.table = engine.table();
    run.improvement_pct = sim::session_improvement_pct(run.transcript);
    runs.push_back(std::move(run));
  }
  return runs;
}

inline json stage_to_json(const sim::StageRecord& r) {
  return json{{"stage", r.stage},
              {"presentation", sim::presentation_name(r.presentation)},
              {"ls", r.inferred.ls},
              {"ds", r.inferred.ds},
              {"ssq", r.inferred.ssq},
              {"state_id", r.state_id},
              {"action", rl::action_name(r.action)},
              {"quiz", r.quiz_correct},
              {"reward", r.reward}};
}

inline json build_report(const Config& cfg, const std::vector<ParticipantRun>& runs) {
  json report;
  {
    std::ostringstream hash;
    hash << std::hex << std::setfill('0') << std::setw(16) << cfg.config_hash;
    report["config_hash"] = hash.str();
  }
  report["train_sessions"] = cfg.train_sessions;
  report["n_stages"] = cfg.session.n_stages;
  json participants = json::array();
  double mean_improvement = 0.0;
  for (const auto& run : runs) {
    json p;
    p["id"] = run.profile.id;
    p["improvement_pct"] = run.improvement_pct;
    p["baseline_composite"] = sim::stage_composite(run.transcript.front());
    p["final_composite"] = sim::stage_composite(run.transcript.back());
    json stages = json::array();
    for (const auto& r : run.transcript) stages.push_back(stage_to_json(r));
    p["stages"] = stages;
    json policy;
    json qtable = json::array();
    for (int s = 1; s <= inference::kStateCount; ++s) {
      const auto& row = run.table.q[static_cast<std::size_t>(s - 1)];
      int best = 0;
      for (int a = 1; a < rl::kActionCount; ++a) {
        if (row[a] > row[best]) best = a;
      }
      policy["s" + std::to_string(s)] = rl::action_name(rl::action_from_index(best));
      qtable.push_back(std::vector<double>(row.begin(), row.end()));
    }
    p["policy"] = policy;
    p["q"] = qtable;
    participants.push_back(std::move(p));
    mean_improvement += run.improvement_pct;
  }
  report["participants"] = std::move(participants);
  report["mean_improvement_pct"] =
      runs.empty() ? 0.0 : mean_improvement / static_cast<double>(runs.size());
  return report;
}

// Writes report.json, per-participant transcript CSVs and Q-table files.
inline json cmd_run_sim(const Config& cfg, const std::string& out_dir) {
  const auto runs = run_simulation(cfg);
  std::filesystem::create_directories(out_dir);
  for (const auto& run : runs) {
    std::ofstream tr(std::filesystem::path(out_dir) / (run.profile.id + "_transcript.csv"));
    write_transcript_csv(tr, run.transcript);
    std::ofstream st(std::filesystem::path(out_dir) / (run.profile.id + "_states.csv"));
    write_state_csv(st, run.transcript);
    const auto bytes = rl::save_qtable(run.table);
    std::ofstream qt(std::filesystem::path(out_dir) / (run.profile.id + ".qtable"),
                     std::ios::binary);
    qt.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  const json report = build_report(cfg, runs);
  std::ofstream out(std::filesystem::path(out_dir) / "report.json");
  out << report.dump(2) << '\n';
  return report;
}

// --- score-ssq ------------------------------------------------------------

// CSV form: `symptom,severity`, 16 rows in the questionnaire's order. The
// symptom names must match the form (case-insensitive).
inline inference::SsqResponse read_ssq_csv(std::istream& in) {
  inference::SsqResponse response;
  std::string line;
  std::size_t line_no = 0;
  std::size_t row = 0;
  const auto lower = [](std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_row(line);
    if (line_no == 1 && cells.size() == 2 && lower(trim(cells[0])) == "symptom") continue;
    if (cells.size() != 2) {
      throw validation_error("line " + std::to_string(line_no) + ": expected 'symptom,severity'");
    }
    if (row >= inference::kSsqSymptomCount) {
      throw validation_error("line " + std::to_string(line_no) + ": more than 16 symptom rows");
    }
    const std::string name = lower(trim(cells[0]));
    if (name != std::string(inference::kSsqSymptoms[row])) {
      throw validation_error("line " + std::to_string(line_no) + ": expected symptom '" +
                             std::string(inference::kSsqSymptoms[row]) + "', got '" + name + "'");
    }
    const long sev = parse_long(cells[1], line_no, "severity");
    if (sev < 0 || sev > 3) {
      throw validation_error("line " + std::to_string(line_no) + ": severity must be 0..3");
    }
    response.severities[row] = static_cast<int>(sev);
    ++row;
  }
  if (row != inference::kSsqSymptomCount) {
    throw validation_error("ssq csv: expected 16 symptom rows, got " + std::to_string(row));
  }
  return response;
}

// --- analyze ---------------------------------------------------------------

// Per-window metrics over an EEG buffer: `start_s,band_power,fd,f1..f29`.
inline void cmd_analyze(const dsp::SampleBuffer& buf, std::ostream& out, bool filter = true) {
  out << std::setprecision(12);
  out << "start_s,band_power,fd";
  for (int i = 1; i <= 29; ++i) out << ",f" << i;
  out << '\n';
  if (buf.samples.empty()) return;

  dsp::SampleBuffer prepared = buf;
  if (filter) {
    prepared = dsp::band_limit(dsp::remove_artifacts(buf));
  }
  const auto windows = dsp::segment_windows(prepared);
  for (const auto& w : windows) {
    const auto bp = dsp::band_power(w);
    dsp::SampleBuffer wbuf;
    wbuf.fs = w.fs;
    wbuf.samples = w.samples;
    const double fd = dsp::box_counting_fd(wbuf);
    const auto fv = dsp::feature_vector(w);
    out << w.start_time_s << ',' << bp.value << ',' << fd;
    for (const double v : fv.values) out << ',' << v;
    out << '\n';
  }
}

}  // namespace erudite::cli
