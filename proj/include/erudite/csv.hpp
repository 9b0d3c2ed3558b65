#pragma once

#include <algorithm>
#include <charconv>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "erudite/errors.hpp"
#include "erudite/signal.hpp"

namespace erudite::cli {

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  cells.push_back(cell);
  return cells;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t')) --b;
  return s.substr(a, b - a);
}

inline double parse_double(const std::string& s, std::size_t line_no, const char* what) {
  const std::string t = trim(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw validation_error("line " + std::to_string(line_no) + ": bad " + what + " value '" + t + "'");
  }
}

inline long parse_long(const std::string& s, std::size_t line_no, const char* what) {
  const std::string t = trim(s);
  long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw validation_error("line " + std::to_string(line_no) + ": bad " + what + " value '" + t + "'");
  }
  return value;
}

// EEG sample CSV: header `t_s,channel,uv`, one row per sample, time strictly
// increasing per channel. Returns the requested channel (default: the first
// one seen) as a SampleBuffer, with the rate inferred from the median time
// step unless fs_override forces it. Malformed rows raise a validation error
// carrying the line number.
inline dsp::SampleBuffer read_eeg_csv(std::istream& in, const std::string& channel = "",
                                      double fs_override = 0.0) {
  std::string line;
  std::size_t line_no = 0;
  dsp::SampleBuffer buf;
  buf.fs = fs_override > 0.0 ? fs_override : 1.0;
  if (!std::getline(in, line)) return buf;
  ++line_no;
  {
    const auto header = split_csv_row(line);
    if (header.size() != 3 || trim(header[0]) != "t_s" || trim(header[1]) != "channel" ||
        trim(header[2]) != "uv") {
      throw validation_error("line 1: expected header 't_s,channel,uv'");
    }
  }

  std::vector<double> times;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_row(line);
    if (cells.size() != 3) {
      throw validation_error("line " + std::to_string(line_no) + ": expected 3 columns, got " +
                             std::to_string(cells.size()));
    }
    const double t = parse_double(cells[0], line_no, "t_s");
    const double uv = parse_double(cells[2], line_no, "uv");
    const std::string chan = trim(cells[1]);

    if (buf.channel_label.empty() && (channel.empty() || chan == channel)) {
      buf.channel_label = chan;
    }
    if (chan != buf.channel_label || buf.channel_label.empty()) continue;

    if (!times.empty() && !(t > times.back())) {
      throw validation_error("line " + std::to_string(line_no) +
                             ": time must be strictly increasing per channel");
    }
    times.push_back(t);
    buf.samples.push_back(uv);
  }

  if (fs_override <= 0.0 && times.size() >= 2) {
    std::vector<double> steps;
    steps.reserve(times.size() - 1);
    for (std::size_t i = 1; i < times.size(); ++i) steps.push_back(times[i] - times[i - 1]);
    std::nth_element(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2),
                     steps.end());
    const double dt = steps[steps.size() / 2];
    if (!(dt > 0.0)) throw validation_error("eeg csv: cannot infer sampling rate");
    buf.fs = 1.0 / dt;
  }
  return buf;
}

inline void write_eeg_csv(std::ostream& out, const dsp::SampleBuffer& buf) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << "t_s,channel,uv\n";
  const std::string label = buf.channel_label.empty() ? "ch0" : buf.channel_label;
  for (std::size_t i = 0; i < buf.samples.size(); ++i) {
    out << static_cast<double>(i) / buf.fs << ',' << label << ',' << buf.samples[i] << '\n';
  }
}

}  // namespace erudite::cli
