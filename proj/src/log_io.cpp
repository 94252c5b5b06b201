#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "gsc/error.hpp"
#include "gsc/pipeline.hpp"

namespace gsc::pipeline {

std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::Pre: return "Pre";
    case Phase::Fault: return "Fault";
    case Phase::Post: return "Post";
  }
  return "Pre";
}

std::string_view polarity_name(Polarity p) {
  return p == Polarity::Forward ? "Forward" : "Reverse";
}

bool Trial::fully_labeled() const {
  return !phase.empty() &&
         std::all_of(phase.begin(), phase.end(), [](const auto& p) { return p.has_value(); });
}

ExperimentLog::ExperimentLog(std::vector<LogRow> rows) : rows_(std::move(rows)) {
  std::map<int, const LogRow*> last;
  for (const auto& row : rows_) {
    auto [it, inserted] = last.try_emplace(row.trial, &row);
    if (inserted) continue;
    if (!(row.t_s > it->second->t_s)) {
      throw DomainError("ExperimentLog: time is not strictly increasing in trial " +
                        std::to_string(row.trial));
    }
    if (row.sampling_ms != it->second->sampling_ms) {
      throw DomainError("ExperimentLog: trial " + std::to_string(row.trial) +
                        " mixes sampling intervals");
    }
    it->second = &row;
  }
}

std::vector<int> ExperimentLog::trial_ids() const {
  std::vector<int> ids;
  for (const auto& row : rows_) {
    if (std::find(ids.begin(), ids.end(), row.trial) == ids.end()) ids.push_back(row.trial);
  }
  return ids;
}

Trial ExperimentLog::trial(int id) const {
  Trial out;
  out.id = id;
  for (const auto& row : rows_) {
    if (row.trial != id) continue;
    if (out.t.empty()) {
      out.t_s = row.sampling_ms / 1000.0;
      out.polarity = row.polarity;
      out.supply_v = row.supply_v;
    }
    out.t.push_back(row.t_s);
    out.v.push_back(row.voltage_v);
    out.i.push_back(row.current_a);
    out.phase.push_back(row.phase);
  }
  if (out.t.empty()) throw DomainError("ExperimentLog: no trial " + std::to_string(id));
  return out;
}

namespace {

enum Column { kT, kVoltage, kCurrent, kPhase, kSampling, kTrial, kPolarity, kSupply, kColumns };

constexpr std::array<std::string_view, kColumns> kColumnNames = {
    "t_s", "voltage_v", "current_a", "phase", "sampling_ms", "trial", "polarity", "supply_v"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

double parse_double(std::string_view field, std::string_view column, std::size_t line) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
      !std::isfinite(value)) {
    throw ParseError("bad number '" + std::string(field) + "' in column " + std::string(column),
                     line);
  }
  return value;
}

int parse_int(std::string_view field, std::string_view column, std::size_t line) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("bad integer '" + std::string(field) + "' in column " +
                         std::string(column),
                     line);
  }
  return value;
}

std::optional<Phase> parse_phase(std::string_view field, std::size_t line) {
  const std::string p = lower(field);
  if (p.empty()) return std::nullopt;
  if (p == "pre") return Phase::Pre;
  if (p == "fault") return Phase::Fault;
  if (p == "post") return Phase::Post;
  throw ParseError("unknown phase '" + std::string(field) + "'", line);
}

Polarity parse_polarity(std::string_view field, std::size_t line) {
  const std::string p = lower(field);
  if (p == "forward") return Polarity::Forward;
  if (p == "reverse") return Polarity::Reverse;
  throw ParseError("unknown polarity '" + std::string(field) + "'", line);
}

std::array<std::size_t, kColumns> parse_header(std::string_view line, std::size_t line_no) {
  constexpr std::size_t kMissing = static_cast<std::size_t>(-1);
  std::array<std::size_t, kColumns> index;
  index.fill(kMissing);
  const auto fields = split(line);
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const auto it = std::find(kColumnNames.begin(), kColumnNames.end(), fields[f]);
    if (it == kColumnNames.end()) {
      throw ParseError("unknown column '" + std::string(fields[f]) + "'", line_no);
    }
    const auto c = static_cast<std::size_t>(it - kColumnNames.begin());
    if (index[c] != kMissing) {
      throw ParseError("duplicate column '" + std::string(fields[f]) + "'", line_no);
    }
    index[c] = f;
  }
  for (std::size_t c = 0; c < kColumns; ++c) {
    if (index[c] == kMissing) {
      throw ParseError("missing column '" + std::string(kColumnNames[c]) + "'", line_no);
    }
  }
  return index;
}

void append_number(std::string& out, double x) {
  std::array<char, 32> buf;
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  out.append(buf.data(), ptr);
}

}  // namespace

ExperimentLog parse_log(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::array<std::size_t, kColumns>> columns;
  std::vector<LogRow> rows;
  struct TrialState {
    double last_t;
    int sampling_ms;
  };
  std::map<int, TrialState> trials;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view(line);
    if (line_no == 1 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (trim(view).empty()) continue;

    if (!columns) {
      columns = parse_header(view, line_no);
      continue;
    }
    const auto fields = split(view);
    if (fields.size() != kColumns) {
      throw ParseError("expected " + std::to_string(kColumns) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    const auto& idx = *columns;
    auto field = [&](Column c) { return fields[idx[c]]; };

    LogRow row{};
    row.t_s = parse_double(field(kT), "t_s", line_no);
    row.voltage_v = parse_double(field(kVoltage), "voltage_v", line_no);
    row.current_a = parse_double(field(kCurrent), "current_a", line_no);
    row.phase = parse_phase(field(kPhase), line_no);
    row.sampling_ms = parse_int(field(kSampling), "sampling_ms", line_no);
    if (row.sampling_ms != 10 && row.sampling_ms != 50 && row.sampling_ms != 100) {
      throw ParseError("sampling_ms must be 10, 50 or 100", line_no);
    }
    row.trial = parse_int(field(kTrial), "trial", line_no);
    row.polarity = parse_polarity(field(kPolarity), line_no);
    row.supply_v = parse_double(field(kSupply), "supply_v", line_no);

    auto [it, inserted] = trials.try_emplace(row.trial, TrialState{row.t_s, row.sampling_ms});
    if (!inserted) {
      if (!(row.t_s > it->second.last_t)) {
        throw ParseError("time " + std::string(field(kT)) +
                             " does not increase within trial " + std::to_string(row.trial),
                         line_no);
      }
      if (row.sampling_ms != it->second.sampling_ms) {
        throw ParseError("sampling_ms changes within trial " + std::to_string(row.trial),
                         line_no);
      }
      it->second.last_t = row.t_s;
    }
    rows.push_back(row);
  }
  if (!columns) throw ParseError("no data rows (input is empty)", 0);
  if (rows.empty()) throw ParseError("no data rows", 0);
  return ExperimentLog(std::move(rows));
}

void write_log(std::ostream& out, const ExperimentLog& log) {
  std::string buf;
  buf.reserve(64 * (log.size() + 1));
  buf.append(kLogHeader);
  buf.push_back('\n');
  for (const auto& row : log.rows()) {
    append_number(buf, row.t_s);
    buf.push_back(',');
    append_number(buf, row.voltage_v);
    buf.push_back(',');
    append_number(buf, row.current_a);
    buf.push_back(',');
    if (row.phase) buf.append(phase_name(*row.phase));
    buf.push_back(',');
    buf.append(std::to_string(row.sampling_ms));
    buf.push_back(',');
    buf.append(std::to_string(row.trial));
    buf.push_back(',');
    buf.append(polarity_name(row.polarity));
    buf.push_back(',');
    append_number(buf, row.supply_v);
    buf.push_back('\n');
  }
  out << buf;
}

}  // namespace gsc::pipeline
