#include "peerloc/epoch_log_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace peerloc {

namespace {

constexpr std::string_view kHeader = "# peerloc epoch-log v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("epoch log parse error at line " +
                           std::to_string(line_no) + ": " + what);
}

template <typename T>
T parse_num(std::string_view tok, std::size_t line_no, const char* what) {
  T v{};
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) {
    fail(line_no, std::string("bad value for ") + what);
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size()) break;
    std::size_t j = line.find_first_of(" \t", i);
    if (j == std::string_view::npos) j = line.size();
    toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

}  // namespace

void write_epoch_log(const std::vector<EpochLog>& logs,
                     const std::vector<Estimator>& estimators, std::ostream& out) {
  out << kHeader << '\n';
  out << "# estimators:";
  for (Estimator e : estimators) out << ' ' << estimator_name(e);
  out << '\n';
  out << "# node <t> <estimator> <id> <true_x> <true_y> <est_x> <est_y> <error>"
         " [neighbor:z_true:z_detected ...]\n";
  const int pf_index =
      [&] {
        for (std::size_t i = 0; i < estimators.size(); ++i) {
          if (estimators[i] == Estimator::kParticleFilter) return static_cast<int>(i);
        }
        return -1;
      }();

  for (const EpochLog& log : logs) {
    out << "meta " << log.t << ' ' << log.measurement_count << ' '
        << log.reset_count << ' ' << log.degeneracy_count << '\n';
    for (std::size_t e = 0; e < estimators.size(); ++e) {
      for (const NodeEstimateRecord& rec : log.estimates[e]) {
        out << "node " << log.t << ' ' << estimator_name(estimators[e]) << ' '
            << rec.node << ' ' << fmt(rec.true_position.x) << ' '
            << fmt(rec.true_position.y) << ' ' << fmt(rec.estimate.x) << ' '
            << fmt(rec.estimate.y) << ' ' << fmt(rec.error());
        if (static_cast<int>(e) == pf_index) {
          for (const ZDetectionRecord& d : log.detections) {
            if (d.observer != rec.node) continue;
            out << ' ' << d.neighbor << ':' << static_cast<int>(d.z_true) << ':'
                << static_cast<int>(d.z_detected);
          }
        }
        out << '\n';
      }
    }
  }
}

void write_epoch_log(const std::vector<EpochLog>& logs,
                     const std::vector<Estimator>& estimators,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::ostringstream buf;
  write_epoch_log(logs, estimators, buf);
  out << buf.str();
  if (!out) throw std::runtime_error("write failed: " + path);
}

LogData read_epoch_log(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("not a peerloc epoch-log file (bad header)");
  }
  LogData data;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# estimators:", 0) == 0) {
      const auto toks = split(std::string_view(line).substr(13));
      for (const auto t : toks) data.estimators.emplace_back(t);
      continue;
    }
    if (line[0] == '#') continue;
    const auto toks = split(line);
    if (toks[0] == "meta") {
      if (toks.size() != 5) fail(line_no, "meta needs 4 fields");
      data.meta.push_back({parse_num<int>(toks[1], line_no, "t"),
                           parse_num<int>(toks[2], line_no, "measurements"),
                           parse_num<int>(toks[3], line_no, "resets"),
                           parse_num<int>(toks[4], line_no, "degeneracies")});
    } else if (toks[0] == "node") {
      if (toks.size() < 9) fail(line_no, "node row too short");
      LogData::NodeRow row;
      row.t = parse_num<int>(toks[1], line_no, "t");
      const auto it = std::find(data.estimators.begin(), data.estimators.end(),
                                std::string(toks[2]));
      if (it == data.estimators.end()) fail(line_no, "unknown estimator");
      row.estimator = static_cast<int>(it - data.estimators.begin());
      row.node = parse_num<int>(toks[3], line_no, "node");
      row.true_position = {parse_num<double>(toks[4], line_no, "true_x"),
                           parse_num<double>(toks[5], line_no, "true_y")};
      row.estimate = {parse_num<double>(toks[6], line_no, "est_x"),
                      parse_num<double>(toks[7], line_no, "est_y")};
      row.error = parse_num<double>(toks[8], line_no, "error");
      for (std::size_t i = 9; i < toks.size(); ++i) {
        const std::string_view tok = toks[i];
        const std::size_t c1 = tok.find(':');
        const std::size_t c2 = c1 == std::string_view::npos
                                   ? std::string_view::npos
                                   : tok.find(':', c1 + 1);
        if (c2 == std::string_view::npos) fail(line_no, "bad detection token");
        data.detections.push_back(
            {row.t, row.node,
             parse_num<int>(tok.substr(0, c1), line_no, "neighbor"),
             parse_num<int>(tok.substr(c1 + 1, c2 - c1 - 1), line_no, "z_true"),
             parse_num<int>(tok.substr(c2 + 1), line_no, "z_detected")});
      }
      data.rows.push_back(row);
    } else {
      fail(line_no, "unknown record type");
    }
  }
  return data;
}

LogData read_epoch_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open epoch log: " + path);
  return read_epoch_log(in);
}

}  // namespace peerloc
