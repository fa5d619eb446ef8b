#include "peerloc/scenario_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace peerloc {

namespace {

constexpr std::string_view kHeader = "# peerloc scenario v1";

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("scenario parse error at line " +
                           std::to_string(line_no) + ": " + what);
}

class Tokens {
 public:
  explicit Tokens(std::string_view line) : rest_(line) {}

  bool next(std::string_view& tok) {
    while (!rest_.empty() && (rest_.front() == ' ' || rest_.front() == '\t')) {
      rest_.remove_prefix(1);
    }
    if (rest_.empty()) return false;
    std::size_t end = rest_.find_first_of(" \t");
    tok = rest_.substr(0, end);
    rest_.remove_prefix(end == std::string_view::npos ? rest_.size() : end);
    return true;
  }

 private:
  std::string_view rest_;
};

struct LineParser {
  Tokens tokens;
  std::size_t line_no;

  std::string_view word(const char* what) {
    std::string_view tok;
    if (!tokens.next(tok)) fail(line_no, std::string("missing ") + what);
    return tok;
  }
  double number(const char* what) {
    const std::string_view tok = word(what);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      fail(line_no, std::string("bad number for ") + what);
    }
    return v;
  }
  long long integer(const char* what) {
    const std::string_view tok = word(what);
    long long v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      fail(line_no, std::string("bad integer for ") + what);
    }
    return v;
  }
  std::uint64_t unsigned_integer(const char* what) {
    const std::string_view tok = word(what);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size()) {
      fail(line_no, std::string("bad integer for ") + what);
    }
    return v;
  }
};

const char* layout_name(AnchorLayoutKind k) {
  switch (k) {
    case AnchorLayoutKind::kTwoRows: return "two-rows";
    case AnchorLayoutKind::kGrid: return "grid";
    case AnchorLayoutKind::kExplicit: return "explicit";
  }
  return "?";
}

AnchorLayoutKind layout_from_name(std::string_view name, std::size_t line_no) {
  if (name == "two-rows") return AnchorLayoutKind::kTwoRows;
  if (name == "grid") return AnchorLayoutKind::kGrid;
  if (name == "explicit") return AnchorLayoutKind::kExplicit;
  fail(line_no, "unknown anchor layout");
}

}  // namespace

void save_scenario(const Scenario& scenario, std::ostream& out) {
  const ScenarioConfig& c = scenario.config();
  out << kHeader << '\n';
  out << "config n_mobile " << c.n_mobile << '\n';
  out << "config n_anchor " << c.n_anchor << '\n';
  out << "config grid_width " << fmt(c.grid_width) << '\n';
  out << "config grid_height " << fmt(c.grid_height) << '\n';
  out << "config comm_radius " << fmt(c.comm_radius) << '\n';
  out << "config velocity_per_step " << fmt(c.velocity_per_step) << '\n';
  out << "config n_steps " << c.n_steps << '\n';
  out << "config alpha " << fmt(c.params.alpha) << '\n';
  out << "config sigma_los " << fmt(c.params.sigma_los) << '\n';
  out << "config sigma_nlos " << fmt(c.params.sigma_nlos) << '\n';
  out << "config sigma_ins " << fmt(c.params.sigma_ins) << '\n';
  out << "config p01 " << fmt(c.p01) << '\n';
  out << "config curve_amplitude " << fmt(c.curve_amplitude) << '\n';
  out << "config curve_period " << fmt(c.curve_period) << '\n';
  out << "config seed " << c.seed << '\n';
  out << "config particle_count " << c.particle_count << '\n';
  out << "config anchor_layout " << layout_name(c.anchor_layout.kind) << '\n';
  for (const Vec2& p : c.anchor_layout.positions) {
    out << "config anchor_pos " << fmt(p.x) << ' ' << fmt(p.y) << '\n';
  }

  const GroundTruth& truth = scenario.truth;
  for (int id = 0; id < c.n_nodes(); ++id) {
    const Vec2& p = truth.position(0, id);
    out << "node " << id << ' '
        << (truth.kinds[id] == NodeKind::kMobile ? "mobile" : "anchor") << ' '
        << fmt(p.x) << ' ' << fmt(p.y) << '\n';
  }
  for (int t = 1; t <= c.n_steps; ++t) {
    for (int k = 0; k < c.n_mobile; ++k) {
      const Vec2& p = truth.position(t, k);
      out << "pos " << t << ' ' << k << ' ' << fmt(p.x) << ' ' << fmt(p.y)
          << '\n';
    }
  }
  std::string bits(static_cast<std::size_t>(c.n_steps), '0');
  for (std::size_t p = 0; p < truth.pairs.size(); ++p) {
    for (int t = 0; t < c.n_steps; ++t) {
      bits[t] = truth.z[p * c.n_steps + t] ? '1' : '0';
    }
    out << "zchain " << truth.pairs[p].k << ' ' << truth.pairs[p].m << ' '
        << bits << '\n';
  }
  for (const auto& step : scenario.measurements) {
    for (const RangingMeasurement& m : step) {
      out << "meas " << m.t << ' ' << m.k << ' ' << m.m << ' ' << fmt(m.theta)
          << '\n';
    }
  }
  for (const auto& step : scenario.ins) {
    for (const InsReading& r : step) {
      out << "ins " << r.t << ' ' << r.k << ' ' << fmt(r.dx) << ' '
          << fmt(r.dy) << '\n';
    }
  }
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  std::ostringstream buf;
  save_scenario(scenario, buf);
  out << buf.str();
  if (!out) throw std::runtime_error("write failed: " + path);
}

Scenario load_scenario(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) {
    throw std::runtime_error("not a peerloc scenario file (bad header)");
  }

  Scenario s;
  ScenarioConfig& c = s.truth.config;
  c.anchor_layout.positions.clear();
  bool sized = false;
  std::size_t line_no = 1;

  const auto finalize = [&] {
    if (sized) return;
    c.validate();
    const int n = c.n_nodes();
    s.truth.kinds.assign(n, NodeKind::kMobile);
    s.truth.positions.assign(static_cast<std::size_t>(c.n_steps + 1) * n, Vec2{});
    s.truth.pairs.clear();
    s.truth.z.clear();
    s.measurements.assign(c.n_steps, {});
    s.ins.assign(c.n_steps, {});
    sized = true;
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    LineParser p{Tokens(line), line_no};
    const std::string_view kind = p.word("record type");

    if (kind == "config") {
      if (sized) fail(line_no, "config line after data records");
      const std::string_view key = p.word("config key");
      if (key == "n_mobile") c.n_mobile = static_cast<int>(p.integer("value"));
      else if (key == "n_anchor") c.n_anchor = static_cast<int>(p.integer("value"));
      else if (key == "grid_width") c.grid_width = p.number("value");
      else if (key == "grid_height") c.grid_height = p.number("value");
      else if (key == "comm_radius") c.comm_radius = p.number("value");
      else if (key == "velocity_per_step") c.velocity_per_step = p.number("value");
      else if (key == "n_steps") c.n_steps = static_cast<int>(p.integer("value"));
      else if (key == "alpha") c.params.alpha = p.number("value");
      else if (key == "sigma_los") c.params.sigma_los = p.number("value");
      else if (key == "sigma_nlos") c.params.sigma_nlos = p.number("value");
      else if (key == "sigma_ins") c.params.sigma_ins = p.number("value");
      else if (key == "p01") c.p01 = p.number("value");
      else if (key == "curve_amplitude") c.curve_amplitude = p.number("value");
      else if (key == "curve_period") c.curve_period = p.number("value");
      else if (key == "seed") c.seed = p.unsigned_integer("value");
      else if (key == "particle_count") c.particle_count = static_cast<int>(p.integer("value"));
      else if (key == "anchor_layout") c.anchor_layout.kind = layout_from_name(p.word("value"), line_no);
      else if (key == "anchor_pos") {
        const double x = p.number("x");
        c.anchor_layout.positions.push_back({x, p.number("y")});
      } else {
        fail(line_no, "unknown config key");
      }
    } else if (kind == "node") {
      finalize();
      const int id = static_cast<int>(p.integer("node id"));
      if (id < 0 || id >= c.n_nodes()) fail(line_no, "node id out of range");
      const std::string_view k = p.word("node kind");
      if (k != "mobile" && k != "anchor") fail(line_no, "unknown node kind");
      const bool expected_mobile = c.is_mobile(id);
      if (expected_mobile != (k == "mobile")) fail(line_no, "node kind mismatch");
      s.truth.kinds[id] = expected_mobile ? NodeKind::kMobile : NodeKind::kAnchor;
      const double x = p.number("x");
      const double y = p.number("y");
      if (expected_mobile) {
        s.truth.positions[id] = {x, y};
      } else {
        for (int t = 0; t <= c.n_steps; ++t) {
          s.truth.positions[static_cast<std::size_t>(t) * c.n_nodes() + id] = {x, y};
        }
      }
    } else if (kind == "pos") {
      finalize();
      const int t = static_cast<int>(p.integer("t"));
      const int id = static_cast<int>(p.integer("node id"));
      if (t < 1 || t > c.n_steps) fail(line_no, "pos step out of range");
      if (id < 0 || !c.is_mobile(id)) fail(line_no, "pos node must be mobile");
      const double x = p.number("x");
      s.truth.positions[static_cast<std::size_t>(t) * c.n_nodes() + id] = {x, p.number("y")};
    } else if (kind == "zchain") {
      finalize();
      const int k = static_cast<int>(p.integer("k"));
      const int m = static_cast<int>(p.integer("m"));
      const std::string_view bits = p.word("bits");
      if (static_cast<int>(bits.size()) != c.n_steps) fail(line_no, "zchain length != n_steps");
      if (!s.truth.pairs.empty() && !(s.truth.pairs.back() < NodePair{k, m})) {
        fail(line_no, "zchain records out of order");
      }
      s.truth.pairs.push_back({k, m});
      for (char b : bits) {
        if (b != '0' && b != '1') fail(line_no, "zchain bits must be 0/1");
        s.truth.z.push_back(b == '1' ? 1 : 0);
      }
    } else if (kind == "meas") {
      finalize();
      const int t = static_cast<int>(p.integer("t"));
      if (t < 1 || t > c.n_steps) fail(line_no, "meas step out of range");
      const int k = static_cast<int>(p.integer("k"));
      const int m = static_cast<int>(p.integer("m"));
      s.measurements[t - 1].push_back({t, k, m, p.number("theta")});
    } else if (kind == "ins") {
      finalize();
      const int t = static_cast<int>(p.integer("t"));
      if (t < 1 || t > c.n_steps) fail(line_no, "ins step out of range");
      const int k = static_cast<int>(p.integer("k"));
      if (k < 0 || !c.is_mobile(k)) fail(line_no, "ins node must be mobile");
      const double dx = p.number("dx");
      s.ins[t - 1].push_back({t, k, dx, p.number("dy")});
    } else {
      fail(line_no, "unknown record type");
    }
  }
  finalize();  // covers data-free scenarios (n_steps >= 1 but no mobiles)
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return load_scenario(in);
}

}  // namespace peerloc
