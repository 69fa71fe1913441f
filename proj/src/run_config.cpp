#include "qfm/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "qfm/error_analysis.hpp"
#include "qfm/errors.hpp"
#include "qfm/sweep_table.hpp"
#include "qfm/units.hpp"

namespace qfm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = s.find(sep, begin);
    parts.push_back(trim(s.substr(begin, pos - begin)));
    if (pos == std::string_view::npos) break;
    begin = pos + 1;
  }
  return parts;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

template <typename Int>
Int parse_int(std::string_view v, const char* what) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(std::string("expected an integer for ") + what + ", got '" +
                      std::string(v) + "'");
  }
  return out;
}

bool is_grid(std::string_view v) {
  return v.find(':') != std::string_view::npos || v.find(',') != std::string_view::npos;
}

}  // namespace

Grid Grid::single(double value) { return Grid{Kind::kList, 0, 0, 1, 10, {value}}; }

Grid Grid::linear(double lo, double hi, double step) {
  return Grid{Kind::kLinear, lo, hi, step, 10, {}};
}

Grid Grid::parse(std::string_view text, std::string_view unit) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos) {
    const auto parts = split(text, ':');
    if (parts.size() < 3 || parts.size() > 4) {
      throw ConfigError("range '" + std::string(text) + "' must be min:max:step or lo:hi:log[:n]");
    }
    Grid g;
    g.lo = parse_quantity(parts[0], unit);
    g.hi = parse_quantity(parts[1], unit);
    if (parts[2] == "log") {
      g.kind = Kind::kLog;
      if (parts.size() == 4) {
        g.per_decade = parse_int<std::size_t>(parts[3], "points per decade");
      }
    } else {
      if (parts.size() != 3) {
        throw ConfigError("linear range '" + std::string(text) + "' must be min:max:step");
      }
      g.kind = Kind::kLinear;
      g.step = parse_quantity(parts[2], unit);
    }
    g.values();
    return g;
  }
  Grid g;
  g.kind = Kind::kList;
  for (std::string_view part : split(text, ',')) {
    g.list.push_back(parse_quantity(part, unit));
  }
  return g;
}

std::vector<double> Grid::values() const {
  switch (kind) {
    case Kind::kLinear:
      return Range{lo, hi, step}.values();
    case Kind::kLog:
      return log_space(lo, hi, per_decade);
    case Kind::kList:
      if (list.empty()) throw ConfigError("empty value list");
      return list;
  }
  return {};
}

Range Grid::as_range() const {
  if (kind == Kind::kLinear) return Range{lo, hi, step};
  if (kind == Kind::kList && list.size() == 1) return Range{list[0], list[0], 1.0};
  throw ConfigError("expected a min:max:step range, got '" + to_string() + "'");
}

std::string Grid::to_string() const {
  switch (kind) {
    case Kind::kLinear:
      return format_double(lo) + ':' + format_double(hi) + ':' + format_double(step);
    case Kind::kLog:
      return format_double(lo) + ':' + format_double(hi) + ":log:" + std::to_string(per_decade);
    case Kind::kList: {
      std::string out;
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ',';
        out += format_double(list[i]);
      }
      return out;
    }
  }
  return {};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "f0",      "q",       "v0",        "k",        "convention", "shortcut", "offset",
      "dk",      "opamp_offset", "leak", "diode",    "fbw",        "ffail",    "noise",
      "sign",    "spp",     "seed",      "k_sweep",  "q_sweep",    "f0_sweep", "exhaustive",
      "duration", "rate",   "hyst",      "floor"};
  return keys;
}

void RunConfig::apply(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "f0") {
    if (is_grid(value)) {
      f0_sweep = Grid::parse(value, "Hz");
    } else {
      resonator.f0 = parse_quantity(value, "Hz");
      f0_sweep = Grid::single(resonator.f0);
    }
  } else if (key == "q") {
    if (is_grid(value)) {
      q_sweep = Grid::parse(value, "");
    } else {
      resonator.q = parse_quantity(value, "");
      q_sweep = Grid::single(resonator.q);
    }
  } else if (key == "k") {
    if (is_grid(value)) {
      k_sweep = Grid::parse(value, "");
    } else {
      measurement.k = parse_quantity(value, "");
      k_sweep = Grid::single(measurement.k);
    }
  } else if (key == "v0") {
    resonator.v0 = parse_quantity(value, "V");
  } else if (key == "convention") {
    measurement.convention = parse_convention(value);
  } else if (key == "shortcut") {
    measurement.shortcut = parse_bool(value);
  } else if (key == "offset") {
    circuit.comparator_offset = parse_quantity(value, "V");
  } else if (key == "dk") {
    circuit.divider_error = parse_quantity(value, "");
  } else if (key == "opamp_offset") {
    circuit.opamp_offset = parse_quantity(value, "V");
  } else if (key == "leak") {
    circuit.leak_droop = parse_quantity(value, "V/s");
  } else if (key == "diode") {
    circuit.diode_residual = parse_quantity(value, "V");
  } else if (key == "fbw") {
    circuit.detector_bandwidth = parse_quantity(value, "Hz");
  } else if (key == "ffail") {
    circuit.diode_fail_freq = parse_quantity(value, "Hz");
  } else if (key == "noise") {
    circuit.noise_rms = parse_quantity(value, "V");
  } else if (key == "sign") {
    circuit.worst_case_sign = parse_sign_mode(value);
  } else if (key == "spp") {
    samples_per_period = parse_int<int>(value, "spp");
  } else if (key == "seed") {
    seed = parse_int<std::uint64_t>(value, "seed");
  } else if (key == "k_sweep") {
    k_sweep = Grid::parse(value, "");
  } else if (key == "q_sweep") {
    q_sweep = Grid::parse(value, "");
  } else if (key == "f0_sweep") {
    f0_sweep = Grid::parse(value, "Hz");
  } else if (key == "exhaustive") {
    exhaustive = parse_bool(value);
  } else if (key == "duration") {
    duration = parse_quantity(value, "s");
  } else if (key == "rate") {
    sample_rate = parse_quantity(value, "Hz");
  } else if (key == "hyst") {
    hysteresis = parse_quantity(value, "V");
  } else if (key == "floor") {
    amplitude_floor = parse_quantity(value, "V");
  } else {
    throw ConfigError("unknown configuration key '" + std::string(key) + "'");
  }
}

void RunConfig::validate() const {
  qfm::validate(resonator);
  qfm::validate(measurement);
  qfm::validate(circuit);
  if (samples_per_period < 20) {
    throw ConfigError("spp (samples per period) must be >= 20");
  }
  if (!(duration > 0.0)) {
    throw ConfigError("duration must be > 0 s");
  }
  if (!(sample_rate >= 0.0)) {
    throw ConfigError("rate must be >= 0 Hz");
  }
}

void load_config(std::istream& in, RunConfig& config) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("config: expected 'key = value'", line_no);
    }
    try {
      config.apply(view.substr(0, eq), view.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ParseError(std::string("config: ") + e.what(), line_no);
    }
  }
}

void load_config(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config file " + path.string());
  }
  load_config(in, config);
}

void dump_config(std::ostream& out, const RunConfig& c) {
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "f0 = " << format_double(c.resonator.f0) << '\n'
      << "q = " << format_double(c.resonator.q) << '\n'
      << "v0 = " << format_double(c.resonator.v0) << '\n'
      << "k = " << format_double(c.measurement.k) << '\n'
      << "convention = " << to_string(c.measurement.convention) << '\n'
      << "shortcut = " << b(c.measurement.shortcut) << '\n'
      << "offset = " << format_double(c.circuit.comparator_offset) << '\n'
      << "dk = " << format_double(c.circuit.divider_error) << '\n'
      << "opamp_offset = " << format_double(c.circuit.opamp_offset) << '\n'
      << "leak = " << format_double(c.circuit.leak_droop) << '\n'
      << "diode = " << format_double(c.circuit.diode_residual) << '\n'
      << "fbw = " << format_double(c.circuit.detector_bandwidth) << '\n'
      << "ffail = " << format_double(c.circuit.diode_fail_freq) << '\n'
      << "noise = " << format_double(c.circuit.noise_rms) << '\n'
      << "sign = " << to_string(c.circuit.worst_case_sign) << '\n'
      << "spp = " << c.samples_per_period << '\n'
      << "seed = " << c.seed << '\n'
      << "k_sweep = " << c.k_sweep.to_string() << '\n'
      << "q_sweep = " << c.q_sweep.to_string() << '\n'
      << "f0_sweep = " << c.f0_sweep.to_string() << '\n'
      << "exhaustive = " << b(c.exhaustive) << '\n'
      << "duration = " << format_double(c.duration) << '\n'
      << "rate = " << format_double(c.sample_rate) << '\n'
      << "hyst = " << format_double(c.hysteresis) << '\n'
      << "floor = " << format_double(c.amplitude_floor) << '\n';
}

}  // namespace qfm
