#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "qfm/circuit.hpp"
#include "qfm/measurement.hpp"
#include "qfm/resonator.hpp"

namespace qfm {

// A sweep axis written as "min:max:step", "lo:hi:log[:points_per_decade]"
// or a comma list "a,b,c". Values carry the axis unit (e.g. "1kHz:1MHz:log").
struct Grid {
  enum class Kind { kLinear, kLog, kList };

  Kind kind = Kind::kList;
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;
  std::size_t per_decade = 10;
  std::vector<double> list;

  static Grid parse(std::string_view text, std::string_view unit);
  static Grid single(double value);
  static Grid linear(double lo, double hi, double step);

  std::vector<double> values() const;
  // Linear grids only; throws ConfigError otherwise.
  Range as_range() const;
  std::string to_string() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

// Everything a command needs. Defaults reproduce the reference scenario:
// f0 = 50 kHz, Q = 300, V0 = 1 V, k = 6, ideal circuit.
struct RunConfig {
  ResonatorParams resonator;
  MeasurementConfig measurement;
  CircuitNonIdealities circuit;
  int samples_per_period = 100;
  std::uint64_t seed = 0;

  Grid k_sweep = Grid{Grid::Kind::kList, 0, 0, 1, 10, {2, 4, 6, 8, 16}};
  Grid q_sweep = Grid::linear(10, 1000, 1);
  Grid f0_sweep = Grid{Grid::Kind::kLog, 100, 4e6, 1, 10, {}};
  bool exhaustive = false;

  double duration = 5e-3;     // s, synthesized record length
  double sample_rate = 0.0;   // Hz, 0 means samples_per_period * f0
  double hysteresis = -1.0;   // V, negative means 1 % of the record's peak |v|
  double amplitude_floor = 0.0;  // V

  // Applies one `key = value` setting. Scalar q, k or f0 also collapse the
  // matching sweep to that single point; a range or list sets only the sweep.
  void apply(std::string_view key, std::string_view value);

  // Range checks shared by every command.
  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Keys accepted by RunConfig::apply, in dump order.
const std::vector<std::string>& config_keys();

// Line-oriented `key = value` text, `#` starts a comment.
void load_config(std::istream& in, RunConfig& config);
void load_config(const std::filesystem::path& path, RunConfig& config);

// Writes every key such that load_config reproduces the same RunConfig.
void dump_config(std::ostream& out, const RunConfig& config);

}  // namespace qfm
