#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qfm/resonator.hpp"
#include "qfm/sweep_table.hpp"

namespace qfm {

// How the reported count relates to the first maximum at or below V0/k.
enum class CountConvention {
  kFirstAtOrBelow,  // n = index of that maximum
  kLastAbove,       // n = index of the maximum before it
};

std::string_view to_string(CountConvention c);
CountConvention parse_convention(std::string_view text);

struct MeasurementConfig {
  double k = 6.0;  // division factor, > 1
  CountConvention convention = CountConvention::kLastAbove;
  // Report Q as 2n instead of the closed form (meaningful near k = 4.81).
  bool shortcut = false;

  friend bool operator==(const MeasurementConfig&, const MeasurementConfig&) = default;
};

void validate(const MeasurementConfig& config);

struct MeasurementResult {
  std::int64_t n = 0;
  double q_measured = 0.0;
  std::optional<double> t_measure;       // n * T'0, s
  std::optional<double> relative_error;  // signed, (q_measured - q_true) / q_true
  double threshold_used = 0.0;           // V
  CountConvention convention = CountConvention::kLastAbove;
};

// Quality factor recovered from n pseudo-periods over a 1/k envelope decay:
// 0.5 * sqrt(1 + (2 pi n / ln k)^2).
double q_from_count(std::int64_t n, double k);

// 2n; the closed form collapses to this when ln k ~ pi/2 (k ~ 4.81).
double q_from_count_shortcut(std::int64_t n);

// Q from n using the config's shortcut flag.
double q_for_config(std::int64_t n, const MeasurementConfig& config);

// Smallest m >= 1 whose maximum is at or below v0/k, then adjusted for the
// convention. Computed in closed form; ties count as "at or below".
std::int64_t count_pseudo_periods(const ResonatorParams& params, const MeasurementConfig& config);

// Full ideal measurement against the analytic peak sequence.
MeasurementResult ideal_measurement(const ResonatorParams& params, const MeasurementConfig& config);

// Signed relative error of the ideal measurement. The method does not
// depend on f0 or v0, so only the true Q is needed.
double theoretical_error(double q_true, const MeasurementConfig& config);

// Inclusive arithmetic range; step > 0.
struct Range {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;

  std::vector<double> values() const;

  friend bool operator==(const Range&, const Range&) = default;
};

// One row per (k, q_true), outer loop over k.
SweepTable theoretical_error_sweep(const std::vector<double>& k_values, const Range& q_range,
                                   CountConvention convention, bool shortcut = false);

}  // namespace qfm
