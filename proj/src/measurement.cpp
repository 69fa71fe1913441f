#include "qfm/measurement.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qfm/errors.hpp"

namespace qfm {

std::string_view to_string(CountConvention c) {
  switch (c) {
    case CountConvention::kFirstAtOrBelow:
      return "first_at_or_below";
    case CountConvention::kLastAbove:
      return "last_above";
  }
  return "last_above";
}

CountConvention parse_convention(std::string_view text) {
  if (text == "first_at_or_below" || text == "first") {
    return CountConvention::kFirstAtOrBelow;
  }
  if (text == "last_above" || text == "last") {
    return CountConvention::kLastAbove;
  }
  throw ConfigError("unknown counting convention '" + std::string(text) +
                    "' (expected last_above or first_at_or_below)");
}

void validate(const MeasurementConfig& config) {
  if (!(config.k > 1.0) || !std::isfinite(config.k)) {
    throw ConfigError("division factor k must be > 1, got " + std::to_string(config.k));
  }
}

double q_from_count(std::int64_t n, double k) {
  if (n < 1) {
    throw ConfigError("pseudo-period count n must be >= 1 (no decay observed)");
  }
  if (!(k > 1.0) || !std::isfinite(k)) {
    throw ConfigError("division factor k must be > 1, got " + std::to_string(k));
  }
  const double ratio = 2.0 * std::numbers::pi * static_cast<double>(n) / std::log(k);
  return 0.5 * std::sqrt(1.0 + ratio * ratio);
}

double q_from_count_shortcut(std::int64_t n) {
  if (n < 1) {
    throw ConfigError("pseudo-period count n must be >= 1 (no decay observed)");
  }
  return 2.0 * static_cast<double>(n);
}

double q_for_config(std::int64_t n, const MeasurementConfig& config) {
  return config.shortcut ? q_from_count_shortcut(n) : q_from_count(n, config.k);
}

std::int64_t count_pseudo_periods(const ResonatorParams& params, const MeasurementConfig& config) {
  validate(params);
  validate(config);
  const double threshold = params.v0 / config.k;
  const double crossing = std::log(config.k) / log_decrement(params);

  // Closed-form estimate, then settle rounding against the peak values
  // themselves so ties resolve the same way as a direct scan.
  auto m = static_cast<std::int64_t>(std::ceil(crossing));
  if (m < 1) {
    m = 1;
  }
  while (m > 1 && peak_value(params, m - 1) <= threshold) {
    --m;
  }
  while (peak_value(params, m) > threshold) {
    ++m;
  }
  return config.convention == CountConvention::kFirstAtOrBelow ? m : m - 1;
}

MeasurementResult ideal_measurement(const ResonatorParams& params,
                                    const MeasurementConfig& config) {
  MeasurementResult r;
  r.n = count_pseudo_periods(params, config);
  r.convention = config.convention;
  r.threshold_used = params.v0 / config.k;
  r.q_measured = q_for_config(r.n, config);
  r.t_measure = static_cast<double>(r.n) * derive_dynamics(params).pseudo_period;
  r.relative_error = (r.q_measured - params.q) / params.q;
  return r;
}

double theoretical_error(double q_true, const MeasurementConfig& config) {
  ResonatorParams params;
  params.q = q_true;
  return *ideal_measurement(params, config).relative_error;
}

std::vector<double> Range::values() const {
  if (!(step > 0.0) || !std::isfinite(min) || !std::isfinite(max) || max < min) {
    throw ConfigError("range must satisfy min <= max and step > 0");
  }
  const auto count = static_cast<std::size_t>(std::floor((max - min) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(min + static_cast<double>(i) * step);
  }
  return out;
}

SweepTable theoretical_error_sweep(const std::vector<double>& k_values, const Range& q_range,
                                   CountConvention convention, bool shortcut) {
  if (k_values.empty()) {
    throw ConfigError("theoretical sweep needs at least one k value");
  }
  const std::vector<double> qs = q_range.values();
  if (!(qs.front() > 0.5)) {
    throw ConfigError("Q range must lie above 0.5");
  }

  SweepTable table;
  table.kind = SweepKind::kTheoretical;
  table.rows.reserve(k_values.size() * qs.size());
  for (double k : k_values) {
    const MeasurementConfig config{k, convention, shortcut};
    validate(config);
    for (double q : qs) {
      ResonatorParams params;
      params.q = q;
      SweepRow row;
      row.k = k;
      row.q_true = q;
      row.f0 = params.f0;
      try {
        const MeasurementResult r = ideal_measurement(params, config);
        row.n = r.n;
        row.q_measured = r.q_measured;
        row.rel_error = *r.relative_error;
      } catch (const ConfigError& e) {
        row.status = std::string("failed: ") + e.what();
      }
      table.rows.push_back(std::move(row));
    }
  }
  return table;
}

}  // namespace qfm
