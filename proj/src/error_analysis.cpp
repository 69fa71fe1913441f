#include "qfm/error_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "qfm/errors.hpp"

namespace qfm {

namespace {

struct Corner {
  CircuitNonIdealities ni;
  SignAssignment signs;
  const char* label;
};

std::vector<Corner> corners(const CircuitNonIdealities& magnitudes, bool exhaustive) {
  std::vector<Corner> out;
  if (!exhaustive) {
    out.push_back({magnitudes, threshold_aligned_signs(1.0), "raise"});
    out.push_back({magnitudes, threshold_aligned_signs(-1.0), "lower"});
    return out;
  }
  const std::vector<double> leaks = magnitudes.leak_droop > 0.0
                                        ? std::vector<double>{0.0, magnitudes.leak_droop}
                                        : std::vector<double>{0.0};
  const std::vector<double> diodes = magnitudes.diode_residual > 0.0
                                         ? std::vector<double>{0.0, magnitudes.diode_residual}
                                         : std::vector<double>{0.0};
  for (int bits = 0; bits < 8; ++bits) {
    SignAssignment s;
    s.divider = (bits & 1) ? -1.0 : 1.0;
    s.comparator = (bits & 2) ? -1.0 : 1.0;
    s.opamp = (bits & 4) ? -1.0 : 1.0;
    for (double leak : leaks) {
      for (double diode : diodes) {
        CircuitNonIdealities ni = magnitudes;
        ni.leak_droop = leak;
        ni.diode_residual = diode;
        out.push_back({ni, s, "exhaustive"});
      }
    }
  }
  return out;
}

}  // namespace

SweepRow worst_case_point(double k, double q_true, const CircuitNonIdealities& magnitudes,
                          double f0, const WorstCaseOptions& options) {
  ResonatorParams params;
  params.f0 = f0;
  params.q = q_true;
  const MeasurementConfig config{k, options.convention, options.shortcut};

  SweepRow row;
  row.k = k;
  row.q_true = q_true;
  row.f0 = f0;
  bool found = false;
  std::string failure;
  for (const Corner& c : corners(magnitudes, options.exhaustive)) {
    try {
      const MeasurementResult r = predicted_measurement(params, config, c.ni, c.signs);
      if (!found || std::abs(*r.relative_error) > std::abs(row.rel_error)) {
        row.n = r.n;
        row.q_measured = r.q_measured;
        row.rel_error = *r.relative_error;
        row.status = c.label;
        found = true;
      }
    } catch (const SimulationError& e) {
      failure = e.what();
    }
  }
  // A corner that cannot measure at all is worse than any finite error.
  if (!failure.empty()) {
    row.status = "failed: " + failure;
  }
  return row;
}

SweepTable worst_case_sweep(const std::vector<double>& k_values, const Range& q_range,
                            const CircuitNonIdealities& magnitudes, double f0,
                            const WorstCaseOptions& options) {
  if (k_values.empty()) {
    throw ConfigError("worst-case sweep needs at least one k value");
  }
  validate(magnitudes);
  const std::vector<double> qs = q_range.values();
  if (!(qs.front() > 0.5)) {
    throw ConfigError("Q range must lie above 0.5");
  }
  SweepTable table;
  table.kind = SweepKind::kWorstCase;
  table.rows.reserve(k_values.size() * qs.size());
  for (double k : k_values) {
    validate(MeasurementConfig{k});
    for (double q : qs) {
      table.rows.push_back(worst_case_point(k, q, magnitudes, f0, options));
    }
  }
  return table;
}

double optimal_k(const Range& q_range, const CircuitNonIdealities& magnitudes,
                 const std::vector<double>& k_grid, double f0, const WorstCaseOptions& options) {
  if (k_grid.empty()) {
    throw ConfigError("optimal k search needs a non-empty k grid");
  }
  validate(magnitudes);
  const std::vector<double> qs = q_range.values();
  double best_k = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  bool have = false;
  for (double k : k_grid) {
    validate(MeasurementConfig{k});
    double worst = 0.0;
    for (double q : qs) {
      const SweepRow row = worst_case_point(k, q, magnitudes, f0, options);
      worst = row.failed() ? std::numeric_limits<double>::infinity()
                           : std::max(worst, std::abs(row.rel_error));
    }
    if (!have || worst < best_err || (worst == best_err && k < best_k)) {
      best_k = k;
      best_err = worst;
      have = true;
    }
  }
  return best_k;
}

std::vector<double> log_space(double lo, double hi, std::size_t points_per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || points_per_decade == 0) {
    throw ConfigError("log range needs 0 < lo <= hi and at least one point per decade");
  }
  const double decades = std::log10(hi / lo);
  const auto steps = static_cast<std::size_t>(std::ceil(decades * points_per_decade - 1e-9));
  std::vector<double> out;
  if (steps == 0) {
    out.push_back(lo);
    return out;
  }
  for (std::size_t i = 0; i <= steps; ++i) {
    out.push_back(lo * std::pow(10.0, decades * static_cast<double>(i) / steps));
  }
  out.back() = hi;
  return out;
}

SweepTable frequency_sweep(double q_true, double k, const std::vector<double>& f0_values,
                           const CircuitNonIdealities& ni, const FrequencySweepOptions& options) {
  if (f0_values.empty()) {
    throw ConfigError("frequency sweep needs at least one f0 value");
  }
  for (std::size_t i = 0; i < f0_values.size(); ++i) {
    if (!(f0_values[i] > 0.0) || (i > 0 && !(f0_values[i] > f0_values[i - 1]))) {
      throw ConfigError("f0 values must be positive and ascending");
    }
  }
  validate(ni);
  const MeasurementConfig config{k, options.convention, options.shortcut};
  validate(config);

  SweepTable table;
  table.kind = SweepKind::kFrequency;
  for (double f0 : f0_values) {
    const ResonatorParams params{f0, q_true, options.v0};
    SweepRow row;
    row.k = k;
    row.q_true = q_true;
    row.f0 = f0;
    try {
      const MeasurementResult r =
          simulate_measurement(params, config, ni, options.samples_per_period, options.seed).result;
      row.n = r.n;
      row.q_measured = r.q_measured;
      row.rel_error = *r.relative_error;
    } catch (const SimulationError& e) {
      row.status = std::string("failed: ") + e.what();
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

MonteCarloSummary monte_carlo(const ResonatorParams& params, const MeasurementConfig& config,
                              const CircuitNonIdealities& magnitudes, std::int64_t trials,
                              std::uint64_t seed, Distribution shape,
                              std::size_t histogram_bins) {
  if (trials < 1) {
    throw ConfigError("monte carlo needs at least one trial");
  }
  if (histogram_bins == 0) {
    throw ConfigError("histogram needs at least one bin");
  }
  validate(params);
  validate(config);
  validate(magnitudes);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto signed_draw = [&](double mag) {
    if (mag == 0.0) return 0.0;
    if (shape == Distribution::kUniform) return mag * (2.0 * unit(rng) - 1.0);
    return std::clamp(normal(rng) * mag / 3.0, -mag, mag);
  };
  auto positive_draw = [&](double mag) {
    if (mag == 0.0) return 0.0;
    if (shape == Distribution::kUniform) return mag * unit(rng);
    return std::clamp(std::abs(normal(rng)) * mag / 3.0, 0.0, mag);
  };

  std::vector<double> errors;
  errors.reserve(static_cast<std::size_t>(trials));
  MonteCarloSummary s;
  s.trials = trials;
  for (std::int64_t t = 0; t < trials; ++t) {
    const double divider = signed_draw(magnitudes.divider_error);
    const double comparator = signed_draw(magnitudes.comparator_offset);
    const double opamp = signed_draw(magnitudes.opamp_offset);
    CircuitNonIdealities ni = magnitudes;
    ni.divider_error = std::abs(divider);
    ni.comparator_offset = std::abs(comparator);
    ni.opamp_offset = std::abs(opamp);
    ni.leak_droop = positive_draw(magnitudes.leak_droop);
    ni.diode_residual = positive_draw(magnitudes.diode_residual);
    const SignAssignment signs{divider < 0.0 ? -1.0 : 1.0, comparator < 0.0 ? -1.0 : 1.0,
                               opamp < 0.0 ? -1.0 : 1.0};
    try {
      errors.push_back(*predicted_measurement(params, config, ni, signs).relative_error);
    } catch (const SimulationError&) {
      ++s.failures;
    }
  }
  if (errors.empty()) {
    throw SimulationError("every monte carlo trial failed to complete a measurement");
  }

  // Welford keeps the spread exactly zero for identical samples.
  double mean = 0.0, m2 = 0.0;
  std::int64_t count = 0;
  s.min = s.max = errors.front();
  for (double e : errors) {
    ++count;
    const double delta = e - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (e - mean);
    s.min = std::min(s.min, e);
    s.max = std::max(s.max, e);
    s.max_abs = std::max(s.max_abs, std::abs(e));
  }
  s.mean = mean;
  s.stddev = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1)) : 0.0;

  const double width = (s.max - s.min) / static_cast<double>(histogram_bins);
  s.histogram_edges.resize(histogram_bins + 1);
  for (std::size_t i = 0; i <= histogram_bins; ++i) {
    s.histogram_edges[i] = s.min + width * static_cast<double>(i);
  }
  s.histogram_edges.back() = s.max;
  s.histogram_counts.assign(histogram_bins, 0);
  for (double e : errors) {
    std::size_t bin = width > 0.0 ? static_cast<std::size_t>((e - s.min) / width) : 0;
    bin = std::min(bin, histogram_bins - 1);
    ++s.histogram_counts[bin];
  }
  return s;
}

}  // namespace qfm
