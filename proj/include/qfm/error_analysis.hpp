#pragma once

#include <cstdint>
#include <vector>

#include "qfm/circuit.hpp"
#include "qfm/measurement.hpp"
#include "qfm/sweep_table.hpp"

namespace qfm {

struct WorstCaseOptions {
  CountConvention convention = CountConvention::kLastAbove;
  bool shortcut = false;
  // Search every sign of every signed source, and leakage/diode at zero or
  // full magnitude, instead of the two aligned corners.
  bool exhaustive = false;
};

// Worst signed error of predicted_measurement at one (k, Q) point over the
// two threshold-aligned corners ("raise", "lower"; see threshold_aligned_signs).
// The row's status names the corner that produced it.
SweepRow worst_case_point(double k, double q_true, const CircuitNonIdealities& magnitudes,
                          double f0, const WorstCaseOptions& options = {});

SweepTable worst_case_sweep(const std::vector<double>& k_values, const Range& q_range,
                            const CircuitNonIdealities& magnitudes, double f0,
                            const WorstCaseOptions& options = {});

// Grid k minimising the largest worst-case |error| over q_range; ties go to
// the smaller k.
double optimal_k(const Range& q_range, const CircuitNonIdealities& magnitudes,
                 const std::vector<double>& k_grid, double f0,
                 const WorstCaseOptions& options = {});

struct FrequencySweepOptions {
  CountConvention convention = CountConvention::kLastAbove;
  bool shortcut = false;
  double v0 = 1.0;
  int samples_per_period = 100;
  std::uint64_t seed = 0;
};

// Time-domain measurement error against f0, one run per frequency with the
// orientation given by ni.worst_case_sign. The sign is kept so leakage
// compensating the offsets stays visible.
SweepTable frequency_sweep(double q_true, double k, const std::vector<double>& f0_values,
                           const CircuitNonIdealities& ni,
                           const FrequencySweepOptions& options = {});

// n log-spaced values from lo to hi inclusive.
std::vector<double> log_space(double lo, double hi, std::size_t points_per_decade);

enum class Distribution { kUniform, kGaussian };

struct MonteCarloSummary {
  std::int64_t trials = 0;
  std::int64_t failures = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double max_abs = 0.0;
  // histogram_edges has one more entry than histogram_counts.
  std::vector<double> histogram_edges;
  std::vector<std::int64_t> histogram_counts;

  friend bool operator==(const MonteCarloSummary&, const MonteCarloSummary&) = default;
};

// Draws each source independently: signed sources within +-magnitude,
// leakage and diode residual within [0, magnitude]. Gaussian draws use
// sigma = magnitude / 3, clipped to the same bounds.
MonteCarloSummary monte_carlo(const ResonatorParams& params, const MeasurementConfig& config,
                              const CircuitNonIdealities& magnitudes, std::int64_t trials,
                              std::uint64_t seed, Distribution shape = Distribution::kUniform,
                              std::size_t histogram_bins = 20);

}  // namespace qfm
