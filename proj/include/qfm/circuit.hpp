#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "qfm/measurement.hpp"
#include "qfm/resonator.hpp"

namespace qfm {

// How the signed error sources are oriented.
enum class SignMode {
  kPlus,         // every signed source at +magnitude
  kMinus,        // every signed source at -magnitude
  kIndependent,  // each source's sign drawn independently from the run seed
};

std::string_view to_string(SignMode mode);
SignMode parse_sign_mode(std::string_view text);

// Per-source sign, each +1 or -1.
struct SignAssignment {
  double divider = 1.0;
  double comparator = 1.0;
  double opamp = 1.0;

  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;
};

// Throws ConfigError for kIndependent.
SignAssignment aligned_signs(SignMode mode);
SignAssignment draw_signs(std::mt19937_64& rng);

// Signs that push every signed source's effect on the stop decision the same
// way: direction > 0 raises the effective threshold (divider error lowering
// V0/k is flipped, comparator offset up, opamp offset lowering captured
// peaks), direction < 0 lowers it. These are the true worst-case corners.
SignAssignment threshold_aligned_signs(double direction);

// Error sources of the measurement chain. Signed sources are stored as
// magnitudes; their orientation comes from worst_case_sign. Leakage and the
// diode residual always pull the held voltage down.
struct CircuitNonIdealities {
  double comparator_offset = 0.0;  // V, threshold comparator input offset
  double divider_error = 0.0;      // fractional error on k, < 1
  double opamp_offset = 0.0;       // V, lumped peak-detector and divider-driver offsets
  double leak_droop = 0.0;         // V/s, held-voltage droop from capacitor leakage
  double diode_residual = 0.0;     // V, uncancelled diode threshold reached at diode_fail_freq
  double diode_fail_freq = 1e6;    // Hz
  double detector_bandwidth = std::numeric_limits<double>::infinity();  // Hz
  double noise_rms = 0.0;          // V, additive input noise (time-domain runs only)
  SignMode worst_case_sign = SignMode::kPlus;

  friend bool operator==(const CircuitNonIdealities&, const CircuitNonIdealities&) = default;

  // No error sources at all.
  static CircuitNonIdealities ideal();
  // Threshold comparator offset of 10 mV and 1 % divider error, nothing else.
  static CircuitNonIdealities pessimistic();
  // pessimistic() plus the frequency-dependent sources (opamp offsets,
  // leakage, detector roll-off, diode failure) at the calibrated defaults.
  static CircuitNonIdealities calibrated();
};

void validate(const CircuitNonIdealities& ni);

// Held peak-detector output for one cycle:
// peak * tracking(f0) - diode(f0) - leak * hold + opamp offset, floored at 0.
double capture_model(double true_peak, double f0, const CircuitNonIdealities& ni,
                     double hold_interval, const SignAssignment& signs = {});

// Stop threshold seen by the counter:
// v0_captured / (k (1 + s_d dk)) + s_c offset.
double effective_threshold(double v0_captured, double k, const CircuitNonIdealities& ni,
                           const SignAssignment& signs);
// Signs taken from ni.worst_case_sign, which must not be kIndependent.
double effective_threshold(double v0_captured, double k, const CircuitNonIdealities& ni);

struct CycleRecord {
  std::int64_t cycle = 0;
  double peak_time = 0.0;      // s, time of the captured sample maximum
  double true_peak = 0.0;      // V, input maximum over the cycle
  double captured_peak = 0.0;  // V, held detector output
  double threshold = 0.0;      // V
  bool count_enable = false;   // captured_peak > threshold
  double clock_period = 0.0;   // s, recovered edge-to-edge interval (0 for cycle 0)
};

struct SimTrace {
  std::vector<CycleRecord> cycles;
  double v0_captured = 0.0;
  double final_threshold = 0.0;
  SignAssignment signs;
};

void write_trace_csv(std::ostream& out, const SimTrace& trace);

struct SimOutcome {
  MeasurementResult result;
  SimTrace trace;
};

// Fixed-step behavioural run of the measurement architecture: a zero-crossing
// clock comparator, a peak detector reset every clock cycle, the V0/k divider
// with its threshold comparator, and the pseudo-period counter.
SimOutcome simulate_measurement(const ResonatorParams& params, const MeasurementConfig& config,
                                const CircuitNonIdealities& ni, int samples_per_period = 100,
                                std::uint64_t seed = 0);

// Same measurement evaluated on the analytic peak sequence, no time loop.
// Same, with the signs given explicitly instead of taken from ni.worst_case_sign.
SimOutcome simulate_measurement(const ResonatorParams& params, const MeasurementConfig& config,
                                const CircuitNonIdealities& ni, const SignAssignment& signs,
                                int samples_per_period = 100, std::uint64_t seed = 0);

MeasurementResult predicted_measurement(const ResonatorParams& params,
                                        const MeasurementConfig& config,
                                        const CircuitNonIdealities& ni);
MeasurementResult predicted_measurement(const ResonatorParams& params,
                                        const MeasurementConfig& config,
                                        const CircuitNonIdealities& ni,
                                        const SignAssignment& signs);

}  // namespace qfm
