#pragma once

#include <cstdint>
#include <vector>

namespace qfm {

// Second-order resonator released at a maximum of its oscillation.
struct ResonatorParams {
  double f0 = 50e3;  // resonant frequency, Hz
  double q = 300.0;  // true quality factor
  double v0 = 1.0;   // initial peak amplitude, V

  friend bool operator==(const ResonatorParams&, const ResonatorParams&) = default;
};

struct DerivedDynamics {
  double alpha;          // envelope decay rate, 1/s
  double omega_d;        // damped angular frequency, rad/s
  double pseudo_period;  // 2*pi/omega_d, s
};

// Uniformly sampled voltage trace.
struct Waveform {
  double sample_rate = 0.0;  // Hz
  double start_time = 0.0;   // s
  std::vector<double> samples;

  double time_at(std::size_t i) const {
    return start_time + static_cast<double>(i) / sample_rate;
  }
  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

// Minimum synthesis rate, in samples per resonant period.
inline constexpr double kMinSamplesPerPeriod = 20.0;

// Throws ConfigError unless f0 > 0, v0 > 0 and q > 0.5.
void validate(const ResonatorParams& params);

DerivedDynamics derive_dynamics(const ResonatorParams& params);

// Ring-down voltage at t >= 0.
double eval_response(const ResonatorParams& params, double t);

// Location of the m-th maximum. Maxima are exactly one pseudo-period apart,
// starting at t = 0.
double peak_time(const ResonatorParams& params, std::int64_t m);

// Envelope value at the m-th maximum.
double peak_value(const ResonatorParams& params, std::int64_t m);

// Natural log of the ratio between consecutive maxima,
// pi / (q * sqrt(1 - 1/(4 q^2))).
double log_decrement(const ResonatorParams& params);

// Sampled ring-down starting at t = 0, optionally with additive white
// Gaussian noise. Deterministic for a given seed.
Waveform synth_waveform(const ResonatorParams& params, double sample_rate, double duration,
                        double noise_rms = 0.0, std::uint64_t seed = 0);

}  // namespace qfm
