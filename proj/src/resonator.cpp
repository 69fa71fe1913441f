#include "qfm/resonator.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "qfm/errors.hpp"

namespace qfm {

void validate(const ResonatorParams& params) {
  if (!(params.f0 > 0.0) || !std::isfinite(params.f0)) {
    throw ConfigError("resonant frequency f0 must be > 0 Hz, got " + std::to_string(params.f0));
  }
  if (!(params.v0 > 0.0) || !std::isfinite(params.v0)) {
    throw ConfigError("initial amplitude v0 must be > 0 V, got " + std::to_string(params.v0));
  }
  if (!(params.q > 0.5) || std::isnan(params.q)) {
    throw ConfigError("quality factor q must be > 0.5 (underdamped), got " +
                      std::to_string(params.q));
  }
}

DerivedDynamics derive_dynamics(const ResonatorParams& params) {
  validate(params);
  const double omega0 = 2.0 * std::numbers::pi * params.f0;
  const double damping = 1.0 / (4.0 * params.q * params.q);
  DerivedDynamics d{};
  d.alpha = omega0 / (2.0 * params.q);
  d.omega_d = omega0 * std::sqrt(1.0 - damping);
  d.pseudo_period = 2.0 * std::numbers::pi / d.omega_d;
  return d;
}

double eval_response(const ResonatorParams& params, double t) {
  if (!(t >= 0.0)) {
    throw ConfigError("response time must be >= 0 s");
  }
  const DerivedDynamics d = derive_dynamics(params);
  const double sine_weight = 1.0 / std::sqrt(4.0 * params.q * params.q - 1.0);
  const double phase = d.omega_d * t;
  return params.v0 * std::exp(-d.alpha * t) * (std::cos(phase) + sine_weight * std::sin(phase));
}

double peak_time(const ResonatorParams& params, std::int64_t m) {
  if (m < 0) {
    throw ConfigError("peak index must be >= 0");
  }
  return static_cast<double>(m) * derive_dynamics(params).pseudo_period;
}

double log_decrement(const ResonatorParams& params) {
  validate(params);
  // alpha * T'0 simplifies to 2*pi / sqrt(4 q^2 - 1).
  return 2.0 * std::numbers::pi / std::sqrt(4.0 * params.q * params.q - 1.0);
}

double peak_value(const ResonatorParams& params, std::int64_t m) {
  if (m < 0) {
    throw ConfigError("peak index must be >= 0");
  }
  return params.v0 * std::exp(-log_decrement(params) * static_cast<double>(m));
}

Waveform synth_waveform(const ResonatorParams& params, double sample_rate, double duration,
                        double noise_rms, std::uint64_t seed) {
  validate(params);
  if (!(sample_rate >= kMinSamplesPerPeriod * params.f0)) {
    throw ConfigError("sample rate " + std::to_string(sample_rate) +
                      " Hz is below 20 samples per resonant period (" +
                      std::to_string(kMinSamplesPerPeriod * params.f0) + " Hz)");
  }
  if (!(duration > 0.0)) {
    throw ConfigError("duration must be > 0 s");
  }
  if (!(noise_rms >= 0.0)) {
    throw ConfigError("noise rms must be >= 0 V");
  }

  const DerivedDynamics d = derive_dynamics(params);
  const double sine_weight = 1.0 / std::sqrt(4.0 * params.q * params.q - 1.0);
  const auto count = static_cast<std::size_t>(std::floor(duration * sample_rate)) + 1;

  Waveform w;
  w.sample_rate = sample_rate;
  w.start_time = 0.0;
  w.samples.resize(count);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    const double phase = d.omega_d * t;
    double v = params.v0 * std::exp(-d.alpha * t) * (std::cos(phase) + sine_weight * std::sin(phase));
    if (noise_rms > 0.0) {
      v += noise_rms * noise(rng);
    }
    w.samples[i] = v;
  }
  return w;
}

}  // namespace qfm
