#include "qfm/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "qfm/errors.hpp"
#include "qfm/sweep_table.hpp"

namespace qfm {

std::string_view to_string(SignMode mode) {
  switch (mode) {
    case SignMode::kPlus:
      return "plus";
    case SignMode::kMinus:
      return "minus";
    case SignMode::kIndependent:
      return "independent";
  }
  return "plus";
}

SignMode parse_sign_mode(std::string_view text) {
  if (text == "plus" || text == "+") return SignMode::kPlus;
  if (text == "minus" || text == "-") return SignMode::kMinus;
  if (text == "independent") return SignMode::kIndependent;
  throw ConfigError("unknown sign mode '" + std::string(text) +
                    "' (expected plus, minus or independent)");
}

SignAssignment aligned_signs(SignMode mode) {
  switch (mode) {
    case SignMode::kPlus:
      return {1.0, 1.0, 1.0};
    case SignMode::kMinus:
      return {-1.0, -1.0, -1.0};
    case SignMode::kIndependent:
      break;
  }
  throw ConfigError("independent sign mode has no fixed orientation");
}

SignAssignment draw_signs(std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  SignAssignment s;
  s.divider = coin(rng) ? 1.0 : -1.0;
  s.comparator = coin(rng) ? 1.0 : -1.0;
  s.opamp = coin(rng) ? 1.0 : -1.0;
  return s;
}

SignAssignment threshold_aligned_signs(double direction) {
  const double s = direction < 0.0 ? -1.0 : 1.0;
  return {-s, s, -s};
}

CircuitNonIdealities CircuitNonIdealities::ideal() { return {}; }

CircuitNonIdealities CircuitNonIdealities::pessimistic() {
  CircuitNonIdealities ni;
  ni.comparator_offset = 10e-3;
  ni.divider_error = 0.01;
  return ni;
}

CircuitNonIdealities CircuitNonIdealities::calibrated() {
  CircuitNonIdealities ni = pessimistic();
  ni.opamp_offset = 1e-3;
  ni.leak_droop = 10.0;
  ni.diode_residual = 2e-3;
  ni.diode_fail_freq = 1e6;
  ni.detector_bandwidth = 1e6;
  return ni;
}

void validate(const CircuitNonIdealities& ni) {
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0)) {
      throw ConfigError(std::string(name) + " must be >= 0");
    }
  };
  non_negative(ni.comparator_offset, "comparator offset");
  non_negative(ni.divider_error, "divider error");
  non_negative(ni.opamp_offset, "opamp offset");
  non_negative(ni.leak_droop, "leak droop");
  non_negative(ni.diode_residual, "diode residual");
  non_negative(ni.noise_rms, "noise rms");
  if (!(ni.divider_error < 1.0)) {
    throw ConfigError("divider error must be < 1");
  }
  if (!(ni.detector_bandwidth > 0.0)) {
    throw ConfigError("detector bandwidth must be > 0 Hz");
  }
  if (!(ni.diode_fail_freq > 0.0)) {
    throw ConfigError("diode failure frequency must be > 0 Hz");
  }
}

double capture_model(double true_peak, double f0, const CircuitNonIdealities& ni,
                     double hold_interval, const SignAssignment& signs) {
  const double ratio = f0 / ni.detector_bandwidth;
  const double tracking = 1.0 / std::sqrt(1.0 + ratio * ratio);
  const double diode = ni.diode_residual * std::min(1.0, f0 / ni.diode_fail_freq);
  const double captured = true_peak * tracking - diode - ni.leak_droop * hold_interval +
                          signs.opamp * ni.opamp_offset;
  return std::max(0.0, captured);
}

double effective_threshold(double v0_captured, double k, const CircuitNonIdealities& ni,
                           const SignAssignment& signs) {
  if (!(v0_captured > 0.0)) {
    throw ConfigError("captured V0 must be > 0 V");
  }
  if (!(k > 1.0)) {
    throw ConfigError("division factor k must be > 1");
  }
  return v0_captured / (k * (1.0 + signs.divider * ni.divider_error)) +
         signs.comparator * ni.comparator_offset;
}

double effective_threshold(double v0_captured, double k, const CircuitNonIdealities& ni) {
  return effective_threshold(v0_captured, k, ni, aligned_signs(ni.worst_case_sign));
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << "cycle,peak_time,true_peak,captured_peak,threshold,count_enable\n";
  for (const CycleRecord& c : trace.cycles) {
    out << c.cycle << ',' << format_double(c.peak_time) << ',' << format_double(c.true_peak) << ','
        << format_double(c.captured_peak) << ',' << format_double(c.threshold) << ','
        << (c.count_enable ? 1 : 0) << '\n';
  }
}

namespace {

// Cycles needed for the envelope to fall by 1e9, plus margin.
std::int64_t cycle_budget(const ResonatorParams& params) {
  return static_cast<std::int64_t>(std::ceil(std::log(1e9) / log_decrement(params))) + 16;
}

MeasurementResult finish(const ResonatorParams& params, const MeasurementConfig& config,
                         std::int64_t first_below, double threshold, double period) {
  MeasurementResult r;
  r.convention = config.convention;
  r.n = config.convention == CountConvention::kFirstAtOrBelow ? first_below : first_below - 1;
  if (r.n < 1) {
    throw SimulationError("threshold reached on the first cycle; no pseudo-period was counted");
  }
  r.q_measured = q_for_config(r.n, config);
  r.threshold_used = threshold;
  r.t_measure = static_cast<double>(r.n) * period;
  r.relative_error = (r.q_measured - params.q) / params.q;
  return r;
}

}  // namespace

MeasurementResult predicted_measurement(const ResonatorParams& params,
                                        const MeasurementConfig& config,
                                        const CircuitNonIdealities& ni,
                                        const SignAssignment& signs) {
  validate(params);
  validate(config);
  validate(ni);
  const double period = derive_dynamics(params).pseudo_period;
  const double v0_captured = capture_model(params.v0, params.f0, ni, period, signs);
  if (!(v0_captured > 0.0)) {
    throw SimulationError("peak detector captures no initial amplitude");
  }
  const double threshold = effective_threshold(v0_captured, config.k, ni, signs);

  const std::int64_t budget = cycle_budget(params);
  for (std::int64_t m = 1; m <= budget; ++m) {
    if (capture_model(peak_value(params, m), params.f0, ni, period, signs) <= threshold) {
      return finish(params, config, m, threshold, period);
    }
  }
  throw SimulationError("captured peaks never fall to the stop threshold " +
                        std::to_string(threshold) + " V");
}

MeasurementResult predicted_measurement(const ResonatorParams& params,
                                        const MeasurementConfig& config,
                                        const CircuitNonIdealities& ni) {
  return predicted_measurement(params, config, ni, aligned_signs(ni.worst_case_sign));
}

namespace {

SimOutcome run_simulation(const ResonatorParams& params, const MeasurementConfig& config,
                          const CircuitNonIdealities& ni, const SignAssignment* fixed_signs,
                          int samples_per_period, std::uint64_t seed) {
  validate(params);
  validate(config);
  validate(ni);
  if (samples_per_period < static_cast<int>(kMinSamplesPerPeriod)) {
    throw ConfigError("samples per period must be >= 20, got " +
                      std::to_string(samples_per_period));
  }

  std::mt19937_64 rng(seed);
  SimOutcome out;
  SimTrace& trace = out.trace;
  if (fixed_signs != nullptr) {
    trace.signs = *fixed_signs;
  } else {
    trace.signs = ni.worst_case_sign == SignMode::kIndependent ? draw_signs(rng)
                                                               : aligned_signs(ni.worst_case_sign);
  }
  std::normal_distribution<double> noise(0.0, 1.0);

  const DerivedDynamics dyn = derive_dynamics(params);
  const double sine_weight = 1.0 / std::sqrt(4.0 * params.q * params.q - 1.0);
  const double dt = 1.0 / (samples_per_period * params.f0);
  // Clock comparator hysteresis keeps noise from producing extra edges.
  const double hysteresis = 4.0 * ni.noise_rms;
  const std::int64_t budget = cycle_budget(params);
  const std::int64_t max_samples = (budget + 2) * (samples_per_period + 2);
  const std::int64_t max_gap = 4 * samples_per_period;

  auto input = [&](std::int64_t i) {
    const double t = static_cast<double>(i) * dt;
    double v = params.v0 * std::exp(-dyn.alpha * t) *
               (std::cos(dyn.omega_d * t) + sine_weight * std::sin(dyn.omega_d * t));
    if (ni.noise_rms > 0.0) {
      v += ni.noise_rms * noise(rng);
    }
    return v;
  };

  // Clock comparator state: armed once the input is above +hysteresis; an edge
  // is confirmed when it then drops below -hysteresis, timed at the last
  // interpolated zero crossing.
  bool armed = false;
  double crossing = 0.0;
  double last_edge = 0.0;
  std::int64_t last_edge_sample = 0;
  double prev = 0.0;

  // Peak detector state for the current cycle.
  std::int64_t cycle = 0;
  double cycle_max = -std::numeric_limits<double>::infinity();
  double cycle_max_time = 0.0;

  double raw_v0 = 0.0;
  double raw_v0_time = 0.0;
  double threshold = 0.0;
  double period_sum = 0.0;

  for (std::int64_t i = 0; i < max_samples; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double v = input(i);

    if (v > cycle_max) {
      cycle_max = v;
      cycle_max_time = t;
    }
    if (v > hysteresis) {
      armed = true;
    }
    if (i > 0 && prev >= 0.0 && v < 0.0) {
      crossing = t - dt + dt * prev / (prev - v);
    }
    prev = v;

    if (!(armed && v < -hysteresis)) {
      if (i - last_edge_sample > max_gap && cycle > 0) {
        throw SimulationError("input decayed below the clock comparator floor at t=" +
                              std::to_string(t) + " s before the stop threshold was reached");
      }
      continue;
    }

    // Clock edge: close the current cycle.
    armed = false;
    const double period = cycle == 0 ? 0.0 : crossing - last_edge;
    last_edge = crossing;
    last_edge_sample = i;

    if (cycle == 0) {
      raw_v0 = cycle_max;
      raw_v0_time = cycle_max_time;
    } else {
      period_sum += period;
      if (cycle == 1) {
        // V0 is held through the first full cycle before the divider uses it.
        trace.v0_captured = capture_model(raw_v0, params.f0, ni, period, trace.signs);
        if (!(trace.v0_captured > 0.0)) {
          throw SimulationError("peak detector captures no initial amplitude");
        }
        threshold = effective_threshold(trace.v0_captured, config.k, ni, trace.signs);
        trace.final_threshold = threshold;
        CycleRecord first;
        first.cycle = 0;
        first.peak_time = raw_v0_time;
        first.true_peak = raw_v0;
        first.captured_peak = trace.v0_captured;
        first.threshold = threshold;
        first.count_enable = trace.v0_captured > threshold;
        trace.cycles.push_back(first);
      }

      CycleRecord rec;
      rec.cycle = cycle;
      rec.peak_time = cycle_max_time;
      rec.true_peak = cycle_max;
      rec.captured_peak = capture_model(cycle_max, params.f0, ni, period, trace.signs);
      rec.threshold = threshold;
      rec.count_enable = rec.captured_peak > threshold;
      rec.clock_period = period;
      trace.cycles.push_back(rec);

      if (!rec.count_enable) {
        out.result = finish(params, config, cycle, threshold,
                            period_sum / static_cast<double>(cycle));
        return out;
      }
    }

    // SW4 resets the detector for the next cycle.
    ++cycle;
    cycle_max = -std::numeric_limits<double>::infinity();
    if (cycle > budget) {
      break;
    }
  }
  throw SimulationError("captured peaks never fell to the stop threshold " +
                        std::to_string(threshold) + " V within " + std::to_string(budget) +
                        " cycles");
}

}  // namespace

SimOutcome simulate_measurement(const ResonatorParams& params, const MeasurementConfig& config,
                                const CircuitNonIdealities& ni, int samples_per_period,
                                std::uint64_t seed) {
  return run_simulation(params, config, ni, nullptr, samples_per_period, seed);
}

SimOutcome simulate_measurement(const ResonatorParams& params, const MeasurementConfig& config,
                                const CircuitNonIdealities& ni, const SignAssignment& signs,
                                int samples_per_period, std::uint64_t seed) {
  return run_simulation(params, config, ni, &signs, samples_per_period, seed);
}

}  // namespace qfm
