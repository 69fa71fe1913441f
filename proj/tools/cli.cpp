#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qfm/circuit.hpp"
#include "qfm/error_analysis.hpp"
#include "qfm/errors.hpp"
#include "qfm/measurement.hpp"
#include "qfm/run_config.hpp"
#include "qfm/sweep_table.hpp"
#include "qfm/waveform_io.hpp"

namespace qfm::cli {

namespace {

struct ParamFlag {
  const char* key;
  const char* flag;
  const char* help;
};

// Value flags shared by every command; each maps onto a RunConfig key.
constexpr ParamFlag kParamFlags[] = {
    {"f0", "--f0", "Resonant frequency in Hz (e.g. 50kHz); sweep frequency takes lo:hi:log[:n] or a list"},
    {"q", "--q", "True quality factor; sweeps take min:max:step"},
    {"v0", "--v0", "Initial peak amplitude in V"},
    {"k", "--k", "Division factor k (> 1); sweeps take a list such as 2,4,6"},
    {"convention", "--convention", "Counting convention: last_above | first_at_or_below"},
    {"offset", "--offset", "Threshold comparator offset in V (e.g. 10mV)"},
    {"dk", "--dk", "Fractional divider error on k (e.g. 0.01 or 1%)"},
    {"opamp_offset", "--opamp-offset", "Lumped peak-detector/divider opamp offset in V"},
    {"leak", "--leak", "Held-voltage leakage droop in V/s"},
    {"diode", "--diode", "Uncancelled diode residual in V, reached at --ffail"},
    {"fbw", "--fbw", "Peak-detector tracking bandwidth in Hz (inf = ideal)"},
    {"ffail", "--ffail", "Diode cancellation failure frequency in Hz"},
    {"noise", "--noise", "Additive input noise rms in V"},
    {"sign", "--sign", "Error-source orientation: plus | minus | independent"},
    {"spp", "--spp", "Simulation samples per resonant period (>= 20)"},
    {"seed", "--seed", "Random seed (unsigned integer)"},
    {"duration", "--duration", "Synthesized record length in s"},
    {"rate", "--rate", "Synthesis sample rate in Hz (0 = spp * f0)"},
    {"hyst", "--hyst", "Peak-extraction hysteresis in V (negative = 1% of peak |v|)"},
    {"floor", "--floor", "Minimum accepted peak amplitude in V"},
};

struct CommonFlags {
  std::vector<std::pair<const char*, CLI::Option*>> values;
  CLI::Option* shortcut = nullptr;
  CLI::Option* exhaustive = nullptr;
  std::string config_path;
  CLI::Option* config = nullptr;
  std::vector<std::string> storage;
};

void add_common(CLI::App* app, CommonFlags& flags) {
  flags.storage.resize(std::size(kParamFlags));
  for (std::size_t i = 0; i < std::size(kParamFlags); ++i) {
    const ParamFlag& p = kParamFlags[i];
    flags.values.emplace_back(p.key, app->add_option(p.flag, flags.storage[i], p.help));
  }
  flags.shortcut = app->add_flag("--shortcut", "Report Q as 2n (the k = 4.81 shortcut)");
  flags.exhaustive =
      app->add_flag("--exhaustive", "Worst case over every sign/leak/diode corner, not just plus/minus");
  flags.config = app->add_option("--config", flags.config_path,
                                 "key = value config file (default: $QFM_CONFIG)");
}

RunConfig resolve(const CommonFlags& flags) {
  RunConfig config;
  std::string path;
  if (flags.config->count() > 0) {
    path = flags.config_path;
  } else if (const char* env = std::getenv("QFM_CONFIG"); env != nullptr && *env != '\0') {
    path = env;
  }
  if (!path.empty()) {
    load_config(path, config);
  }
  for (std::size_t i = 0; i < flags.values.size(); ++i) {
    if (flags.values[i].second->count() > 0) {
      try {
        config.apply(flags.values[i].first, flags.storage[i]);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string(kParamFlags[i].flag) + ": " + e.what());
      }
    }
  }
  if (flags.shortcut->count() > 0) config.measurement.shortcut = true;
  if (flags.exhaustive->count() > 0) config.exhaustive = true;
  config.validate();
  return config;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  return out;
}

void check_written(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) {
    throw IoError("write to " + path + " failed");
  }
}

int cmd_simulate(const RunConfig& config, bool analytic, const std::string& trace_path,
                 std::ostream& out) {
  MeasurementResult result;
  if (analytic) {
    result = predicted_measurement(config.resonator, config.measurement, config.circuit);
  } else {
    const SimOutcome sim = simulate_measurement(config.resonator, config.measurement,
                                                config.circuit, config.samples_per_period,
                                                config.seed);
    result = sim.result;
    if (!trace_path.empty()) {
      std::ofstream file = open_output(trace_path);
      write_trace_csv(file, sim.trace);
      check_written(file, trace_path);
    }
  }
  out << format_result_record(result) << '\n';
  return kOk;
}

int cmd_sweep(const RunConfig& config, const std::string& mode, const std::string& out_path,
              const std::string& svg_path, std::ostream& out) {
  SweepTable table;
  std::string title;
  if (mode == "theoretical") {
    table = theoretical_error_sweep(config.k_sweep.values(), config.q_sweep.as_range(),
                                    config.measurement.convention, config.measurement.shortcut);
    title = "Theoretical measurement error";
  } else if (mode == "worstcase") {
    WorstCaseOptions options;
    options.convention = config.measurement.convention;
    options.shortcut = config.measurement.shortcut;
    options.exhaustive = config.exhaustive;
    table = worst_case_sweep(config.k_sweep.values(), config.q_sweep.as_range(), config.circuit,
                             config.resonator.f0, options);
    title = "Worst-case error with combined non-idealities";
  } else if (mode == "frequency") {
    FrequencySweepOptions options;
    options.convention = config.measurement.convention;
    options.shortcut = config.measurement.shortcut;
    options.v0 = config.resonator.v0;
    options.samples_per_period = config.samples_per_period;
    options.seed = config.seed;
    table = frequency_sweep(config.resonator.q, config.measurement.k, config.f0_sweep.values(),
                            config.circuit, options);
    title = "Measurement error against input frequency";
  } else {
    throw ConfigError("unknown sweep mode '" + mode + "' (theoretical, worstcase, frequency)");
  }

  std::ofstream csv = open_output(out_path);
  write_csv(csv, table);
  check_written(csv, out_path);
  if (!svg_path.empty()) {
    std::ofstream svg = open_output(svg_path);
    write_svg(svg, table, title);
    check_written(svg, svg_path);
  }

  double max_abs = 0.0;
  std::size_t failed = 0;
  for (const SweepRow& r : table.rows) {
    if (r.failed()) {
      ++failed;
    } else {
      max_abs = std::max(max_abs, std::abs(r.rel_error));
    }
  }
  out << "mode=" << mode << " rows=" << table.rows.size() << " failed=" << failed
      << " max_abs_error=" << format_double(max_abs) << " out=" << out_path << '\n';
  return kOk;
}

int cmd_measure(const RunConfig& config, const std::string& input, const std::string& peaks_path,
                std::ostream& out, std::ostream& err) {
  const Waveform w = load_waveform(std::filesystem::path(input));
  PeakOptions options;
  options.amplitude_floor = config.amplitude_floor;
  options.hysteresis = config.hysteresis;
  if (options.hysteresis < 0.0) {
    double peak = 0.0;
    for (double v : w.samples) peak = std::max(peak, std::abs(v));
    options.hysteresis = 0.01 * peak;
  }
  const PeakList peaks = extract_peaks(w, options);
  if (peaks.quality_warning) {
    err << "warning: " << peaks.warning << '\n';
  }
  if (!peaks_path.empty()) {
    std::ofstream file = open_output(peaks_path);
    write_peaks_csv(file, peaks);
    check_written(file, peaks_path);
  }

  const MeasurementResult counted = measure_q_counting(peaks, config.measurement);
  const double delta = fit_log_decrement(peaks);
  const double fitted = fit_q_log_decrement(peaks);
  out << "method=counting " << format_result_record(counted) << '\n';
  out << "method=log_decrement q=" << format_double(fitted) << " delta=" << format_double(delta)
      << " peaks=" << peaks.peaks.size() << '\n';
  out << "disagreement=" << format_double(std::abs(counted.q_measured - fitted) / fitted) << '\n';
  return kOk;
}

int cmd_synth(const RunConfig& config, const std::string& out_path, std::ostream& out) {
  const double rate = config.sample_rate > 0.0
                          ? config.sample_rate
                          : config.samples_per_period * config.resonator.f0;
  const Waveform w = synth_waveform(config.resonator, rate, config.duration,
                                    config.circuit.noise_rms, config.seed);
  std::ofstream file = open_output(out_path);
  write_waveform_csv(file, w);
  check_written(file, out_path);
  out << "samples=" << w.samples.size() << " rate=" << format_double(rate) << " out=" << out_path
      << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fixed Voltage Interval quality-factor measurement toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 ok, 2 config/parse error, 3 simulation or analysis failure, 4 I/O error, "
      "5 insufficient record.");

  CommonFlags sim_flags, sweep_flags, measure_flags, synth_flags, dump_flags;

  CLI::App* simulate = app.add_subcommand("simulate", "Run the time-domain measurement once");
  add_common(simulate, sim_flags);
  std::string trace_path;
  simulate->add_option("--trace", trace_path, "Write the per-cycle trace CSV here");
  bool analytic = false;
  simulate->add_flag("--analytic", analytic, "Use the closed-form peak sequence instead");

  CLI::App* sweep = app.add_subcommand("sweep", "Error sweeps written as CSV");
  add_common(sweep, sweep_flags);
  std::string mode;
  sweep->add_option("mode", mode, "theoretical | worstcase | frequency")->required();
  std::string sweep_out;
  sweep->add_option("--out", sweep_out, "Output CSV path")->required();
  std::string svg_path;
  sweep->add_option("--svg", svg_path, "Also render an SVG chart here");

  CLI::App* measure = app.add_subcommand("measure", "Measure Q from a t,v waveform CSV");
  add_common(measure, measure_flags);
  std::string input;
  measure->add_option("input", input, "Waveform CSV path")->required();
  std::string peaks_path;
  measure->add_option("--peaks", peaks_path, "Write the extracted peaks CSV here");

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic ring-down waveform CSV");
  add_common(synth, synth_flags);
  std::string synth_out;
  synth->add_option("--out", synth_out, "Output CSV path")->required();

  CLI::App* dump = app.add_subcommand("dump-config", "Print the resolved configuration");
  add_common(dump, dump_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (simulate->parsed()) {
      return cmd_simulate(resolve(sim_flags), analytic, trace_path, out);
    }
    if (sweep->parsed()) {
      return cmd_sweep(resolve(sweep_flags), mode, sweep_out, svg_path, out);
    }
    if (measure->parsed()) {
      return cmd_measure(resolve(measure_flags), input, peaks_path, out, err);
    }
    if (synth->parsed()) {
      return cmd_synth(resolve(synth_flags), synth_out, out);
    }
    if (dump->parsed()) {
      dump_config(out, resolve(dump_flags));
      return kOk;
    }
  } catch (const InsufficientRecordError& e) {
    err << "error: " << e.what() << '\n';
    return kInsufficientRecord;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const SimulationError& e) {
    err << "simulation error: " << e.what() << '\n';
    return kSimulationError;
  } catch (const AnalysisError& e) {
    err << "analysis error: " << e.what() << '\n';
    return kSimulationError;
  }
  return kConfigError;
}

}  // namespace qfm::cli
