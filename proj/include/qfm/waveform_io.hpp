#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "qfm/measurement.hpp"
#include "qfm/resonator.hpp"

namespace qfm {

struct Peak {
  double time = 0.0;   // s
  double value = 0.0;  // V
};

// Maxima of the positive lobes in time order.
struct PeakList {
  std::vector<Peak> peaks;
  // Set when some spacing deviates more than 30 % from the median spacing.
  bool quality_warning = false;
  std::string warning;

  double median_spacing() const;
  // Pseudo-period index of each peak, counted from the first peak using the
  // median spacing, so a suppressed lobe does not shift later indices.
  std::vector<std::int64_t> indices() const;
};

// `t,v` CSV: header line, one row per sample, LF line endings.
void write_waveform_csv(std::ostream& out, const Waveform& w);
void write_waveform_csv(const std::filesystem::path& path, const Waveform& w);

// Throws ParseError for malformed rows (with line number), non-uniform
// sampling, or an empty record.
Waveform load_waveform(std::istream& in);
Waveform load_waveform(const std::filesystem::path& path);

struct PeakOptions {
  // A maximum is accepted only once the signal has fallen this far below it.
  double hysteresis = 0.0;
  // Maxima below this level are discarded.
  double amplitude_floor = 0.0;
};

// Throws AnalysisError if fewer than two peaks are found.
PeakList extract_peaks(const Waveform& w, const PeakOptions& options);
PeakList extract_peaks(const Waveform& w, double hysteresis);

void write_peaks_csv(std::ostream& out, const PeakList& peaks);

// Counting measurement with the first peak as V0. Throws
// InsufficientRecordError if no peak reaches V0/k.
MeasurementResult measure_q_counting(const PeakList& peaks, const MeasurementConfig& config);

// Per-cycle log decrement from a least-squares line through ln(peak) versus
// peak index.
double fit_log_decrement(const PeakList& peaks);

// Q from the fitted decrement, inverting delta = 2 pi / sqrt(4 Q^2 - 1).
double fit_q_log_decrement(const PeakList& peaks);

// Q whose per-cycle log decrement is delta.
double q_from_log_decrement(double delta);

// Single-line `key=value` record: n, q, threshold, convention, and t_measure
// and error when known.
std::string format_result_record(const MeasurementResult& r);

}  // namespace qfm
