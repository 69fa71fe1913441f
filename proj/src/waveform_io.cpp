#include "qfm/waveform_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string_view>

#include "qfm/errors.hpp"
#include "qfm/sweep_table.hpp"

namespace qfm {

namespace {

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) {
    return *mid;
  }
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

bool parse_number(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

}  // namespace

double PeakList::median_spacing() const {
  if (peaks.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  std::vector<double> gaps;
  gaps.reserve(peaks.size() - 1);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    gaps.push_back(peaks[i].time - peaks[i - 1].time);
  }
  return median(std::move(gaps));
}

std::vector<std::int64_t> PeakList::indices() const {
  std::vector<std::int64_t> out;
  out.reserve(peaks.size());
  if (peaks.empty()) return out;
  const double spacing = median_spacing();
  out.push_back(0);
  for (std::size_t i = 1; i < peaks.size(); ++i) {
    const auto m = static_cast<std::int64_t>(std::llround((peaks[i].time - peaks[0].time) / spacing));
    out.push_back(std::max(m, out.back() + 1));
  }
  return out;
}

void write_waveform_csv(std::ostream& out, const Waveform& w) {
  out << "t,v\n";
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    out << format_double(w.time_at(i)) << ',' << format_double(w.samples[i]) << '\n';
  }
}

void write_waveform_csv(const std::filesystem::path& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  write_waveform_csv(out, w);
  if (!out) {
    throw IoError("write to " + path.string() + " failed");
  }
}

Waveform load_waveform(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::size_t> row_lines;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!have_header) {
      if (line != "t,v") {
        throw ParseError("expected header 't,v', got '" + line + "'", line_no);
      }
      have_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw ParseError("expected two comma-separated fields", line_no);
    }
    double t = 0.0, v = 0.0;
    const std::string_view view(line);
    if (!parse_number(view.substr(0, comma), t) || !parse_number(view.substr(comma + 1), v)) {
      throw ParseError("malformed number in '" + line + "'", line_no);
    }
    times.push_back(t);
    values.push_back(v);
    row_lines.push_back(line_no);
  }

  if (times.empty()) {
    throw ParseError("waveform is empty", 0);
  }
  if (times.size() < 3) {
    throw ParseError("waveform needs at least 3 samples, got " + std::to_string(times.size()), 0);
  }

  std::vector<double> steps(times.size() - 1);
  for (std::size_t i = 1; i < times.size(); ++i) {
    steps[i - 1] = times[i] - times[i - 1];
  }
  const double step = median(steps);
  if (!(step > 0.0)) {
    throw ParseError("non-uniform sampling: time does not increase", 0);
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (std::abs(steps[i] - step) > 1e-6 * step) {
      throw ParseError("non-uniform sampling: step " + format_double(steps[i]) +
                           " s differs from median " + format_double(step) + " s",
                       row_lines[i + 1]);
    }
  }

  Waveform w;
  w.start_time = times.front();
  w.sample_rate = static_cast<double>(times.size() - 1) / (times.back() - times.front());
  w.samples = std::move(values);
  return w;
}

Waveform load_waveform(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  return load_waveform(in);
}

PeakList extract_peaks(const Waveform& w, double hysteresis) {
  return extract_peaks(w, PeakOptions{hysteresis, 0.0});
}

PeakList extract_peaks(const Waveform& w, const PeakOptions& options) {
  if (!(options.hysteresis >= 0.0)) {
    throw ConfigError("hysteresis must be >= 0 V");
  }
  const std::vector<double>& x = w.samples;
  const std::size_t size = x.size();
  if (size < 3) {
    throw AnalysisError("too few samples to extract peaks");
  }

  // A record that opens on a maximum keeps sample 0 as the first peak.
  // Otherwise drop the leading partial lobe: start at the last rising zero
  // crossing before the first interior maximum.
  std::size_t start = 0;
  const bool opens_on_peak = x[0] > 0.0 && x[0] >= x[1];
  if (!opens_on_peak) {
    std::size_t first_max = 1;
    while (first_max + 1 < size && !(x[first_max] > 0.0 && x[first_max] >= x[first_max - 1] &&
                                     x[first_max] > x[first_max + 1])) {
      ++first_max;
    }
    for (std::size_t i = first_max; i > 0; --i) {
      if (x[i - 1] < 0.0 && x[i] >= 0.0) {
        start = i;
        break;
      }
    }
  }

  const double dt = 1.0 / w.sample_rate;
  PeakList out;
  auto accept = [&](std::size_t idx) {
    double value = x[idx];
    double time = w.time_at(idx);
    if (idx > start && idx + 1 < size) {
      const double y0 = x[idx - 1], y1 = x[idx], y2 = x[idx + 1];
      const double denom = y0 - 2.0 * y1 + y2;
      if (denom < 0.0) {
        const double offset = 0.5 * (y0 - y2) / denom;
        value = y1 - 0.25 * (y0 - y2) * offset;
        time += offset * dt;
      }
    }
    if (value > 0.0 && value >= options.amplitude_floor) {
      out.peaks.push_back({time, value});
    }
  };

  const double h = options.hysteresis;
  bool seeking_max = true;
  std::size_t max_idx = start;
  double extreme = x[start];
  for (std::size_t i = start + 1; i < size; ++i) {
    if (seeking_max) {
      if (x[i] > extreme) {
        extreme = x[i];
        max_idx = i;
      } else if (x[i] < extreme && x[i] <= extreme - h) {
        accept(max_idx);
        seeking_max = false;
        extreme = x[i];
      }
    } else {
      if (x[i] < extreme) {
        extreme = x[i];
      } else if (x[i] > extreme && x[i] >= extreme + h) {
        seeking_max = true;
        extreme = x[i];
        max_idx = i;
      }
    }
  }

  if (out.peaks.size() < 2) {
    throw AnalysisError("found " + std::to_string(out.peaks.size()) +
                        " peak(s); at least 2 are required");
  }

  const double spacing = out.median_spacing();
  for (std::size_t i = 1; i < out.peaks.size(); ++i) {
    const double gap = out.peaks[i].time - out.peaks[i - 1].time;
    if (std::abs(gap - spacing) > 0.3 * spacing) {
      out.quality_warning = true;
      out.warning = "peak spacing " + format_double(gap) + " s at t=" +
                    format_double(out.peaks[i].time) + " s deviates >30% from median " +
                    format_double(spacing) + " s";
      break;
    }
  }
  return out;
}

void write_peaks_csv(std::ostream& out, const PeakList& peaks) {
  out << "m,t,v\n";
  const std::vector<std::int64_t> m = peaks.indices();
  for (std::size_t i = 0; i < peaks.peaks.size(); ++i) {
    out << m[i] << ',' << format_double(peaks.peaks[i].time) << ','
        << format_double(peaks.peaks[i].value) << '\n';
  }
}

double q_from_log_decrement(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw AnalysisError("log decrement must be positive and finite");
  }
  const double ratio = 2.0 * std::numbers::pi / delta;
  return 0.5 * std::sqrt(1.0 + ratio * ratio);
}

double fit_log_decrement(const PeakList& peaks) {
  const std::size_t count = peaks.peaks.size();
  if (count < 2) {
    throw AnalysisError("log-decrement fit needs at least 2 peaks");
  }
  const std::vector<std::int64_t> m = peaks.indices();
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(peaks.peaks[i].value > 0.0)) {
      throw AnalysisError("log-decrement fit needs strictly positive peaks");
    }
    mean_x += static_cast<double>(m[i]);
    mean_y += std::log(peaks.peaks[i].value);
  }
  mean_x /= static_cast<double>(count);
  mean_y /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double dx = static_cast<double>(m[i]) - mean_x;
    const double dy = std::log(peaks.peaks[i].value) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw AnalysisError("degenerate log-decrement fit: peaks show no decay");
  }
  const double delta = -sxy / sxx;
  if (!(delta > 0.0)) {
    throw AnalysisError("degenerate log-decrement fit: peaks do not decay");
  }
  return delta;
}

double fit_q_log_decrement(const PeakList& peaks) {
  if (peaks.peaks.size() < 5) {
    throw AnalysisError("log-decrement fit needs at least 5 peaks, got " +
                        std::to_string(peaks.peaks.size()));
  }
  return q_from_log_decrement(fit_log_decrement(peaks));
}

MeasurementResult measure_q_counting(const PeakList& peaks, const MeasurementConfig& config) {
  validate(config);
  if (peaks.peaks.size() < 2) {
    throw AnalysisError("counting measurement needs at least 2 peaks");
  }
  const double v0 = peaks.peaks.front().value;
  const double threshold = v0 / config.k;
  const std::vector<std::int64_t> m = peaks.indices();

  for (std::size_t i = 1; i < peaks.peaks.size(); ++i) {
    if (peaks.peaks[i].value <= threshold) {
      MeasurementResult r;
      r.convention = config.convention;
      r.threshold_used = threshold;
      r.n = config.convention == CountConvention::kFirstAtOrBelow ? m[i] : m[i] - 1;
      if (r.n < 1) {
        throw AnalysisError("threshold reached at the first peak after V0; nothing to count");
      }
      r.q_measured = q_for_config(r.n, config);
      r.t_measure = static_cast<double>(r.n) * (peaks.peaks[i].time - peaks.peaks[0].time) /
                    static_cast<double>(m[i]);
      return r;
    }
  }

  double missing = std::numeric_limits<double>::quiet_NaN();
  try {
    const double delta = fit_log_decrement(peaks);
    const double needed = std::ceil(std::log(config.k) / delta);
    missing = std::max(0.0, needed - static_cast<double>(m.back())) * peaks.median_spacing();
  } catch (const AnalysisError&) {
  }
  throw InsufficientRecordError(
      "insufficient record length: last peak " + format_double(peaks.peaks.back().value) +
          " V is still above V0/k = " + format_double(threshold) + " V; about " +
          format_double(missing) + " s more record needed",
      missing);
}

std::string format_result_record(const MeasurementResult& r) {
  std::ostringstream out;
  out << "n=" << r.n << " q=" << format_double(r.q_measured)
      << " threshold=" << format_double(r.threshold_used) << " convention=" << to_string(r.convention);
  if (r.t_measure) {
    out << " t_measure=" << format_double(*r.t_measure);
  }
  if (r.relative_error) {
    out << " error=" << format_double(*r.relative_error);
  }
  return out.str();
}

}  // namespace qfm
