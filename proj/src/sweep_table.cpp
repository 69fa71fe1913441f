#include "qfm/sweep_table.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <system_error>

namespace qfm {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) {
    return "nan";
  }
  return std::string(buf.data(), end);
}

std::string csv_header(SweepKind kind) {
  switch (kind) {
    case SweepKind::kTheoretical:
      return "k,q_true,n,q_measured,rel_error";
    case SweepKind::kWorstCase:
      return "k,q_true,n,q_measured,rel_error,abs_error,status";
    case SweepKind::kFrequency:
      return "f0,n,q_measured,rel_error,abs_error,status";
  }
  return {};
}

void write_csv(std::ostream& out, const SweepTable& table) {
  out << csv_header(table.kind) << '\n';
  for (const SweepRow& r : table.rows) {
    // Failed points keep their coordinates but leave result columns empty.
    const bool ok = !r.failed();
    const std::string n = ok ? std::to_string(r.n) : "";
    const std::string qm = ok ? format_double(r.q_measured) : "";
    const std::string err = ok ? format_double(r.rel_error) : "";
    const std::string abs_err = ok ? format_double(std::abs(r.rel_error)) : "";
    switch (table.kind) {
      case SweepKind::kTheoretical:
        out << format_double(r.k) << ',' << format_double(r.q_true) << ',' << (ok ? n : "failed")
            << ',' << qm << ',' << err << '\n';
        break;
      case SweepKind::kWorstCase:
        out << format_double(r.k) << ',' << format_double(r.q_true) << ',' << n << ',' << qm << ','
            << err << ',' << abs_err << ',' << r.status << '\n';
        break;
      case SweepKind::kFrequency:
        out << format_double(r.f0) << ',' << n << ',' << qm << ',' << err << ',' << abs_err << ','
            << r.status << '\n';
        break;
    }
  }
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

void write_svg(std::ostream& out, const SweepTable& table, const std::string& title) {
  const bool log_x = table.kind == SweepKind::kFrequency;
  std::map<double, std::vector<std::pair<double, double>>> series;
  for (const SweepRow& r : table.rows) {
    if (r.failed()) continue;
    const double x = log_x ? std::log10(r.f0) : r.q_true;
    const double key = log_x ? 0.0 : r.k;
    series[key].emplace_back(x, 100.0 * std::abs(r.rel_error));
  }

  double x_min = 0.0, x_max = 1.0, y_max = 1e-3;
  bool first = true;
  for (const auto& [key, pts] : series) {
    for (const auto& [x, y] : pts) {
      if (first) {
        x_min = x_max = x;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_max = std::max(y_max, y);
    }
  }
  if (x_max <= x_min) x_max = x_min + 1.0;

  constexpr double width = 800, height = 500, left = 70, right = 20, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + plot_h - y / y_max * plot_h; };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
      << xml_escape(title) << "</text>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
      << "\" text-anchor=\"middle\" font-size=\"12\">"
      << (log_x ? "log10(f0 / Hz)" : "Q") << "</text>\n"
      << "<text x=\"15\" y=\"" << top + plot_h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 15 "
      << top + plot_h / 2 << ")\" text-anchor=\"middle\">|error| (%)</text>\n";

  for (int i = 0; i <= 4; ++i) {
    const double y = y_max * i / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << py(y) + 4
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(std::round(y * 1000) / 1000)
        << "</text>\n";
    const double x = x_min + (x_max - x_min) * i / 4.0;
    out << "<text x=\"" << px(x) << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(std::round(x * 100) / 100)
        << "</text>\n";
  }

  std::size_t index = 0;
  for (const auto& [key, pts] : series) {
    const char* color = kPalette[index % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : pts) {
      out << px(x) << ',' << py(y) << ' ';
    }
    out << "\"/>\n";
    if (!log_x) {
      out << "<text x=\"" << left + plot_w - 60 << "\" y=\"" << top + 14 + 14 * index
          << "\" font-size=\"11\" fill=\"" << color << "\">k=" << format_double(key) << "</text>\n";
    }
    ++index;
  }
  out << "</svg>\n";
}

}  // namespace qfm
