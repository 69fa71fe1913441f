#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qfm {

enum class SweepKind { kTheoretical, kWorstCase, kFrequency };

struct SweepRow {
  double k = 0.0;
  double q_true = 0.0;
  double f0 = 0.0;
  std::int64_t n = 0;
  double q_measured = 0.0;
  double rel_error = 0.0;
  // "ok" for ideal rows, the winning corner ("plus", "minus", "exhaustive")
  // for worst-case rows, "failed: ..." when the point could not be evaluated.
  std::string status = "ok";

  bool failed() const { return status.rfind("failed", 0) == 0; }
};

struct SweepTable {
  SweepKind kind = SweepKind::kTheoretical;
  std::vector<SweepRow> rows;
};

// Column header for the given table kind, without trailing newline.
std::string csv_header(SweepKind kind);

void write_csv(std::ostream& out, const SweepTable& table);

// Line chart of |rel_error| in percent against the table's independent
// variable, one polyline per k (theoretical and worst-case) or a single
// series over log f0 (frequency).
void write_svg(std::ostream& out, const SweepTable& table, const std::string& title);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace qfm
