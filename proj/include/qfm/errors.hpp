#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qfm {

// Parameter or configuration outside its valid domain.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Time-domain simulation could not complete a measurement.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed waveform input. line() is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Peak extraction or fitting failed on otherwise well-formed data.
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The record ends before the envelope reaches the stop threshold.
class InsufficientRecordError : public AnalysisError {
 public:
  InsufficientRecordError(const std::string& what, double missing_duration)
      : AnalysisError(what), missing_duration_(missing_duration) {}

  // Estimated additional record length in seconds; NaN if no estimate is possible.
  double missing_duration() const { return missing_duration_; }

 private:
  double missing_duration_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qfm
