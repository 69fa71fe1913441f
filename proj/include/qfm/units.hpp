#pragma once

#include <string_view>

namespace qfm {

// Parses a number with an optional SI prefix and unit, e.g. "50kHz",
// "10 mV", "2.5e-3", "1%". `unit` is the only unit accepted ("" for
// dimensionless values, which also accept a trailing %). Throws ConfigError.
double parse_quantity(std::string_view text, std::string_view unit);

}  // namespace qfm
