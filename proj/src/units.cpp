#include "qfm/units.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "qfm/errors.hpp"

namespace qfm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool prefix_scale(std::string_view p, double& scale) {
  if (p == "p") scale = 1e-12;
  else if (p == "n") scale = 1e-9;
  else if (p == "u" || p == "\xC2\xB5") scale = 1e-6;
  else if (p == "m") scale = 1e-3;
  else if (p == "k") scale = 1e3;
  else if (p == "M") scale = 1e6;
  else if (p == "G") scale = 1e9;
  else return false;
  return true;
}

}  // namespace

double parse_quantity(std::string_view text, std::string_view unit) {
  const std::string_view s = trim(text);
  auto fail = [&]() -> double {
    throw ConfigError("cannot parse '" + std::string(text) + "' as a quantity" +
                      (unit.empty() ? std::string() : " in " + std::string(unit)));
  };
  if (s.empty()) return fail();

  std::string_view digits = s;
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{}) return fail();
  std::string_view suffix = trim(std::string_view(ptr, digits.data() + digits.size() - ptr));

  if (suffix.empty()) return value;
  if (suffix == "%" && unit.empty()) return value * 0.01;
  if (!unit.empty() && suffix.size() >= unit.size() &&
      suffix.substr(suffix.size() - unit.size()) == unit) {
    suffix.remove_suffix(unit.size());
  }
  if (suffix.empty()) return value;
  double scale = 1.0;
  if (!prefix_scale(suffix, scale)) return fail();
  return value * scale;
}

}  // namespace qfm
