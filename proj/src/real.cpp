#include "qaskey/real.hpp"

#include <charconv>
#include <ios>
#include <stdexcept>
#include <system_error>

namespace qaskey {

namespace {

bool looks_numeric(std::string_view text) {
  if (text.empty()) return false;
  bool digit = false;
  for (char c : text) {
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if (c != '+' && c != '-' && c != '.' && c != 'e' && c != 'E') {
      return false;
    }
  }
  return digit;
}

}  // namespace

template <>
double parse_real<double>(std::string_view text) {
  double value = 0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  return value;
}

template <>
BigReal parse_real<BigReal>(std::string_view text) {
  if (!looks_numeric(text)) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  try {
    return BigReal(std::string(text));
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
}

template <>
std::string to_decimal<double>(const double& value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  (void)ec;
  return std::string(buffer, ptr);
}

template <>
std::string to_decimal<BigReal>(const BigReal& value) {
  return value.str(working_digits<BigReal>(), std::ios_base::scientific);
}

}  // namespace qaskey
