#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evstar {

/// Locale-independent shortest round-trip encoding (std::to_chars).
std::string format_double(double v);

/// Locale-independent parse of a full token; throws std::invalid_argument on
/// trailing garbage or empty input.
double parse_double_strict(std::string_view token);
std::int64_t parse_int_strict(std::string_view token);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

}  // namespace evstar
