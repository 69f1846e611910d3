#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cnls::csv {

/// Shortest decimal that round-trips; infinities print as inf / -inf.
std::string format_number(double v);
/// Parses a full token as a double; throws std::invalid_argument otherwise.
double parse_number(std::string_view token);
/// Splits on commas. Fields never contain commas or quotes in our schemas.
std::vector<std::string> split(std::string_view line);
/// Sixteen lowercase hex digits.
std::string format_hash(std::uint64_t h);

}  // namespace cnls::csv
