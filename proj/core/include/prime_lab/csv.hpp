#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace prime_lab {

// 17 significant digits: enough for an exact double round trip.
std::string format_real(double value);

// Throws ParseError naming `line` if `text` is not a complete real number.
double parse_real(std::string_view text, std::size_t line);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

std::string_view trim(std::string_view text);

}  // namespace prime_lab
