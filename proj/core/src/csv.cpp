#include "prime_lab/csv.hpp"

#include <charconv>

#include <fmt/format.h>

#include "prime_lab/errors.hpp"

namespace prime_lab {

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

double parse_real(std::string_view text, std::size_t line) {
    text = trim(text);
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ParseError(fmt::format("not a number: '{}'", text), line);
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view text) {
    constexpr std::string_view ws = " \t\r\n";
    const auto first = text.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(ws);
    return text.substr(first, last - first + 1);
}

}  // namespace prime_lab
