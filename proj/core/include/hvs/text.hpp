#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Small parsing helpers shared by the file readers. Numeric parsers throw
// ParseError naming `source` and `line`.
namespace hvs::text {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

double parse_double(std::string_view s, const std::string& source, std::size_t line);
std::int64_t parse_int(std::string_view s, const std::string& source, std::size_t line);
/// Whitespace-separated doubles; empty input gives an empty vector.
std::vector<double> parse_doubles(std::string_view s, const std::string& source, std::size_t line);

}  // namespace hvs::text
