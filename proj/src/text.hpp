#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wnet::text {

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view line, char delim);

std::optional<double> parse_double(std::string_view s);
std::optional<int> parse_int(std::string_view s);

// Shortest representation that round-trips to the same double.
std::string format_double(double v);
// Fixed 17 significant digits ("%.17g").
std::string format_g17(double v);
std::string format_optional(const std::optional<double>& v);

} // namespace wnet::text
