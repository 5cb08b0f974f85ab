#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dramforge::text {

/// Shortest text that is guaranteed to round-trip: 17 significant digits.
std::string format_real(double value);
void append_real(std::string& out, double value);

std::string_view trim(std::string_view s) noexcept;
std::vector<std::string_view> split(std::string_view s, char sep);

/// Strict parsers: the whole (trimmed) token must be consumed.
bool parse_real(std::string_view token, double& out) noexcept;
bool parse_int(std::string_view token, std::int64_t& out) noexcept;
bool parse_uint(std::string_view token, std::uint64_t& out) noexcept;

/// Comma-separated reals, e.g. "0,1.5,-2".
bool parse_real_list(std::string_view token, std::vector<double>& out);
std::string format_real_list(const std::vector<double>& values);

}  // namespace dramforge::text
