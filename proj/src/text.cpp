#include "dramforge/text.hpp"

#include <charconv>
#include <cmath>

namespace dramforge::text {

void append_real(std::string& out, double value) {
  if (std::isinf(value)) {
    out += value > 0 ? "inf" : "-inf";
    return;
  }
  if (std::isnan(value)) {
    out += "nan";
    return;
  }
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

std::string format_real(double value) {
  std::string out;
  append_real(out, value);
  return out;
}

std::string_view trim(std::string_view s) noexcept {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

bool parse_real(std::string_view token, double& out) noexcept {
  token = trim(token);
  if (token.empty()) return false;
  if (token == "inf" || token == "+inf") {
    out = INFINITY;
    return true;
  }
  if (token == "-inf") {
    out = -INFINITY;
    return true;
  }
  if (token.front() == '+') token.remove_prefix(1);
  auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

bool parse_int(std::string_view token, std::int64_t& out) noexcept {
  token = trim(token);
  if (token.empty()) return false;
  auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

bool parse_uint(std::string_view token, std::uint64_t& out) noexcept {
  token = trim(token);
  if (token.empty() || token.front() == '-') return false;
  auto res = std::from_chars(token.data(), token.data() + token.size(), out);
  return res.ec == std::errc() && res.ptr == token.data() + token.size();
}

bool parse_real_list(std::string_view token, std::vector<double>& out) {
  out.clear();
  token = trim(token);
  if (token.empty()) return true;
  for (auto part : split(token, ',')) {
    double v = 0;
    if (!parse_real(part, v)) return false;
    out.push_back(v);
  }
  return true;
}

std::string format_real_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    append_real(out, values[i]);
  }
  return out;
}

}  // namespace dramforge::text
