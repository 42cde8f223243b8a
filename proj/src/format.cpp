#include "annular/format.hpp"

#include <array>
#include <charconv>
#include <limits>

namespace annular {

namespace {
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}
}  // namespace

std::string format_double(double x) {
  if (x == std::numeric_limits<double>::infinity()) return "inf";
  if (x == -std::numeric_limits<double>::infinity()) return "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return {buf.data(), res.ptr};
}

std::string format_interval(const Interval& x) {
  return "[" + format_double(x.lo()) + "," + format_double(x.hi()) + "]";
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ParseError("not a number: '" + std::string(s) + "'");
  return v;
}

Interval parse_interval(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') throw ParseError("unterminated interval: '" + std::string(s) + "'");
    const auto body = s.substr(1, s.size() - 2);
    const auto comma = body.find(',');
    if (comma == std::string_view::npos)
      throw ParseError("interval needs two endpoints: '" + std::string(s) + "'");
    try {
      return {parse_double(body.substr(0, comma)), parse_double(body.substr(comma + 1))};
    } catch (const InvalidInterval& e) {
      throw ParseError(e.what());
    }
  }
  return {parse_double(s)};
}

}  // namespace annular
