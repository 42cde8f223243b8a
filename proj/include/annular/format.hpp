#pragma once

#include <string>
#include <string_view>

#include "annular/interval.hpp"

namespace annular {

/// Shortest decimal string that parses back to exactly `x`.
std::string format_double(double x);
/// "[lo,hi]" with round-trip-exact endpoints.
std::string format_interval(const Interval& x);

/// Parses a decimal or "inf"/"-inf"; throws ParseError.
double parse_double(std::string_view s);
/// Accepts "v" (degenerate) or "[lo,hi]".
Interval parse_interval(std::string_view s);

}  // namespace annular
