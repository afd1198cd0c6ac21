#pragma once

#include <string>

namespace drivestyle {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Fixed-point text with `digits` decimals, for human-readable reports.
std::string format_fixed(double value, int digits);

}  // namespace drivestyle
