#pragma once

#include <string>

namespace hdod {

/// 17 significant digits; parses back to the identical double.
std::string format_double(double v);

/// Fixed notation with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

}  // namespace hdod
