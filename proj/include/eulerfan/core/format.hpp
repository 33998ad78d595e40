#pragma once

#include <string>

namespace eulerfan {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double x);

}  // namespace eulerfan
