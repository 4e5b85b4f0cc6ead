#pragma once

#include <string>

namespace afmass {

/// Shortest decimal text that reads back to exactly x ("nan", "inf", "-inf" otherwise).
std::string format_double(double x);

}  // namespace afmass
