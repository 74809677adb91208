#pragma once

#include <string>

#include "uavsched/domain.hpp"

namespace uavsched {

/// Rounds to 6 significant digits, the precision of every export.
double round6(double v);
/// `%.6g` rendering.
std::string format6(double v);
/// Deep copy of a JSON tree with every floating-point number passed
/// through round6.
Json rounded(const Json& j);

}  // namespace uavsched
