#pragma once

#include <string>

#include "fdiv/ext_real.hpp"

namespace fdx {

// Shortest-ish decimal form with 9 significant digits; infinities print as
// "inf" / "-inf".
std::string format_real(ExtReal x);

}  // namespace fdx
