#include "fdiv/ext_real.hpp"

#include <cstdio>
#include <ostream>

#include "fdiv/format.hpp"

namespace fdx {

std::string format_real(ExtReal x) {
    if (x.is_pos_inf()) return "inf";
    if (x.is_neg_inf()) return "-inf";
    char buf[40];
    const double v = x.value() == 0.0 ? 0.0 : x.value();
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::ostream& operator<<(std::ostream& os, ExtReal x) { return os << format_real(x); }

}  // namespace fdx
