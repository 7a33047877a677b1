#include "cvdimer/format.hpp"

#include <cmath>
#include <cstdio>

namespace cvdimer {

std::string fmt15(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace cvdimer
