#include "stokhom/report.hpp"

#include <cstdio>

namespace stokhom {

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // prefer a shorter representation when it round-trips exactly
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[40];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        double back;
        if (std::sscanf(shorter, "%lf", &back) == 1 && back == v) return shorter;
    }
    return buf;
}

}  // namespace stokhom
