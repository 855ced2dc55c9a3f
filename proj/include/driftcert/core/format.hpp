#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace driftcert {

// All text outputs use 9 significant digits so files are byte-reproducible.
inline std::string fmt9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

// Snaps a value to 9 significant digits (for JSON numbers).
inline double round9(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

}  // namespace driftcert
