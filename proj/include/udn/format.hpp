#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace udn
{

//! Shortest-round-trip-safe text for CSV cells (17 significant digits).
inline std::string format_number(double v)
{
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    if (std::isnan(v))
        return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace udn
