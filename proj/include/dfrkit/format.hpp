#pragma once

#include <cstdio>
#include <string>

namespace dfr {

/// Shortest-safe round-trip text for a double ("%.17g"), used by every CSV writer.
inline std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

}  // namespace dfr
