#pragma once

#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

namespace prodrisk {

/// Shortest decimal text that parses back to the same double.
inline std::string format_csv(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    char buffer[32];
    auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buffer, end);
}

}  // namespace prodrisk
