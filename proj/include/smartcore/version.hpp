#pragma once

#include <compare>
#include <string>

namespace smartcore {

/// Dotted numeric version ("2", "1.4", "1.4.2"); missing parts are zero.
struct Version {
    int major = 0;
    int minor = 0;
    int patch = 0;

    static Version parse(const std::string& text);  // throws std::invalid_argument
    std::string str() const;

    auto operator<=>(const Version&) const = default;
};

}  // namespace smartcore
