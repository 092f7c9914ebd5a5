#include "smartcore/version.hpp"

#include <stdexcept>

namespace smartcore {

Version Version::parse(const std::string& text) {
    std::string s = text;
    if (!s.empty() && (s[0] == 'v' || s[0] == 'V')) s.erase(0, 1);
    if (s.empty()) throw std::invalid_argument("empty version string");
    int parts[3] = {0, 0, 0};
    int n = 0;
    std::size_t i = 0;
    while (i <= s.size()) {
        if (n == 3) throw std::invalid_argument("version '" + text + "' has more than three parts");
        std::size_t j = s.find('.', i);
        if (j == std::string::npos) j = s.size();
        std::string part = s.substr(i, j - i);
        if (part.empty() || part.size() > 6 || part.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("malformed version '" + text + "'");
        parts[n++] = std::stoi(part);
        i = j + 1;
    }
    return {parts[0], parts[1], parts[2]};
}

std::string Version::str() const {
    return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

}  // namespace smartcore
