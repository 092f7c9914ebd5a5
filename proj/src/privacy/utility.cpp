#include "smartcore/privacy/utility.hpp"

#include <cstdlib>
#include <stdexcept>

namespace smartcore::privacy {

std::string to_string(UtilityMode m) { return m == UtilityMode::SampleCount ? "sample_count" : "episode_count"; }

UtilityMode parse_utility_mode(const std::string& s) {
    if (s == "sample_count") return UtilityMode::SampleCount;
    if (s == "episode_count") return UtilityMode::EpisodeCount;
    throw std::invalid_argument("unknown utility mode '" + s + "'");
}

std::size_t utility(std::span<const double> speeds, double threshold, UtilityMode mode) {
    if (speeds.empty()) throw std::invalid_argument("utility of an empty speed list");
    std::size_t count = 0;
    bool in_run = false;
    for (const double v : speeds) {
        const bool above = v > threshold;
        if (mode == UtilityMode::SampleCount) {
            count += above ? 1 : 0;
        } else {
            if (above && !in_run) ++count;
            in_run = above;
        }
    }
    return count;
}

std::optional<double> utility_degradation(std::size_t actual, std::size_t transformed) {
    if (actual == 0) return std::nullopt;
    const double diff = transformed > actual ? static_cast<double>(transformed - actual)
                                             : static_cast<double>(actual - transformed);
    return diff / static_cast<double>(actual);
}

UtilityReport utility_report(std::span<const double> actual, std::span<const double> transformed, double threshold,
                             UtilityMode mode) {
    UtilityReport r;
    r.mode = mode;
    r.threshold = threshold;
    r.actual = utility(actual, threshold, mode);
    r.transformed = utility(transformed, threshold, mode);
    r.degradation = utility_degradation(r.actual, r.transformed);
    return r;
}

}  // namespace smartcore::privacy
