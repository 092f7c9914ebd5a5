#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace smartcore::privacy {

/// 25 mph, the speeding threshold insurers count against.
inline constexpr double kDefaultThresholdKmh = 25.0 * 1.609344;

enum class UtilityMode {
    SampleCount,   // samples strictly above threshold
    EpisodeCount,  // maximal runs of consecutive above-threshold samples
};

std::string to_string(UtilityMode m);
UtilityMode parse_utility_mode(const std::string& s);

/// Throws std::invalid_argument on empty input.
std::size_t utility(std::span<const double> speeds, double threshold, UtilityMode mode);

/// |transformed - actual| / actual; nullopt (not applicable) when actual is 0.
std::optional<double> utility_degradation(std::size_t actual, std::size_t transformed);

struct UtilityReport {
    UtilityMode mode = UtilityMode::SampleCount;
    double threshold = kDefaultThresholdKmh;
    std::size_t actual = 0;
    std::size_t transformed = 0;
    std::optional<double> degradation;
};

UtilityReport utility_report(std::span<const double> actual, std::span<const double> transformed,
                             double threshold = kDefaultThresholdKmh, UtilityMode mode = UtilityMode::SampleCount);

}  // namespace smartcore::privacy
