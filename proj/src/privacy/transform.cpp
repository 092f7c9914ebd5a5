#include "smartcore/privacy/transform.hpp"

#include <cmath>
#include <stdexcept>

namespace smartcore::privacy {

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Identity: return "identity";
        case Algorithm::Shuffle: return "shuffle";
        case Algorithm::RoundShuffle: return "round_shuffle";
        case Algorithm::Noise: return "noise";
    }
    return "identity";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "identity") return Algorithm::Identity;
    if (s == "shuffle") return Algorithm::Shuffle;
    if (s == "round_shuffle") return Algorithm::RoundShuffle;
    if (s == "noise") return Algorithm::Noise;
    throw std::invalid_argument("unknown privacy algorithm '" + s + "'");
}

void PrivacyConfig::validate() const {
    if (window < 1) throw std::invalid_argument("window size must be >= 1");
    if (precision != 1 && precision != 5 && precision != 10)
        throw std::invalid_argument("rounding precision must be 1, 5 or 10");
    if (!(r_uniform >= 0.0) || !std::isfinite(r_uniform)) throw std::invalid_argument("noise range must be >= 0");
}

// SplitMix64.
std::uint64_t Rng::next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = 0;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

double Rng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double round_to_precision(double v, int p) { return std::round(v / p) * p; }

void fisher_yates(std::vector<double>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(v[i - 1], v[j]);
    }
}

namespace {

std::vector<double> drain(TransformState& state) {
    std::vector<double> out;
    out.swap(state.buffer);
    fisher_yates(out, state.rng);
    state.emitted += out.size();
    return out;
}

double add_noise(double v, double range, Rng& rng) {
    if (range <= 0.0) return v;
    // Open interval (0, R) on the output: reject draws that vanish or reach
    // R after floating-point addition.
    for (;;) {
        const double out = v + rng.unit() * range;
        if (out > v && out < v + range) return out;
    }
}

}  // namespace

std::vector<double> transform_push(TransformState& state, const PrivacyConfig& config, double v) {
    if (!(v >= 0.0)) throw std::invalid_argument("speed must be non-negative");
    switch (config.alg) {
        case Algorithm::Identity:
            ++state.emitted;
            return {v};
        case Algorithm::Noise:
            ++state.emitted;
            return {add_noise(v, config.r_uniform, state.rng)};
        case Algorithm::RoundShuffle:
            v = round_to_precision(v, config.precision);
            [[fallthrough]];
        case Algorithm::Shuffle:
            state.buffer.push_back(v);
            if (state.buffer.size() >= config.window) return drain(state);
            return {};
    }
    return {};
}

std::vector<double> flush(TransformState& state, const PrivacyConfig& config) {
    if (config.alg == Algorithm::Identity || config.alg == Algorithm::Noise || state.buffer.empty()) return {};
    return drain(state);
}

std::vector<double> transform_all(const PrivacyConfig& config, const std::vector<double>& speeds) {
    config.validate();
    TransformState state(config.seed);
    std::vector<double> out;
    out.reserve(speeds.size());
    for (const double v : speeds) {
        const auto part = transform_push(state, config, v);
        out.insert(out.end(), part.begin(), part.end());
    }
    const auto rest = flush(state, config);
    out.insert(out.end(), rest.begin(), rest.end());
    return out;
}

}  // namespace smartcore::privacy
