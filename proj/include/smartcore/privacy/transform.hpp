#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace smartcore::privacy {

enum class Algorithm { Identity, Shuffle, RoundShuffle, Noise };

std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);

struct PrivacyConfig {
    Algorithm alg = Algorithm::Identity;
    std::size_t window = 1;     // W, samples per shuffled batch
    int precision = 1;          // p, rounding step: 1, 5 or 10
    double r_uniform = 0.0;     // noise range, same unit as speed
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on W < 1, p not in {1,5,10}, R < 0.
    void validate() const;
};

/// Deterministic generator with implementation-independent draws, so a
/// seed reproduces the same output on every standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

    std::uint64_t next();
    /// Uniform on [0, n). n > 0.
    std::uint64_t below(std::uint64_t n);
    /// Uniform on [0, 1).
    double unit();

private:
    std::uint64_t state_;
};

/// Rounds to the nearest multiple of p, ties away from zero.
double round_to_precision(double v, int p);

/// In-place Fisher-Yates.
void fisher_yates(std::vector<double>& v, Rng& rng);

struct TransformState {
    std::vector<double> buffer;
    std::size_t emitted = 0;
    Rng rng;

    explicit TransformState(std::uint64_t seed = 0) : rng(seed) {}
};

/// Feeds one speed sample. Windowed algorithms return nothing until W
/// samples are buffered, then a permutation of the window; noise and
/// identity return exactly one value. Throws std::invalid_argument on v < 0.
std::vector<double> transform_push(TransformState& state, const PrivacyConfig& config, double v);

/// Emits a permutation of the partial window (empty for stateless modes).
std::vector<double> flush(TransformState& state, const PrivacyConfig& config);

/// Whole-trace convenience: push every sample then flush.
std::vector<double> transform_all(const PrivacyConfig& config, const std::vector<double>& speeds);

}  // namespace smartcore::privacy
