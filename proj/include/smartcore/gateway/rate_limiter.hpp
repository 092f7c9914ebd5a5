#pragma once

#include <cstdint>
#include <optional>

#include "smartcore/sim_time.hpp"

namespace smartcore::gateway {

/// Strict-spacing release: consecutive releases are at least 1/max_rate
/// apart, with a burst allowance of one. Requests wait in the session FIFO
/// until their release time.
class RateLimiterState {
public:
    explicit RateLimiterState(double max_rate);  // throws std::invalid_argument unless rate > 0

    double max_rate() const { return max_rate_; }
    SimTime interval() const { return interval_; }
    std::optional<SimTime> last_release() const { return last_release_; }
    /// Requests that had to wait past their arrival time.
    std::uint64_t deficit() const { return deficit_; }

    /// Earliest release time for a request that became eligible at `ready`.
    SimTime next_release(SimTime ready) const;
    void record_release(SimTime at, SimTime ready);
    void set_rate(double max_rate);

private:
    double max_rate_;
    SimTime interval_;
    std::optional<SimTime> last_release_;
    std::uint64_t deficit_ = 0;
};

}  // namespace smartcore::gateway
