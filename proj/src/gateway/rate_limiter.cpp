#include "smartcore/gateway/rate_limiter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smartcore::gateway {

namespace {
SimTime interval_for(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("rate must be a positive number, got " + std::to_string(rate));
    // Round up so the spacing never undercuts 1/rate.
    return SimTime::from_ns(static_cast<std::int64_t>(std::ceil(1e9 / rate)));
}
}  // namespace

RateLimiterState::RateLimiterState(double max_rate) : max_rate_(max_rate), interval_(interval_for(max_rate)) {}

SimTime RateLimiterState::next_release(SimTime ready) const {
    if (!last_release_) return ready;
    return std::max(ready, *last_release_ + interval_);
}

void RateLimiterState::record_release(SimTime at, SimTime ready) {
    if (at > ready) ++deficit_;
    last_release_ = at;
}

void RateLimiterState::set_rate(double max_rate) {
    interval_ = interval_for(max_rate);
    max_rate_ = max_rate;
}

}  // namespace smartcore::gateway
