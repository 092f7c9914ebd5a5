#include "smartcore/obd/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace smartcore::obd {

bool is_write(Pid pid) {
    switch (pid.mode) {
        case service::kLiveData:
        case service::kReadDtc:
        case service::kVehicleInfo:
            return false;
        default:
            return true;
    }
}

std::string to_string(Pid pid) {
    char buf[16];
    if (pid.mode == service::kLiveData)
        std::snprintf(buf, sizeof buf, "0x%02X", pid.code);
    else
        std::snprintf(buf, sizeof buf, "%02X:%02X", pid.mode, pid.code);
    return buf;
}

Pid parse_pid(const std::string& text) {
    try {
        if (const auto colon = text.find(':'); colon != std::string::npos) {
            const auto mode = std::stoul(text.substr(0, colon), nullptr, 16);
            const auto code = std::stoul(text.substr(colon + 1), nullptr, 16);
            if (mode > 0xFF || code > 0xFF) throw std::out_of_range("pid");
            return Pid{static_cast<std::uint8_t>(mode), static_cast<std::uint8_t>(code)};
        }
        std::size_t used = 0;
        const auto code = std::stoul(text, &used, 16);
        if (used != text.size() || code > 0xFF) throw std::out_of_range("pid");
        return live(static_cast<std::uint8_t>(code));
    } catch (const std::logic_error&) {
        throw ObdError(ObdError::Code::Parse, "bad PID '" + text + "'");
    }
}

namespace {

std::vector<std::uint8_t> to_bytes(std::int64_t raw, std::size_t len) {
    std::vector<std::uint8_t> out(len);
    auto bits = static_cast<std::uint64_t>(raw);
    for (std::size_t i = len; i-- > 0;) {
        out[i] = static_cast<std::uint8_t>(bits & 0xFF);
        bits >>= 8;
    }
    return out;
}

void raw_range(const PidCatalogEntry& e, std::int64_t& lo, std::int64_t& hi) {
    const auto bits = 8 * e.payload_len;
    if (e.formula.kind == FormulaKind::AffineSigned) {
        lo = -(std::int64_t{1} << (bits - 1));
        hi = (std::int64_t{1} << (bits - 1)) - 1;
    } else {
        lo = 0;
        hi = (std::int64_t{1} << bits) - 1;
    }
}

}  // namespace

std::vector<std::uint8_t> encode_value(const PidCatalog& catalog, Pid pid, double value) {
    const auto& e = catalog.at(pid);
    if (!std::isfinite(value))
        throw ObdError(ObdError::Code::OutOfRange, "non-finite value for " + to_string(pid));
    const double scaled = (value - e.formula.offset) / e.formula.scale;
    std::int64_t lo = 0, hi = 0;
    raw_range(e, lo, hi);
    // Half-step slack so the exact range endpoints survive float rounding.
    if (scaled < static_cast<double>(lo) - 0.5 || scaled > static_cast<double>(hi) + 0.5)
        throw ObdError(ObdError::Code::OutOfRange, "value " + std::to_string(value) + " out of range for " +
                                                       to_string(pid) + " (" + e.name + ")");
    auto raw = static_cast<std::int64_t>(std::llround(scaled));
    raw = std::clamp(raw, lo, hi);
    return to_bytes(raw, e.payload_len);
}

std::vector<std::uint8_t> encode_clamped(const PidCatalog& catalog, Pid pid, double value) {
    const auto& e = catalog.at(pid);
    const double v = std::isfinite(value) ? std::clamp(value, e.min_value(), e.max_value()) : e.min_value();
    return encode_value(catalog, pid, v);
}

PhysicalValue decode_value(const PidCatalog& catalog, Pid pid, std::span<const std::uint8_t> raw) {
    const auto& e = catalog.at(pid);
    if (raw.size() != e.payload_len)
        throw ObdError(ObdError::Code::PayloadLength, to_string(pid) + " expects " + std::to_string(e.payload_len) +
                                                          " payload bytes, got " + std::to_string(raw.size()));
    std::uint64_t bits = 0;
    for (const auto b : raw) bits = (bits << 8) | b;
    double n = static_cast<double>(bits);
    if (e.formula.kind == FormulaKind::AffineSigned) {
        const auto width = 8 * e.payload_len;
        if (bits & (std::uint64_t{1} << (width - 1))) n -= std::exp2(static_cast<double>(width));
    }
    return PhysicalValue{e.formula.scale * n + e.formula.offset, e.unit};
}

std::optional<PidCatalogEntry> catalog_lookup(Pid pid) { return PidCatalog::standard().lookup(pid); }

}  // namespace smartcore::obd
