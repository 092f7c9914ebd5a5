#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartcore/sim_time.hpp"

namespace smartcore::obd {

/// Diagnostic services used by the gateway. Only 0x01 carries catalog PIDs;
/// the others are treated as commands ("writes" when they change ECU state).
namespace service {
inline constexpr std::uint8_t kLiveData = 0x01;
inline constexpr std::uint8_t kReadDtc = 0x03;
inline constexpr std::uint8_t kClearDtc = 0x04;
inline constexpr std::uint8_t kControl = 0x08;
inline constexpr std::uint8_t kVehicleInfo = 0x09;
}  // namespace service

inline constexpr std::uint8_t kSpeedPid = 0x0D;
inline constexpr std::uint8_t kRpmPid = 0x0C;
inline constexpr std::uint8_t kCoolantPid = 0x05;
inline constexpr std::uint8_t kOdometerPid = 0xA6;
inline constexpr std::uint8_t kSupportedPidsPid = 0x00;

struct Pid {
    std::uint8_t mode = service::kLiveData;
    std::uint8_t code = 0;

    constexpr auto operator<=>(const Pid&) const = default;
};

constexpr Pid live(std::uint8_t code) { return Pid{service::kLiveData, code}; }

/// True for services that mutate ECU state (clear codes, actuator control)
/// or any service the gateway does not recognize.
bool is_write(Pid pid);

/// "0x0D" for live data, "04:00" style for other services.
std::string to_string(Pid pid);

/// Parses "0x0D" / "0D" (live data) or "MM:CC".
Pid parse_pid(const std::string& text);

using PrincipalId = std::string;

struct ObdRequest {
    PrincipalId principal_id;
    Pid pid;
    SimTime issued_at;
};

struct PhysicalValue {
    double value = 0.0;
    std::string unit;
};

struct ObdResponse {
    Pid pid;
    std::vector<std::uint8_t> raw;
    PhysicalValue value;
    SimTime answered_at;
};

class ObdError : public std::runtime_error {
public:
    enum class Code { UnknownPid, OutOfRange, PayloadLength, Parse };

    ObdError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

}  // namespace smartcore::obd
