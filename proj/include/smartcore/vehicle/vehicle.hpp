#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "smartcore/obd/catalog.hpp"
#include "smartcore/obd/pid.hpp"
#include "smartcore/vehicle/trace.hpp"

namespace smartcore::vehicle {

inline constexpr const char* kQuirkDenyAllWhileMoving = "deny-all-while-moving";

struct VehicleProfile {
    std::string vin = "SIMVIN0000000000";
    std::string make = "generic";
    std::string model = "sedan";
    /// Supported mode-0x01 codes; empty means "everything in the catalog".
    std::set<std::uint8_t> supported_pids;
    std::vector<std::string> quirks;
    /// Fixed readings for PIDs the trace does not drive.
    std::map<std::uint8_t, double> constants;
    double initial_odometer_km = 0.0;

    bool has_quirk(const std::string& q) const;
};

enum class EventKind { Collision, CheckEngineOn, CheckEngineOff, LawEnforcementAlert };

std::string to_string(EventKind k);
EventKind parse_event_kind(const std::string& s);

struct VehicleEvent {
    EventKind kind = EventKind::Collision;
    double at = 0.0;
};

/// Event-driven vehicle signals: emergency latches on collision until
/// reset(), check-engine latches between on/off events, and an external
/// alert stays active for `alert_ttl_s` after it arrives.
class SignalTimeline {
public:
    explicit SignalTimeline(double alert_ttl_s = 1800.0) : alert_ttl_s_(alert_ttl_s) {}

    void add(const VehicleEvent& e);
    void reset() { events_.clear(); }

    bool emergency_at(double t) const;
    bool check_engine_at(double t) const;
    bool alert_active_at(double t) const;
    const std::vector<VehicleEvent>& events() const { return events_; }

private:
    std::vector<VehicleEvent> events_;  // sorted by time, stable
    double alert_ttl_s_;
};

/// JSON array of {"kind": "...", "at": seconds}.
std::vector<VehicleEvent> parse_events(const std::string& json_text);
std::vector<VehicleEvent> load_events_file(const std::string& path);

class VehicleError : public std::runtime_error {
public:
    enum class Code { UnsupportedPid, OutOfSpan };
    VehicleError(Code c, const std::string& what) : std::runtime_error(what), code_(c) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Index of the request the bus serves next: lowest PID code wins, ties go
/// to the earliest issued_at, then to the earlier position in `pending`.
/// `pending` must be non-empty.
std::size_t bus_arbitrate(std::span<const obd::ObdRequest> pending);

/// Replays a trace and answers PID queries. All calls are serialized on an
/// internal mutex, so callers may share one instance across threads.
class VirtualVehicle {
public:
    VirtualVehicle(DrivingTrace trace, VehicleProfile profile,
                   const obd::PidCatalog& catalog = obd::PidCatalog::standard());

    const DrivingTrace& trace() const { return trace_; }
    const VehicleProfile& profile() const { return profile_; }
    const obd::PidCatalog& catalog() const { return catalog_; }

    bool supports(obd::Pid pid) const;

    /// Answers a live-data query at time t without logging it.
    obd::ObdResponse query(obd::Pid pid, double t) const;

    /// Services one frame that crossed the port: logs it vehicle-side and
    /// answers it. Commands (non-0x01 services) are acknowledged with an
    /// empty payload; clear-DTC also clears the check-engine latch.
    obd::ObdResponse serve(const obd::ObdRequest& request, double t);

    void inject_event(const VehicleEvent& e);
    void reset_events();
    SignalTimeline signals() const;

    /// Every frame serve() has seen, in service order.
    std::vector<obd::ObdRequest> service_log() const;
    std::size_t service_count() const;

private:
    obd::ObdResponse query_locked(obd::Pid pid, double t) const;
    double reading(obd::Pid pid, double t) const;

    DrivingTrace trace_;
    VehicleProfile profile_;
    const obd::PidCatalog& catalog_;
    mutable std::mutex mu_;
    SignalTimeline signals_;
    std::vector<obd::ObdRequest> log_;
};

}  // namespace smartcore::vehicle
