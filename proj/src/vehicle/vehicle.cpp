#include "smartcore/vehicle/vehicle.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "smartcore/obd/codec.hpp"

namespace smartcore::vehicle {

bool VehicleProfile::has_quirk(const std::string& q) const {
    return std::find(quirks.begin(), quirks.end(), q) != quirks.end();
}

std::string to_string(EventKind k) {
    switch (k) {
        case EventKind::Collision: return "collision";
        case EventKind::CheckEngineOn: return "check_engine_on";
        case EventKind::CheckEngineOff: return "check_engine_off";
        case EventKind::LawEnforcementAlert: return "law_enforcement_alert";
    }
    return "unknown";
}

EventKind parse_event_kind(const std::string& s) {
    if (s == "collision") return EventKind::Collision;
    if (s == "check_engine_on") return EventKind::CheckEngineOn;
    if (s == "check_engine_off") return EventKind::CheckEngineOff;
    if (s == "law_enforcement_alert") return EventKind::LawEnforcementAlert;
    throw std::invalid_argument("unknown event kind '" + s + "'");
}

void SignalTimeline::add(const VehicleEvent& e) {
    auto it = std::upper_bound(events_.begin(), events_.end(), e.at,
                               [](double t, const VehicleEvent& v) { return t < v.at; });
    events_.insert(it, e);
}

bool SignalTimeline::emergency_at(double t) const {
    return std::any_of(events_.begin(), events_.end(),
                       [t](const VehicleEvent& e) { return e.kind == EventKind::Collision && e.at <= t; });
}

bool SignalTimeline::check_engine_at(double t) const {
    bool on = false;
    for (const auto& e : events_) {
        if (e.at > t) break;
        if (e.kind == EventKind::CheckEngineOn) on = true;
        if (e.kind == EventKind::CheckEngineOff) on = false;
    }
    return on;
}

bool SignalTimeline::alert_active_at(double t) const {
    return std::any_of(events_.begin(), events_.end(), [&](const VehicleEvent& e) {
        return e.kind == EventKind::LawEnforcementAlert && e.at <= t && t < e.at + alert_ttl_s_;
    });
}

std::vector<VehicleEvent> parse_events(const std::string& json_text) {
    const auto doc = nlohmann::json::parse(json_text);
    if (!doc.is_array()) throw std::invalid_argument("events document must be a JSON array");
    std::vector<VehicleEvent> out;
    for (const auto& item : doc) {
        out.push_back(VehicleEvent{parse_event_kind(item.at("kind").get<std::string>()), item.at("at").get<double>()});
    }
    return out;
}

std::vector<VehicleEvent> load_events_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open events file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_events(ss.str());
}

std::size_t bus_arbitrate(std::span<const obd::ObdRequest> pending) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pending.size(); ++i) {
        const auto& a = pending[i];
        const auto& b = pending[best];
        if (a.pid.code < b.pid.code || (a.pid.code == b.pid.code && a.issued_at < b.issued_at)) best = i;
    }
    return best;
}

VirtualVehicle::VirtualVehicle(DrivingTrace trace, VehicleProfile profile, const obd::PidCatalog& catalog)
    : trace_(std::move(trace)), profile_(std::move(profile)), catalog_(catalog) {
    for (const auto code : profile_.supported_pids) {
        if (!catalog_.contains(obd::live(code)))
            throw std::invalid_argument("vehicle profile lists PID " + obd::to_string(obd::live(code)) +
                                        " that is not in the catalog");
    }
}

bool VirtualVehicle::supports(obd::Pid pid) const {
    if (!catalog_.contains(pid)) return false;
    return profile_.supported_pids.empty() || profile_.supported_pids.count(pid.code) > 0;
}

double VirtualVehicle::reading(obd::Pid pid, double t) const {
    switch (pid.code) {
        case obd::kSpeedPid:
            return trace_.speed_at(t);
        case obd::kOdometerPid:
            return profile_.initial_odometer_km + trace_.distance_km_at(t);
        case 0x00:
        case 0x20:
        case 0x40: {
            // Bit 31 of the mask is PID base+1, bit 0 is base+0x20.
            std::uint32_t mask = 0;
            for (unsigned i = 1; i <= 0x20; ++i) {
                const unsigned code = pid.code + i;
                if (code <= 0xFF && supports(obd::live(static_cast<std::uint8_t>(code)))) mask |= 1u << (32 - i);
            }
            return static_cast<double>(mask);
        }
        default:
            break;
    }
    if (const auto it = profile_.constants.find(pid.code); it != profile_.constants.end()) return it->second;
    const auto& e = catalog_.at(pid);
    return std::clamp(0.0, e.min_value(), e.max_value());
}

obd::ObdResponse VirtualVehicle::query_locked(obd::Pid pid, double t) const {
    if (!supports(pid)) throw VehicleError(VehicleError::Code::UnsupportedPid, "unsupported PID " + obd::to_string(pid));
    if (!trace_.contains(t))
        throw VehicleError(VehicleError::Code::OutOfSpan, "query time " + std::to_string(t) + " outside trace span");
    obd::ObdResponse r;
    r.pid = pid;
    r.raw = obd::encode_clamped(catalog_, pid, reading(pid, t));
    r.value = obd::decode_value(catalog_, pid, r.raw);
    r.answered_at = SimTime::from_seconds(t);
    return r;
}

obd::ObdResponse VirtualVehicle::query(obd::Pid pid, double t) const {
    std::lock_guard lock(mu_);
    return query_locked(pid, t);
}

obd::ObdResponse VirtualVehicle::serve(const obd::ObdRequest& request, double t) {
    std::lock_guard lock(mu_);
    log_.push_back(request);
    // The bus keeps answering after the recorded trace ends; hold the last state.
    const double tq = std::clamp(t, trace_.start(), trace_.end());
    if (request.pid.mode != obd::service::kLiveData) {
        if (request.pid.mode == obd::service::kClearDtc)
            signals_.add(VehicleEvent{EventKind::CheckEngineOff, tq});
        obd::ObdResponse ack;
        ack.pid = request.pid;
        ack.value = obd::PhysicalValue{0.0, ""};
        ack.answered_at = SimTime::from_seconds(t);
        return ack;
    }
    if (!supports(request.pid)) {
        // Negative response: empty payload, NaN value.
        obd::ObdResponse nrc;
        nrc.pid = request.pid;
        nrc.value = obd::PhysicalValue{std::numeric_limits<double>::quiet_NaN(), ""};
        nrc.answered_at = SimTime::from_seconds(t);
        return nrc;
    }
    auto r = query_locked(request.pid, tq);
    r.answered_at = SimTime::from_seconds(t);
    return r;
}

void VirtualVehicle::inject_event(const VehicleEvent& e) {
    std::lock_guard lock(mu_);
    if (!trace_.contains(e.at))
        throw VehicleError(VehicleError::Code::OutOfSpan, "event time " + std::to_string(e.at) + " outside trace span");
    signals_.add(e);
}

void VirtualVehicle::reset_events() {
    std::lock_guard lock(mu_);
    signals_.reset();
}

SignalTimeline VirtualVehicle::signals() const {
    std::lock_guard lock(mu_);
    return signals_;
}

std::vector<obd::ObdRequest> VirtualVehicle::service_log() const {
    std::lock_guard lock(mu_);
    return log_;
}

std::size_t VirtualVehicle::service_count() const {
    std::lock_guard lock(mu_);
    return log_.size();
}

}  // namespace smartcore::vehicle
