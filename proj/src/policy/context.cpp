#include "smartcore/policy/context.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace smartcore::policy {

std::string to_string(VehicleStatus v) { return v == VehicleStatus::Idle ? "idle" : "moving"; }
std::string to_string(Health v) { return v == Health::Ok ? "ok" : "fault"; }

std::string to_string(LocationClass v) {
    switch (v) {
        case LocationClass::Home: return "home";
        case LocationClass::Office: return "office";
        case LocationClass::TrustedRepair: return "trusted_repair";
        case LocationClass::Other: return "other";
    }
    return "other";
}

VehicleStatus parse_vehicle_status(const std::string& s) {
    if (s == "idle") return VehicleStatus::Idle;
    if (s == "moving") return VehicleStatus::Moving;
    throw std::invalid_argument("bad vehicle_status '" + s + "'");
}

Health parse_health(const std::string& s) {
    if (s == "ok") return Health::Ok;
    if (s == "fault") return Health::Fault;
    throw std::invalid_argument("bad health '" + s + "'");
}

LocationClass parse_location_class(const std::string& s) {
    if (s == "home") return LocationClass::Home;
    if (s == "office") return LocationClass::Office;
    if (s == "trusted_repair") return LocationClass::TrustedRepair;
    if (s == "other") return LocationClass::Other;
    throw std::invalid_argument("bad location_class '" + s + "'");
}

std::vector<ContextSnapshot> all_contexts() {
    std::vector<ContextSnapshot> out;
    for (auto vs : {VehicleStatus::Idle, VehicleStatus::Moving})
        for (auto h : {Health::Ok, Health::Fault})
            for (bool em : {false, true})
                for (bool al : {false, true})
                    for (auto loc : {LocationClass::Home, LocationClass::Office, LocationClass::TrustedRepair,
                                     LocationClass::Other})
                        out.push_back(ContextSnapshot{vs, h, em, al, loc});
    return out;
}

double haversine_m(const vehicle::GeoPoint& a, const vehicle::GeoPoint& b) {
    constexpr double kEarthRadiusM = 6371000.0;
    constexpr double kDeg = M_PI / 180.0;
    const double dlat = (b.lat - a.lat) * kDeg;
    const double dlon = (b.lon - a.lon) * kDeg;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::sin(dlon / 2) * std::sin(dlon / 2);
    return 2 * kEarthRadiusM * std::asin(std::min(1.0, std::sqrt(h)));
}

LocationRegistry::LocationRegistry(std::vector<NamedLocation> points) {
    for (auto& p : points) add(std::move(p));
}

void LocationRegistry::add(NamedLocation p) {
    if (!(p.radius_m > 0.0)) throw std::invalid_argument("location '" + p.name + "' needs a positive radius");
    points_.push_back(std::move(p));
}

LocationClass LocationRegistry::classify(const vehicle::GeoPoint& at) const {
    double best = std::numeric_limits<double>::infinity();
    LocationClass cls = LocationClass::Other;
    for (const auto& p : points_) {
        const double d = haversine_m(at, p.point);
        if (d <= p.radius_m && d < best) {
            best = d;
            cls = p.cls;
        }
    }
    return cls;
}

ContextSnapshot recognize_context(const vehicle::DrivingTrace& trace, const vehicle::SignalTimeline& signals,
                                  std::optional<vehicle::GeoPoint> location, const LocationRegistry& registry,
                                  double t, const RecognitionOptions& opts) {
    if (!trace.contains(t)) throw std::out_of_range("context time " + std::to_string(t) + " outside trace span");

    ContextSnapshot ctx;
    const auto& s = trace.samples();
    std::size_t i = trace.index_at(t);
    if (s[i].speed_kmh > opts.moving_threshold_kmh) {
        std::size_t j = i;
        while (j > 0 && s[j - 1].speed_kmh > opts.moving_threshold_kmh) --j;
        if (t - s[j].t_s >= opts.debounce_s) ctx.vehicle_status = VehicleStatus::Moving;
    }
    ctx.health = signals.check_engine_at(t) ? Health::Fault : Health::Ok;
    ctx.emergency = signals.emergency_at(t);
    ctx.alert_active = signals.alert_active_at(t);

    if (!location && trace.has_position()) location = trace.position_at(t);
    ctx.location_class = location ? registry.classify(*location) : LocationClass::Other;
    return ctx;
}

}  // namespace smartcore::policy
