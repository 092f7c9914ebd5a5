#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smartcore/vehicle/trace.hpp"
#include "smartcore/vehicle/vehicle.hpp"

namespace smartcore::policy {

enum class VehicleStatus { Idle, Moving };
enum class Health { Ok, Fault };
enum class LocationClass { Home, Office, TrustedRepair, Other };

std::string to_string(VehicleStatus v);
std::string to_string(Health v);
std::string to_string(LocationClass v);
VehicleStatus parse_vehicle_status(const std::string& s);
Health parse_health(const std::string& s);
LocationClass parse_location_class(const std::string& s);

struct ContextSnapshot {
    VehicleStatus vehicle_status = VehicleStatus::Idle;
    Health health = Health::Ok;
    bool emergency = false;
    bool alert_active = false;
    LocationClass location_class = LocationClass::Other;

    bool operator==(const ContextSnapshot&) const = default;
};

/// All 2*2*2*2*4 snapshots, in a fixed order.
std::vector<ContextSnapshot> all_contexts();

struct NamedLocation {
    std::string name;
    LocationClass cls = LocationClass::Other;
    vehicle::GeoPoint point;
    double radius_m = 100.0;
};

class LocationRegistry {
public:
    LocationRegistry() = default;
    explicit LocationRegistry(std::vector<NamedLocation> points);

    void add(NamedLocation p);  // throws std::invalid_argument unless radius > 0
    const std::vector<NamedLocation>& points() const { return points_; }

    /// Class of the nearest point whose radius contains `at`, else Other.
    LocationClass classify(const vehicle::GeoPoint& at) const;

private:
    std::vector<NamedLocation> points_;
};

/// Great-circle distance in metres (mean Earth radius 6371 km).
double haversine_m(const vehicle::GeoPoint& a, const vehicle::GeoPoint& b);

struct RecognitionOptions {
    double moving_threshold_kmh = 1.0;
    double debounce_s = 2.0;
};

/// Recognizes the context at time t. Moving means the held speed has been
/// above the threshold continuously for at least the debounce period.
/// `location` overrides the trace's own GPS columns; with neither, the
/// location class is Other.
ContextSnapshot recognize_context(const vehicle::DrivingTrace& trace, const vehicle::SignalTimeline& signals,
                                  std::optional<vehicle::GeoPoint> location, const LocationRegistry& registry,
                                  double t, const RecognitionOptions& opts = {});

}  // namespace smartcore::policy
