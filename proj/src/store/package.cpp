#include "smartcore/store/package.hpp"
#include "smartcore/store/alert.hpp"

#include <stdexcept>

namespace smartcore::store {

nlohmann::json to_json(const Manifest& m) {
    return {{"profile", m.profile},
            {"privileged", m.privileged},
            {"resource_needs", m.resource_needs},
            {"description", m.description}};
}

Manifest manifest_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("manifest must be a JSON object");
    Manifest m;
    m.profile = j.value("profile", std::string{});
    m.privileged = j.value("privileged", false);
    m.resource_needs = j.value("resource_needs", std::vector<std::string>{});
    m.description = j.value("description", std::string{});
    return m;
}

nlohmann::json to_json(const AlertRecord& a) {
    return {{"make", a.make},     {"model", a.model},   {"color", a.color},
            {"plate", a.plate},   {"active", a.active}, {"issued_at", a.issued_at}};
}

AlertRecord alert_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("alert must be a JSON object");
    AlertRecord a;
    a.make = j.value("make", std::string{});
    a.model = j.value("model", std::string{});
    a.color = j.value("color", std::string{});
    a.plate = j.value("plate", std::string{});
    a.active = j.value("active", true);
    a.issued_at = j.value("issued_at", 0.0);
    if (a.plate.empty()) throw std::invalid_argument("alert plate must not be empty");
    return a;
}

nlohmann::json to_json(const SightingReport& s) {
    return {{"plate", s.plate}, {"lat", s.lat}, {"lon", s.lon}, {"reported_at", s.reported_at}};
}

SightingReport sighting_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("sighting must be a JSON object");
    SightingReport s;
    if (!j.contains("plate") || !j["plate"].is_string()) throw std::invalid_argument("sighting needs a plate");
    if (!j.contains("lat") || !j["lat"].is_number() || !j.contains("lon") || !j["lon"].is_number())
        throw std::invalid_argument("sighting needs numeric lat and lon");
    s.plate = j["plate"].get<std::string>();
    s.lat = j["lat"].get<double>();
    s.lon = j["lon"].get<double>();
    s.reported_at = j.value("reported_at", 0.0);
    if (s.plate.empty()) throw std::invalid_argument("sighting plate must not be empty");
    if (s.lat < -90 || s.lat > 90 || s.lon < -180 || s.lon > 180) throw std::invalid_argument("sighting coordinates out of range");
    return s;
}

}  // namespace smartcore::store
