#pragma once

#include <string>

#include <json.hpp>

namespace smartcore::store {

struct AlertRecord {
    std::string make;
    std::string model;
    std::string color;
    std::string plate;
    bool active = true;
    double issued_at = 0.0;  // unix seconds, also bumped on update
};

struct SightingReport {
    std::string plate;
    double lat = 0.0;
    double lon = 0.0;
    double reported_at = 0.0;
};

nlohmann::json to_json(const AlertRecord& a);
AlertRecord alert_from_json(const nlohmann::json& j);  // throws std::invalid_argument
nlohmann::json to_json(const SightingReport& s);
SightingReport sighting_from_json(const nlohmann::json& j);

}  // namespace smartcore::store
