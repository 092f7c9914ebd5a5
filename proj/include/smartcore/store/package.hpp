#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartcore/version.hpp"

namespace smartcore::store {

/// The JSON descriptor shipped with every application version.
struct Manifest {
    std::string profile;  // declared intent, drives predefined policies
    bool privileged = false;
    std::vector<std::string> resource_needs;
    std::string description;

    bool operator==(const Manifest&) const = default;
};

struct PackageVersion {
    Version version;
    std::string digest;  // hex SHA-256 of the payload
    Manifest manifest;
};

struct PackageRecord {
    std::string app_id;
    std::vector<PackageVersion> versions;  // strictly increasing
};

/// A downloaded package: exact payload bytes plus its manifest.
struct Package {
    std::string app_id;
    Version version;
    Manifest manifest;
    std::vector<std::uint8_t> payload;
    std::string digest;
};

nlohmann::json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);

}  // namespace smartcore::store
