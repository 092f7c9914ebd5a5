#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartcore/store/alert.hpp"
#include "smartcore/store/package.hpp"

namespace smartcore::store {

class StoreError : public std::runtime_error {
public:
    enum class Code { NotFound, Invalid, Conflict, Integrity, Io };
    StoreError(Code c, const std::string& what) : std::runtime_error(what), code_(c) {}
    Code code() const { return code_; }

private:
    Code code_;
};

/// Lower-case hex SHA-256.
std::string sha256_hex(const std::vector<std::uint8_t>& data);
std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(const std::string& text);  // throws StoreError(Invalid)

/// Flat-file package repository, alert database and sighting log under one
/// directory:
///
///     apps/<id>/<version>/manifest.json
///     apps/<id>/<version>/payload.bin
///     apps/<id>/<version>/digest
///     alerts.json
///     sightings.jsonl        (append-only)
///
/// All public methods are safe to call concurrently; mutations are
/// serialized.
class AppStore {
public:
    explicit AppStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    // --- packages -------------------------------------------------------
    /// Versions must be strictly increasing per app; a published version is
    /// immutable.
    PackageVersion publish(const std::string& app_id, const Version& version, const Manifest& manifest,
                           const std::vector<std::uint8_t>& payload);
    std::vector<PackageRecord> list_packages() const;
    /// Latest version when none is given. The payload digest is re-checked.
    Package get_package(const std::string& app_id, std::optional<Version> version = std::nullopt) const;

    // --- alerts ---------------------------------------------------------
    /// Inserts or updates by plate. At most one active record per plate.
    void upsert_alert(const AlertRecord& alert);
    void set_alert_active(const std::string& plate, bool active, double at);
    /// Active records issued or updated at or after `since`.
    std::vector<AlertRecord> get_alerts(double since) const;

    // --- sightings ------------------------------------------------------
    /// Returns the 1-based position in the log.
    std::uint64_t post_sighting(const SightingReport& report);
    std::vector<SightingReport> sightings() const;

private:
    std::vector<AlertRecord> read_alerts() const;
    void write_alerts(const std::vector<AlertRecord>& alerts) const;
    std::filesystem::path app_dir(const std::string& app_id) const;

    std::filesystem::path root_;
    mutable std::mutex mu_;
};

}  // namespace smartcore::store
