#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartcore/obd/pid.hpp"
#include "smartcore/pathing/attack.hpp"
#include "smartcore/policy/policy.hpp"
#include "smartcore/privacy/transform.hpp"
#include "smartcore/vehicle/vehicle.hpp"

namespace smartcore::cli {

/// Validation failure tied to a file and, when known, a line.
class ScenarioError : public std::runtime_error {
public:
    ScenarioError(const std::string& file, std::size_t line, const std::string& what);
    const std::string& file() const { return file_; }
    std::size_t line() const { return line_; }

private:
    std::string file_;
    std::size_t line_;
};

/// Periodic request stream of one principal.
struct Workload {
    obd::Pid pid = obd::live(obd::kSpeedPid);
    double rate_hz = 1.0;
    double start_s = 0.0;
    std::optional<double> stop_s;  // exclusive; defaults to the scenario horizon
};

struct PrincipalSpec {
    obd::PrincipalId id;
    policy::PrincipalKind kind = policy::PrincipalKind::Dongle;
    std::string profile;
    std::string token;
    std::optional<double> rate_limit;  // req/s, set by the owner before the run
    bool blocked = false;
    std::vector<Workload> workload;
};

struct GatewaySpec {
    double service_time_ms = 10.0;
    double overhead_ms = 0.0;
    std::size_t queue_capacity = 1024;
};

/// Response transform on one principal's speed readings, plus the utility
/// comparison between what the vehicle answered and what was delivered.
struct PrivacySpec {
    obd::PrincipalId principal;
    privacy::PrivacyConfig config;
    double threshold_kmh = 0.0;  // 0 selects the 25 mph default
};

/// Destination inference over the speed readings delivered to a principal.
struct AttackSpec {
    obd::PrincipalId principal;
    std::optional<std::filesystem::path> network_file;
    pathing::GridOptions grid;        // used when no network file is given
    std::uint64_t grid_seed = 1;
    std::vector<pathing::NodeId> route;  // empty: a random route of route_edges
    int route_edges = 6;
    pathing::AttackOptions options;
};

struct PartitionSpec {
    std::filesystem::path fixture;
    std::optional<std::filesystem::path> model;  // fitted model; calibrated on the fly when absent
    std::vector<std::string> placements{"cloud", "smartcore", "hybrid"};
    std::optional<std::string> resolution;
    std::optional<double> cpu_mhz;
    std::optional<double> fps;
    std::optional<std::uint64_t> seed;  // frame generation; the fixture's seed by default
};

/// `metric op value`, or `metric op factor * ref` when ref is set.
/// `approx` passes when the relative gap is within rel_tol.
struct Expectation {
    std::string metric;
    std::string op = "<=";
    double value = 0.0;
    std::optional<std::string> ref;
    double factor = 1.0;
    double rel_tol = 0.05;
};

struct Scenario {
    std::string name;
    std::string description;
    std::filesystem::path source;  // file the scenario was read from
    std::uint64_t seed = 0;
    double duration_s = 60.0;

    std::optional<std::filesystem::path> trace;  // CSV; synthesized from the attack route when absent
    vehicle::VehicleProfile vehicle;
    std::vector<vehicle::VehicleEvent> events;
    std::optional<std::filesystem::path> events_file;
    GatewaySpec gateway;
    std::vector<PrincipalSpec> principals;
    std::vector<std::filesystem::path> policy_files;
    std::optional<PrivacySpec> privacy;
    std::optional<AttackSpec> attack;
    std::optional<PartitionSpec> partition;
    std::vector<Expectation> expectations;
};

/// Relative paths inside the document resolve against `base_dir`.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir,
                            const std::string& file = "<scenario>");
/// Parse errors carry the offending line; missing referenced files are
/// reported against the scenario file.
Scenario load_scenario(const std::filesystem::path& path);

/// Fully resolved configuration, embedded in every report.
nlohmann::json to_json(const Scenario& s);

}  // namespace smartcore::cli
