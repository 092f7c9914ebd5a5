#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smartcore/obd/pid.hpp"
#include "smartcore/policy/context.hpp"
#include "smartcore/vehicle/vehicle.hpp"

namespace smartcore::policy {

enum class PrincipalKind { Dongle, Application };

namespace profile {
inline constexpr const char* kInsurance = "insurance";
inline constexpr const char* kDiagnostic = "diagnostic";
inline constexpr const char* kProtection = "protection";
}  // namespace profile

struct Principal {
    obd::PrincipalId id;
    PrincipalKind kind = PrincipalKind::Dongle;
    std::string token;
    /// Declared intent, e.g. "insurance", "diagnostic", "protection".
    std::string profile;
};

std::string to_string(PrincipalKind k);
PrincipalKind parse_principal_kind(const std::string& s);

/// What a policy governs. Live-data PIDs are named by code; everything
/// else by operation name:
///   live_data      any mode-0x01 PID
///   read_dtc       mode 0x03
///   clear_dtc      mode 0x04
///   control        mode 0x08
///   vehicle_info   mode 0x09
///   write          every state-changing service (see obd::is_write)
///   *              everything
struct Resource {
    enum class Kind { Pid, Operation, Any };
    Kind kind = Kind::Any;
    std::uint8_t code = 0;
    std::string op;

    static Resource pid(std::uint8_t code) { return {Kind::Pid, code, {}}; }
    static Resource operation(std::string op) { return {Kind::Operation, 0, std::move(op)}; }
    static Resource any() { return {Kind::Any, 0, {}}; }

    bool matches(obd::Pid pid) const;
    bool operator==(const Resource&) const = default;
};

std::string to_string(const Resource& r);
/// Accepts "0x0D" style codes, the operation names above, or "*".
Resource parse_resource(const std::string& s);

/// Conjunction over snapshot fields; an empty field matches any value.
struct ContextPredicate {
    std::optional<VehicleStatus> vehicle_status;
    std::optional<Health> health;
    std::optional<bool> emergency;
    std::optional<bool> alert_active;
    std::optional<LocationClass> location_class;

    bool matches(const ContextSnapshot& ctx) const;
    bool operator==(const ContextPredicate&) const = default;
};

struct PrincipalSelector {
    std::optional<obd::PrincipalId> principal_id;
    std::optional<std::string> profile;

    bool matches(const Principal& p) const;
    bool operator==(const PrincipalSelector&) const = default;
};

enum class Effect { Allow, Deny };
enum class Origin { Predefined, User };

std::string to_string(Effect e);
Effect parse_effect(const std::string& s);
std::string to_string(Origin o);

/// Priority bands. Higher wins; deny overrides allow within a band.
namespace band {
inline constexpr int kDefaultDeny = 0;
inline constexpr int kBaseline = 10;
inline constexpr int kUserDefault = 100;
inline constexpr int kUserMax = 999;
inline constexpr int kSafety = 1000;
}  // namespace band

struct Policy {
    std::string id;
    PrincipalSelector selector;
    std::vector<Resource> resources;
    ContextPredicate context;
    Effect effect = Effect::Deny;
    int priority = band::kUserDefault;
    Origin origin = Origin::User;

    bool applies_to(const Principal& p, obd::Pid pid, const ContextSnapshot& ctx) const;
    bool operator==(const Policy&) const = default;
};

struct Decision {
    Effect effect = Effect::Deny;
    std::string reason;
    std::optional<std::string> policy_id;

    bool allowed() const { return effect == Effect::Allow; }
};

/// Baseline policies for a newly attached principal. Unknown profiles get
/// the restrictive template; never fails.
std::vector<Policy> derive_predefined_policies(const vehicle::VehicleProfile& vehicle, const Principal& principal);

/// Deny-overrides among the highest-priority matching policies; no match
/// is a denial. Pure function of its arguments.
Decision evaluate(const obd::ObdRequest& request, const Principal& principal, const ContextSnapshot& context,
                  const std::vector<Policy>& policies);

}  // namespace smartcore::policy
