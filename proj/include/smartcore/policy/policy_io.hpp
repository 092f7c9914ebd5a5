#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartcore/policy/policy.hpp"
#include "smartcore/privacy/transform.hpp"

namespace smartcore::policy {

/// One access-control file per principal:
///
///     {
///       "principal": "metromile",
///       "kind": "dongle", "profile": "insurance", "token": "...",      (optional)
///       "policies": [
///         {"id": "p1", "resource": ["0x0D", "clear_dtc"],
///          "context": {"vehicle_status": "moving", "health": "fault"},
///          "effect": "deny", "priority": 100}
///       ],
///       "response_transform": {"alg": "noise", "R_uniform": 20, "seed": 7}  (optional)
///     }
struct PolicyDocument {
    obd::PrincipalId principal;
    std::optional<PrincipalKind> kind;
    std::optional<std::string> profile;
    std::optional<std::string> token;
    std::vector<Policy> policies;
    std::optional<privacy::PrivacyConfig> response_transform;
};

nlohmann::json to_json(const Policy& p);
/// Policies inside a document select `principal` unless they name a
/// "profile" selector of their own.
Policy policy_from_json(const nlohmann::json& j, const obd::PrincipalId& principal);

nlohmann::json to_json(const ContextPredicate& c);
ContextPredicate context_from_json(const nlohmann::json& j);

nlohmann::json to_json(const privacy::PrivacyConfig& c);
privacy::PrivacyConfig privacy_config_from_json(const nlohmann::json& j);

PolicyDocument parse_policy_document(const nlohmann::json& j);
PolicyDocument load_policy_document(const std::string& path);
nlohmann::json to_json(const PolicyDocument& d);

}  // namespace smartcore::policy
