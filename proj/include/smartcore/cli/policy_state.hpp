#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "smartcore/policy/policy.hpp"

namespace smartcore::cli {

/// Owner-side state behind the `policy` subcommands: attached principals and
/// their user-defined policies. Predefined policies are re-derived on load.
struct PolicyState {
    std::vector<policy::Principal> principals;
    std::vector<policy::Policy> user_policies;
};

/// A missing file is an empty state.
PolicyState load_policy_state(const std::filesystem::path& path);
void save_policy_state(const std::filesystem::path& path, const PolicyState& state);

nlohmann::json to_json(const PolicyState& s);
PolicyState policy_state_from_json(const nlohmann::json& j);

/// Replays the state into a fresh gateway and sends the commands through
/// its management API in order. Stops at the first failed command and
/// leaves `state` untouched in that case; otherwise `state` is replaced by
/// the result. Returns every response produced.
std::vector<nlohmann::json> apply_policy_commands(PolicyState& state, const std::vector<nlohmann::json>& commands);

}  // namespace smartcore::cli
