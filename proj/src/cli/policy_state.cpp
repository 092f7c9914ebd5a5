#include "smartcore/cli/policy_state.hpp"

#include <fstream>

#include "smartcore/gateway/management_api.hpp"
#include "smartcore/policy/policy_io.hpp"

namespace smartcore::cli {

using nlohmann::json;

json to_json(const PolicyState& s) {
    json ps = json::array();
    for (const auto& p : s.principals)
        ps.push_back({{"id", p.id}, {"kind", policy::to_string(p.kind)}, {"profile", p.profile}, {"token", p.token}});
    json pol = json::array();
    for (const auto& p : s.user_policies) pol.push_back(policy::to_json(p));
    return {{"principals", ps}, {"policies", pol}};
}

PolicyState policy_state_from_json(const json& j) {
    PolicyState s;
    for (const auto& p : j.value("principals", json::array()))
        s.principals.push_back({p.at("id").get<std::string>(),
                                policy::parse_principal_kind(p.value("kind", std::string("dongle"))),
                                p.value("token", std::string()), p.value("profile", std::string())});
    for (const auto& p : j.value("policies", json::array())) s.user_policies.push_back(policy::policy_from_json(p, ""));
    return s;
}

PolicyState load_policy_state(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    return policy_state_from_json(json::parse(in));
}

void save_policy_state(const std::filesystem::path& path, const PolicyState& state) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << to_json(state).dump(2) << "\n";
    }
    std::filesystem::rename(tmp, path);
}

std::vector<json> apply_policy_commands(PolicyState& state, const std::vector<json>& commands) {
    // The management API needs a live gateway; a parked two-sample trace is
    // enough since no frame is ever served here.
    vehicle::VirtualVehicle veh(vehicle::DrivingTrace("parked", {{0.0, 0.0, std::nullopt}, {1.0, 0.0, std::nullopt}}),
                                vehicle::VehicleProfile{});
    gateway::Gateway gw(veh);
    for (const auto& p : state.principals) gw.attach(p);
    for (const auto& p : state.user_policies) gw.policies().add(p);

    gateway::ManagementApi api(gw);
    std::vector<json> out;
    for (const auto& c : commands) {
        out.push_back(api.handle(c));
        if (!out.back().value("ok", false)) return out;
    }

    PolicyState next;
    for (const auto& id : gw.principals()) next.principals.push_back(gw.session(id).principal());
    for (const auto& p : gw.policies().list())
        if (p.origin == policy::Origin::User) next.user_policies.push_back(p);
    state = std::move(next);
    return out;
}

}  // namespace smartcore::cli
