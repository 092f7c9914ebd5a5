#include "smartcore/policy/policy_io.hpp"

#include <fstream>
#include <stdexcept>

namespace smartcore::policy {

using nlohmann::json;

json to_json(const ContextPredicate& c) {
    json j = json::object();
    if (c.vehicle_status) j["vehicle_status"] = to_string(*c.vehicle_status);
    if (c.health) j["health"] = to_string(*c.health);
    if (c.emergency) j["emergency"] = *c.emergency;
    if (c.alert_active) j["alert_active"] = *c.alert_active;
    if (c.location_class) j["location_class"] = to_string(*c.location_class);
    return j;
}

ContextPredicate context_from_json(const json& j) {
    ContextPredicate c;
    if (j.is_null()) return c;
    if (!j.is_object()) throw std::invalid_argument("policy context must be an object");
    for (const auto& [key, value] : j.items()) {
        if (value.is_string() && value.get<std::string>() == "any") continue;
        if (key == "vehicle_status") c.vehicle_status = parse_vehicle_status(value.get<std::string>());
        else if (key == "health") c.health = parse_health(value.get<std::string>());
        else if (key == "emergency") c.emergency = value.get<bool>();
        else if (key == "alert_active") c.alert_active = value.get<bool>();
        else if (key == "location_class") c.location_class = parse_location_class(value.get<std::string>());
        else throw std::invalid_argument("unknown context field '" + key + "'");
    }
    return c;
}

json to_json(const Policy& p) {
    json j;
    j["id"] = p.id;
    if (p.selector.principal_id) j["principal"] = *p.selector.principal_id;
    if (p.selector.profile) j["profile"] = *p.selector.profile;
    json res = json::array();
    for (const auto& r : p.resources) res.push_back(to_string(r));
    j["resource"] = res;
    j["context"] = to_json(p.context);
    j["effect"] = to_string(p.effect);
    j["priority"] = p.priority;
    j["origin"] = to_string(p.origin);
    return j;
}

Policy policy_from_json(const json& j, const obd::PrincipalId& principal) {
    Policy p;
    p.id = j.value("id", std::string{});
    if (j.contains("profile")) {
        p.selector.profile = j.at("profile").get<std::string>();
    } else {
        p.selector.principal_id = j.value("principal", principal);
    }
    const auto& res = j.at("resource");
    if (res.is_string()) {
        p.resources.push_back(parse_resource(res.get<std::string>()));
    } else {
        for (const auto& r : res) p.resources.push_back(parse_resource(r.get<std::string>()));
    }
    p.context = context_from_json(j.value("context", json::object()));
    p.effect = parse_effect(j.at("effect").get<std::string>());
    p.priority = j.value("priority", band::kUserDefault);
    p.origin = j.value("origin", std::string("user")) == "predefined" ? Origin::Predefined : Origin::User;
    return p;
}

json to_json(const privacy::PrivacyConfig& c) {
    return json{{"alg", privacy::to_string(c.alg)},
                {"W", c.window},
                {"p", c.precision},
                {"R_uniform", c.r_uniform},
                {"seed", c.seed}};
}

privacy::PrivacyConfig privacy_config_from_json(const json& j) {
    privacy::PrivacyConfig c;
    c.alg = privacy::parse_algorithm(j.at("alg").get<std::string>());
    c.window = j.value("W", std::size_t{1});
    c.precision = j.value("p", 1);
    c.r_uniform = j.value("R_uniform", 0.0);
    c.seed = j.value("seed", std::uint64_t{0});
    c.validate();
    return c;
}

PolicyDocument parse_policy_document(const json& j) {
    PolicyDocument d;
    d.principal = j.at("principal").get<std::string>();
    if (j.contains("kind")) d.kind = parse_principal_kind(j.at("kind").get<std::string>());
    if (j.contains("profile")) d.profile = j.at("profile").get<std::string>();
    if (j.contains("token")) d.token = j.at("token").get<std::string>();
    for (const auto& p : j.value("policies", json::array())) d.policies.push_back(policy_from_json(p, d.principal));
    if (j.contains("response_transform")) d.response_transform = privacy_config_from_json(j.at("response_transform"));
    return d;
}

PolicyDocument load_policy_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file " + path);
    return parse_policy_document(json::parse(in));
}

json to_json(const PolicyDocument& d) {
    json j;
    j["principal"] = d.principal;
    if (d.kind) j["kind"] = to_string(*d.kind);
    if (d.profile) j["profile"] = *d.profile;
    if (d.token) j["token"] = *d.token;
    j["policies"] = json::array();
    for (const auto& p : d.policies) j["policies"].push_back(to_json(p));
    if (d.response_transform) j["response_transform"] = to_json(*d.response_transform);
    return j;
}

}  // namespace smartcore::policy
