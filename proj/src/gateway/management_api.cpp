#include "smartcore/gateway/management_api.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "smartcore/obd/catalog.hpp"
#include "smartcore/policy/policy_io.hpp"

namespace smartcore::gateway {

using nlohmann::json;

namespace {

std::string hex(const std::vector<std::uint8_t>& bytes) {
    std::string out;
    char buf[4];
    for (auto b : bytes) {
        std::snprintf(buf, sizeof buf, "%02X", b);
        out += buf;
    }
    return out;
}

json request_json(const obd::ObdRequest& r) {
    return {{"principal", r.principal_id}, {"pid", obd::to_string(r.pid)}, {"issued_at", r.issued_at.seconds()}};
}

double number_arg(const json& args, const char* key) {
    if (!args.is_object() || !args.contains(key) || !args[key].is_number())
        throw GatewayError(GatewayError::Code::InvalidArgument, std::string("missing numeric argument '") + key + "'");
    return args[key].get<double>();
}

std::string string_arg(const json& args, const char* key) {
    if (!args.is_object() || !args.contains(key) || !args[key].is_string())
        throw GatewayError(GatewayError::Code::InvalidArgument, std::string("missing string argument '") + key + "'");
    return args[key].get<std::string>();
}

store::Package package_from_args(const std::string& app_id, const json& args) {
    store::Package p;
    p.app_id = app_id;
    p.version = Version::parse(string_arg(args, "version"));
    p.manifest = store::manifest_from_json(args.value("manifest", json::object()));
    p.digest = args.value("digest", std::string{});
    return p;
}

json error_json(const std::string& code, const std::string& message) {
    return {{"ok", false}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace

json to_json(const obd::ObdResponse& r) {
    json j = {{"pid", obd::to_string(r.pid)},
              {"raw", hex(r.raw)},
              {"unit", r.value.unit},
              {"answered_at", r.answered_at.seconds()}};
    j["value"] = std::isfinite(r.value.value) ? json(r.value.value) : json(nullptr);
    return j;
}

json to_json(const ProbeRecord& r) {
    json j = {{"t", r.timestamp.seconds()},
              {"principal", r.principal},
              {"direction", to_string(r.direction)},
              {"frame", request_json(r.request)}};
    if (r.response) j["response"] = to_json(*r.response);
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

json to_json(const AppHandle& h) {
    return {{"app_id", h.app_id},
            {"version", h.version.str()},
            {"state", to_string(h.state)},
            {"capability_token", h.capability_token},
            {"privileged", h.privileged},
            {"sandbox", {{"container_id", h.sandbox.container_id}, {"resource_needs", h.sandbox.resource_needs}}}};
}

json to_json(const Outcome& o) {
    json j;
    switch (o.kind) {
        case Outcome::Kind::Queued: j["outcome"] = "queued"; break;
        case Outcome::Kind::Denied: j["outcome"] = "denied"; break;
        case Outcome::Kind::Response: j["outcome"] = "response"; break;
    }
    if (o.reason) j["reason"] = to_string(*o.reason);
    if (!o.detail.empty()) j["detail"] = o.detail;
    if (o.response) j["response"] = to_json(*o.response);
    return j;
}

void write_probe_jsonl(std::ostream& out, const std::vector<ProbeRecord>& records) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
}

Caller caller_from_json(const json& j) {
    if (j.is_null()) return Caller::owner();
    if (!j.is_object()) throw GatewayError(GatewayError::Code::InvalidArgument, "caller must be an object");
    if (j.value("kind", std::string{}) == "owner" && !j.contains("app")) return Caller::owner();
    Caller c;
    c.kind = Caller::Kind::App;
    c.app_id = j.value("app", std::string{});
    c.token = j.value("token", std::string{});
    if (c.app_id.empty()) throw GatewayError(GatewayError::Code::InvalidArgument, "caller needs 'app' or kind 'owner'");
    return c;
}

json ManagementApi::handle(const json& command) {
    try {
        if (!command.is_object()) return error_json("invalid_argument", "command must be a JSON object");
        std::string op = command.value("op", std::string{});
        if (op.empty()) return error_json("invalid_argument", "command has no 'op'");
        return {{"ok", true}, {"data", dispatch(op, command)}};
    } catch (const GatewayError& e) {
        return error_json(to_string(e.code()), e.what());
    } catch (const policy::PolicyError& e) {
        return error_json("policy", e.what());
    } catch (const json::exception& e) {
        return error_json("invalid_argument", e.what());
    } catch (const std::exception& e) {
        return error_json("invalid_argument", e.what());
    }
}

json ManagementApi::dispatch(const std::string& op, const json& cmd) {
    const std::string principal = cmd.value("principal", std::string{});
    const json args = cmd.value("args", json::object());
    const Caller caller = caller_from_json(cmd.value("caller", json()));

    auto need_principal = [&] {
        if (principal.empty()) throw GatewayError(GatewayError::Code::InvalidArgument, "op '" + op + "' needs a principal");
        return principal;
    };

    if (op == "attach") {
        policy::Principal p;
        p.id = need_principal();
        p.kind = policy::parse_principal_kind(args.value("kind", std::string("dongle")));
        p.profile = args.value("profile", std::string{});
        p.token = args.value("token", std::string{});
        gw_.attach(p);
        return {{"principal", p.id}, {"policies", gw_.policies().list(p.id).size()}};
    }
    if (op == "detach") {
        gw_.detach(need_principal());
        return nullptr;
    }
    if (op == "submit") {
        obd::ObdRequest r{need_principal(), obd::parse_pid(string_arg(args, "pid")),
                          SimTime::from_seconds(args.value("t", gw_.now().seconds()))};
        return to_json(gw_.submit(r));
    }
    if (op == "run_until") {
        gw_.run_until(SimTime::from_seconds(number_arg(args, "t")));
        return {{"now", gw_.now().seconds()}};
    }
    if (op == "block") {
        gw_.block_port(caller, need_principal());
        return nullptr;
    }
    if (op == "unblock") {
        gw_.unblock(caller, need_principal());
        return nullptr;
    }
    if (op == "set_rate") {
        gw_.set_rate(caller, need_principal(), number_arg(args, "rate"));
        return nullptr;
    }
    if (op == "probe") {
        json out = json::array();
        for (const auto& r : gw_.probe(caller, need_principal(), SimTime::from_seconds(args.value("since", 0.0))))
            out.push_back(to_json(r));
        return out;
    }
    if (op == "send_raw") {
        obd::ObdRequest r{{}, obd::parse_pid(string_arg(args, "pid")),
                          SimTime::from_seconds(args.value("t", gw_.now().seconds()))};
        return to_json(gw_.send_raw(caller, r));
    }
    if (op == "set_transform") {
        std::optional<privacy::PrivacyConfig> cfg;
        if (cmd.contains("args") && !cmd["args"].is_null()) cfg = policy::privacy_config_from_json(args);
        gw_.set_response_transform(caller, need_principal(), cfg);
        return nullptr;
    }
    if (op == "policy_add") {
        if (!args.contains("policy")) throw GatewayError(GatewayError::Code::InvalidArgument, "missing 'policy'");
        return {{"id", gw_.policies().add(policy::policy_from_json(args["policy"], principal))}};
    }
    if (op == "policy_edit") {
        if (!args.contains("policy")) throw GatewayError(GatewayError::Code::InvalidArgument, "missing 'policy'");
        gw_.policies().edit(policy::policy_from_json(args["policy"], principal));
        return nullptr;
    }
    if (op == "policy_rm") {
        gw_.policies().remove(string_arg(args, "id"));
        return nullptr;
    }
    if (op == "policy_list") {
        json out = json::array();
        std::optional<obd::PrincipalId> who;
        if (!principal.empty()) who = principal;
        for (const auto& p : gw_.policies().list(who)) out.push_back(policy::to_json(p));
        return out;
    }
    if (op == "app_install") return to_json(gw_.install(package_from_args(need_principal(), args)));
    if (op == "app_start") return to_json(gw_.app_lifecycle(AppAction::Start, need_principal()));
    if (op == "app_pause") return to_json(gw_.app_lifecycle(AppAction::Pause, need_principal()));
    if (op == "app_halt") return to_json(gw_.app_lifecycle(AppAction::Halt, need_principal()));
    if (op == "app_remove") return to_json(gw_.app_lifecycle(AppAction::Remove, need_principal()));
    if (op == "self_update") {
        std::string target = need_principal();
        return to_json(gw_.self_update(caller, target, package_from_args(target, args)));
    }
    if (op == "stats") {
        const auto& s = gw_.session(need_principal()).stats();
        return {{"submitted", s.submitted},
                {"denied", s.denied},
                {"forwarded", s.forwarded},
                {"delivered", s.delivered},
                {"overflow_drops", s.overflow_drops}};
    }
    throw GatewayError(GatewayError::Code::InvalidArgument, "unknown op '" + op + "'");
}

}  // namespace smartcore::gateway
