#include "smartcore/policy/policy.hpp"

#include <algorithm>
#include <stdexcept>

namespace smartcore::policy {

std::string to_string(PrincipalKind k) { return k == PrincipalKind::Dongle ? "dongle" : "application"; }

PrincipalKind parse_principal_kind(const std::string& s) {
    if (s == "dongle") return PrincipalKind::Dongle;
    if (s == "application") return PrincipalKind::Application;
    throw std::invalid_argument("bad principal kind '" + s + "'");
}

std::string to_string(Effect e) { return e == Effect::Allow ? "allow" : "deny"; }

Effect parse_effect(const std::string& s) {
    if (s == "allow") return Effect::Allow;
    if (s == "deny") return Effect::Deny;
    throw std::invalid_argument("bad effect '" + s + "'");
}

std::string to_string(Origin o) { return o == Origin::Predefined ? "predefined" : "user"; }

namespace {
const std::vector<std::pair<std::string, std::uint8_t>> kOperationModes = {
    {"read_dtc", obd::service::kReadDtc},
    {"clear_dtc", obd::service::kClearDtc},
    {"control", obd::service::kControl},
    {"vehicle_info", obd::service::kVehicleInfo},
};
}  // namespace

bool Resource::matches(obd::Pid pid) const {
    switch (kind) {
        case Kind::Any:
            return true;
        case Kind::Pid:
            return pid.mode == obd::service::kLiveData && pid.code == code;
        case Kind::Operation:
            if (op == "live_data") return pid.mode == obd::service::kLiveData;
            if (op == "write") return obd::is_write(pid);
            for (const auto& [name, mode] : kOperationModes)
                if (name == op) return pid.mode == mode;
            return false;
    }
    return false;
}

std::string to_string(const Resource& r) {
    switch (r.kind) {
        case Resource::Kind::Any: return "*";
        case Resource::Kind::Pid: return obd::to_string(obd::live(r.code));
        case Resource::Kind::Operation: return r.op;
    }
    return "*";
}

Resource parse_resource(const std::string& s) {
    if (s == "*") return Resource::any();
    if (s == "live_data" || s == "write") return Resource::operation(s);
    for (const auto& [name, mode] : kOperationModes)
        if (name == s) return Resource::operation(s);
    const auto pid = obd::parse_pid(s);
    if (pid.mode != obd::service::kLiveData) throw std::invalid_argument("resource PIDs must be live-data codes: " + s);
    return Resource::pid(pid.code);
}

bool ContextPredicate::matches(const ContextSnapshot& ctx) const {
    return (!vehicle_status || *vehicle_status == ctx.vehicle_status) && (!health || *health == ctx.health) &&
           (!emergency || *emergency == ctx.emergency) && (!alert_active || *alert_active == ctx.alert_active) &&
           (!location_class || *location_class == ctx.location_class);
}

bool PrincipalSelector::matches(const Principal& p) const {
    if (principal_id && *principal_id == p.id) return true;
    if (profile && *profile == p.profile) return true;
    return false;
}

bool Policy::applies_to(const Principal& p, obd::Pid pid, const ContextSnapshot& ctx) const {
    if (!selector.matches(p) || !context.matches(ctx)) return false;
    return std::any_of(resources.begin(), resources.end(), [&](const Resource& r) { return r.matches(pid); });
}

std::vector<Policy> derive_predefined_policies(const vehicle::VehicleProfile& vehicle, const Principal& principal) {
    std::vector<Policy> out;
    auto make = [&](std::vector<Resource> res, Effect effect, int priority) {
        Policy p;
        p.id = principal.id + "/predefined/" + std::to_string(out.size());
        p.selector.principal_id = principal.id;
        p.resources = std::move(res);
        p.effect = effect;
        p.priority = priority;
        p.origin = Origin::Predefined;
        return p;
    };

    out.push_back(make({Resource::any()}, Effect::Deny, band::kDefaultDeny));

    if (principal.profile == profile::kInsurance) {
        out.push_back(make({Resource::pid(obd::kSpeedPid), Resource::pid(obd::kOdometerPid)}, Effect::Allow,
                           band::kBaseline));
    } else if (principal.profile == profile::kProtection) {
        out.push_back(make({Resource::operation("live_data")}, Effect::Allow, band::kBaseline));
    }
    // Diagnostic dongles start closed; the owner opens them with
    // context-aware user policies (e.g. only while a fault is present).

    if (principal.kind == PrincipalKind::Dongle && vehicle.has_quirk(vehicle::kQuirkDenyAllWhileMoving)) {
        auto p = make({Resource::any()}, Effect::Deny, band::kSafety);
        p.context.vehicle_status = VehicleStatus::Moving;
        out.push_back(std::move(p));
    }
    return out;
}

Decision evaluate(const obd::ObdRequest& request, const Principal& principal, const ContextSnapshot& context,
                  const std::vector<Policy>& policies) {
    const Policy* top_allow = nullptr;
    const Policy* top_deny = nullptr;
    int top = 0;
    bool any = false;
    for (const auto& p : policies) {
        if (!p.applies_to(principal, request.pid, context)) continue;
        if (!any || p.priority > top) {
            any = true;
            top = p.priority;
            top_allow = top_deny = nullptr;
        }
        if (p.priority < top) continue;
        if (p.effect == Effect::Deny && !top_deny) top_deny = &p;
        if (p.effect == Effect::Allow && !top_allow) top_allow = &p;
    }
    if (!any) return Decision{Effect::Deny, "no matching policy (default deny)", std::nullopt};
    if (top_deny) return Decision{Effect::Deny, "denied by policy " + top_deny->id, top_deny->id};
    return Decision{Effect::Allow, "allowed by policy " + top_allow->id, top_allow->id};
}

}  // namespace smartcore::policy
