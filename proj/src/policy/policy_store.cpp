#include "smartcore/policy/policy_store.hpp"

#include <algorithm>

namespace smartcore::policy {

namespace {

void validate_user_policy(const Policy& p) {
    if (p.resources.empty()) throw PolicyError(PolicyError::Code::Invalid, "policy '" + p.id + "' has no resources");
    if (!p.selector.principal_id && !p.selector.profile)
        throw PolicyError(PolicyError::Code::Invalid, "policy '" + p.id + "' selects no principal");
    if (p.priority < 1 || p.priority > band::kUserMax)
        throw PolicyError(PolicyError::Code::Invalid, "user policy priority must be in [1, " +
                                                          std::to_string(band::kUserMax) + "], got " +
                                                          std::to_string(p.priority));
}

}  // namespace

PolicyStore::PolicyStore() : current_(std::make_shared<const std::vector<Policy>>()) {}

PolicyStore::Snapshot PolicyStore::snapshot() const {
    std::shared_lock lock(mu_);
    return current_;
}

std::uint64_t PolicyStore::version() const {
    std::shared_lock lock(mu_);
    return version_;
}

void PolicyStore::publish(std::vector<Policy> next) {
    current_ = std::make_shared<const std::vector<Policy>>(std::move(next));
    ++version_;
}

void PolicyStore::install_predefined(const obd::PrincipalId& principal, std::vector<Policy> policies) {
    std::unique_lock lock(mu_);
    std::vector<Policy> next;
    for (const auto& p : *current_)
        if (!(p.origin == Origin::Predefined && p.selector.principal_id == principal)) next.push_back(p);
    for (auto& p : policies) {
        p.origin = Origin::Predefined;
        next.push_back(std::move(p));
    }
    publish(std::move(next));
}

void PolicyStore::forget_principal(const obd::PrincipalId& principal) {
    std::unique_lock lock(mu_);
    std::vector<Policy> next;
    for (const auto& p : *current_)
        if (p.selector.principal_id != principal) next.push_back(p);
    publish(std::move(next));
}

std::string PolicyStore::apply(PolicyAction action, Policy policy) {
    std::unique_lock lock(mu_);
    auto next = *current_;
    auto it = std::find_if(next.begin(), next.end(), [&](const Policy& p) { return p.id == policy.id; });

    switch (action) {
        case PolicyAction::Add: {
            if (policy.id.empty()) {
                do {
                    policy.id = "user-" + std::to_string(next_user_id_++);
                } while (std::any_of(next.begin(), next.end(), [&](const Policy& p) { return p.id == policy.id; }));
            } else if (it != next.end()) {
                throw PolicyError(PolicyError::Code::Duplicate, "policy id '" + policy.id + "' already exists");
            }
            policy.origin = Origin::User;
            validate_user_policy(policy);
            next.push_back(policy);
            break;
        }
        case PolicyAction::Edit:
        case PolicyAction::Remove: {
            if (it == next.end()) throw PolicyError(PolicyError::Code::NotFound, "no policy '" + policy.id + "'");
            if (it->origin == Origin::Predefined)
                throw PolicyError(PolicyError::Code::Immutable, "policy '" + policy.id + "' is predefined");
            if (action == PolicyAction::Remove) {
                next.erase(it);
            } else {
                policy.origin = Origin::User;
                validate_user_policy(policy);
                *it = policy;
            }
            break;
        }
    }
    publish(std::move(next));
    return policy.id;
}

void PolicyStore::remove(const std::string& id) {
    Policy p;
    p.id = id;
    apply(PolicyAction::Remove, std::move(p));
}

std::vector<Policy> PolicyStore::list(std::optional<obd::PrincipalId> principal) const {
    const auto snap = snapshot();
    std::vector<Policy> out;
    for (const auto& p : *snap)
        if (!principal || p.selector.principal_id == principal) out.push_back(p);
    return out;
}

}  // namespace smartcore::policy
