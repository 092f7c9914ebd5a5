#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartcore/policy/policy.hpp"

namespace smartcore::policy {

class PolicyError : public std::runtime_error {
public:
    enum class Code { NotFound, Immutable, Invalid, Duplicate };
    PolicyError(Code c, const std::string& what) : std::runtime_error(what), code_(c) {}
    Code code() const { return code_; }

private:
    Code code_;
};

enum class PolicyAction { Add, Edit, Remove };

/// Versioned policy set. Writers are exclusive and publish a new immutable
/// snapshot; readers grab the current snapshot and evaluate against it
/// without further locking.
class PolicyStore {
public:
    using Snapshot = std::shared_ptr<const std::vector<Policy>>;

    PolicyStore();

    Snapshot snapshot() const;
    std::uint64_t version() const;

    /// Replaces the predefined baseline of one principal.
    void install_predefined(const obd::PrincipalId& principal, std::vector<Policy> policies);
    /// Drops every policy (predefined and user) selecting this principal id.
    void forget_principal(const obd::PrincipalId& principal);

    /// Add assigns an id when the policy has none. Returns the stored id.
    std::string apply(PolicyAction action, Policy policy);
    std::string add(Policy p) { return apply(PolicyAction::Add, std::move(p)); }
    void edit(Policy p) { apply(PolicyAction::Edit, std::move(p)); }
    void remove(const std::string& id);

    std::vector<Policy> list(std::optional<obd::PrincipalId> principal = std::nullopt) const;

private:
    void publish(std::vector<Policy> next);

    mutable std::shared_mutex mu_;
    Snapshot current_;
    std::uint64_t version_ = 0;
    std::uint64_t next_user_id_ = 1;
};

}  // namespace smartcore::policy
