#include "smartcore/gateway/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "smartcore/obd/codec.hpp"

namespace smartcore::gateway {

using Code = GatewayError::Code;

std::string to_string(GatewayError::Code c) {
    switch (c) {
        case Code::Duplicate: return "duplicate";
        case Code::NotFound: return "not_found";
        case Code::Unauthorized: return "unauthorized";
        case Code::InvalidArgument: return "invalid_argument";
        case Code::IllegalTransition: return "illegal_transition";
        case Code::CrossAppUpdate: return "cross_app_update";
        case Code::VersionRegression: return "version_regression";
        case Code::ClockRegression: return "clock_regression";
    }
    return "unknown";
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::ToVehicle: return "to_vehicle";
        case Direction::FromVehicle: return "from_vehicle";
        case Direction::Denied: return "denied";
    }
    return "unknown";
}

std::string to_string(DenyReason r) {
    switch (r) {
        case DenyReason::Blocked: return "blocked";
        case DenyReason::Policy: return "policy";
        case DenyReason::QueueOverflow: return "queue_overflow";
        case DenyReason::Inactive: return "inactive";
    }
    return "unknown";
}

std::string to_string(AppState s) {
    switch (s) {
        case AppState::Installed: return "installed";
        case AppState::Running: return "running";
        case AppState::Paused: return "paused";
        case AppState::Halted: return "halted";
    }
    return "unknown";
}

AppAction parse_app_action(const std::string& s) {
    if (s == "install") return AppAction::Install;
    if (s == "start") return AppAction::Start;
    if (s == "pause") return AppAction::Pause;
    if (s == "halt") return AppAction::Halt;
    if (s == "remove") return AppAction::Remove;
    throw GatewayError(Code::InvalidArgument, "unknown app action '" + s + "'");
}

Gateway::Gateway(vehicle::VirtualVehicle& vehicle, GatewayConfig config)
    : vehicle_(vehicle), config_(std::move(config)) {
    if (config_.service_time <= SimTime::zero())
        throw GatewayError(Code::InvalidArgument, "service time must be positive");
    if (config_.overhead < SimTime::zero())
        throw GatewayError(Code::InvalidArgument, "gateway overhead must be non-negative");
    if (config_.queue_capacity == 0)
        throw GatewayError(Code::InvalidArgument, "queue capacity must be at least 1");
}

// ---------------------------------------------------------------- sessions

const Session& Gateway::attach(const policy::Principal& principal) {
    if (principal.id.empty()) throw GatewayError(Code::InvalidArgument, "principal id must not be empty");
    if (sessions_.count(principal.id))
        throw GatewayError(Code::Duplicate, "principal '" + principal.id + "' is already attached");
    Session& s = sessions_[principal.id];
    s.principal_ = principal;
    policies_.install_predefined(principal.id, policy::derive_predefined_policies(vehicle_.profile(), principal));
    return s;
}

void Gateway::detach(const obd::PrincipalId& id) {
    Session& s = session_mut(id);
    deny_queued(s, DenyReason::Inactive);
    policies_.forget_principal(id);
    sessions_.erase(id);
}

const Session& Gateway::session(const obd::PrincipalId& id) const {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw GatewayError(Code::NotFound, "no session for principal '" + id + "'");
    return it->second;
}

Session& Gateway::session_mut(const obd::PrincipalId& id) {
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw GatewayError(Code::NotFound, "no session for principal '" + id + "'");
    return it->second;
}

std::vector<obd::PrincipalId> Gateway::principals() const {
    std::vector<obd::PrincipalId> ids;
    for (const auto& [id, _] : sessions_) ids.push_back(id);
    return ids;
}

policy::ContextSnapshot Gateway::context_at(SimTime t) const {
    const auto& trace = vehicle_.trace();
    double ts = std::clamp(t.seconds(), trace.start(), trace.end());
    return policy::recognize_context(trace, vehicle_.signals(), std::nullopt, config_.locations, ts,
                                     config_.recognition);
}

Outcome Gateway::submit(const obd::ObdRequest& request) {
    if (request.issued_at < now_)
        throw GatewayError(Code::ClockRegression, "request issued at " + std::to_string(request.issued_at.seconds()) +
                                                      " s is before the gateway clock " +
                                                      std::to_string(now_.seconds()) + " s");
    Session& s = session_mut(request.principal_id);
    advance(request.issued_at, false);
    now_ = request.issued_at;
    ++s.stats_.submitted;

    if (s.principal_.kind == policy::PrincipalKind::Application) {
        auto it = apps_.find(s.principal_.id);
        if (it == apps_.end() || it->second.state != AppState::Running)
            return deny(s, request, DenyReason::Inactive, "application is not running");
    }
    if (s.blocked_) return deny(s, request, DenyReason::Blocked, "port blocked");

    auto snapshot = policies_.snapshot();
    policy::Decision d = policy::evaluate(request, s.principal_, context_at(now_), *snapshot);
    if (!d.allowed()) return deny(s, request, DenyReason::Policy, d.reason);

    if (s.outstanding() >= config_.queue_capacity) {
        ++s.stats_.overflow_drops;
        return deny(s, request, DenyReason::QueueOverflow, "session queue full");
    }
    s.queue_.push_back({request, ++frame_seq_});
    pump(s);
    return {};
}

Outcome Gateway::call(const obd::ObdRequest& request) {
    Outcome out = submit(request);
    if (out.denied()) return out;
    const Session& s = session(request.principal_id);
    // The frame just admitted is the newest sequence number of this session,
    // either still queued or already on the bus.
    std::uint64_t seq = s.queue_.empty() ? frame_seq_ : s.queue_.back().seq;
    out.kind = Outcome::Kind::Response;
    out.response = wait_for(seq);
    return out;
}

obd::ObdResponse Gateway::wait_for(std::uint64_t seq) {
    awaited_[seq] = std::nullopt;
    for (;;) {
        auto it = awaited_.find(seq);
        if (it == awaited_.end())
            throw GatewayError(Code::InvalidArgument, "request was dropped before reaching the vehicle");
        if (it->second) {
            obd::ObdResponse r = *it->second;
            awaited_.erase(it);
            return r;
        }
        if (!step()) {
            awaited_.erase(seq);
            throw GatewayError(Code::InvalidArgument, "request never reached the vehicle");
        }
    }
}

Outcome Gateway::deny(Session& s, const obd::ObdRequest& req, DenyReason reason, std::string detail) {
    ++s.stats_.denied;
    ProbeRecord r;
    r.timestamp = now_;
    r.principal = s.principal_.id;
    r.direction = Direction::Denied;
    r.request = req;
    r.note = to_string(reason) + (detail.empty() ? "" : ": " + detail);
    record(r);
    Outcome o;
    o.kind = Outcome::Kind::Denied;
    o.reason = reason;
    o.detail = std::move(detail);
    return o;
}

void Gateway::deny_queued(Session& s, DenyReason reason) {
    std::vector<std::pair<std::uint64_t, obd::ObdRequest>> dropped;
    for (auto& p : s.queue_) dropped.emplace_back(p.seq, p.request);
    s.queue_.clear();
    auto keep = std::stable_partition(bus_pending_.begin(), bus_pending_.end(), [&](const Frame& f) {
        return f.raw || f.request.principal_id != s.principal_.id;
    });
    for (auto it = keep; it != bus_pending_.end(); ++it) dropped.emplace_back(it->seq, it->request);
    bus_pending_.erase(keep, bus_pending_.end());
    s.on_bus_ = 0;
    s.release_pending_ = false;
    ++s.release_generation_;

    std::sort(dropped.begin(), dropped.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [seq, req] : dropped) {
        deny(s, req, reason, "flushed");
        awaited_.erase(seq);
    }
}

// ---------------------------------------------------------------- event loop

void Gateway::schedule(SimTime at, Phase phase, obd::PrincipalId principal, std::uint64_t generation) {
    events_.push(Event{at, phase, ++seq_, std::move(principal), generation});
}

void Gateway::schedule_dispatch() {
    if (dispatch_pending_ || in_service_ || bus_pending_.empty()) return;
    dispatch_pending_ = true;
    schedule(now_, Phase::Dispatch);
}

void Gateway::release_head(Session& s) {
    auto p = std::move(s.queue_.front());
    s.queue_.pop_front();
    bus_pending_.push_back(Frame{std::move(p.request), p.seq, false, s.limiter_.has_value()});
    ++s.on_bus_;
    schedule_dispatch();
}

// A limited session keeps at most one frame ahead of the vehicle, and the
// limiter spacing is measured between frames actually put on the wire, so
// bus contention cannot bunch releases together.
void Gateway::pump(Session& s) {
    while (!s.queue_.empty()) {
        if (!s.limiter_) {
            release_head(s);
            continue;
        }
        if (s.on_bus_ > 0 || s.release_pending_) return;
        SimTime at = std::max(now_, s.limiter_->next_release(s.queue_.front().request.issued_at));
        if (at <= now_) {
            release_head(s);
            return;
        }
        s.release_pending_ = true;
        schedule(at, Phase::Release, s.principal_.id, ++s.release_generation_);
        return;
    }
}

void Gateway::on_dispatch() {
    dispatch_pending_ = false;
    if (in_service_ || bus_pending_.empty()) return;
    std::vector<obd::ObdRequest> reqs;
    reqs.reserve(bus_pending_.size());
    for (const auto& f : bus_pending_) reqs.push_back(f.request);
    std::size_t idx = vehicle::bus_arbitrate(reqs);
    Frame f = std::move(bus_pending_[idx]);
    bus_pending_.erase(bus_pending_.begin() + static_cast<std::ptrdiff_t>(idx));

    ProbeRecord r;
    r.timestamp = now_;
    r.principal = f.request.principal_id;
    r.direction = Direction::ToVehicle;
    r.request = f.request;
    if (f.raw) r.note = "raw";
    record(r);

    ++services_;
    in_service_response_ = vehicle_.serve(f.request, now_.seconds());

    if (!f.raw) {
        auto it = sessions_.find(f.request.principal_id);
        if (it != sessions_.end()) {
            Session& s = it->second;
            ++s.stats_.forwarded;
            if (s.on_bus_ > 0) --s.on_bus_;
            if (s.limiter_) {
                s.limiter_->record_release(now_, f.request.issued_at);
                pump(s);
            }
        }
    }
    in_service_ = std::move(f);
    schedule(now_ + config_.service_time, Phase::Completion);
}

void Gateway::on_completion() {
    Frame f = std::move(*in_service_);
    in_service_.reset();
    obd::ObdResponse resp = std::move(*in_service_response_);
    in_service_response_.reset();
    resp.answered_at = now_;

    ProbeRecord r;
    r.timestamp = now_;
    r.principal = f.request.principal_id;
    r.direction = Direction::FromVehicle;
    r.request = f.request;
    r.response = resp;
    if (f.raw) r.note = "raw";
    record(r);

    if (auto it = awaited_.find(f.seq); it != awaited_.end()) it->second = resp;
    if (!f.raw) {
        auto sit = sessions_.find(f.request.principal_id);
        if (sit != sessions_.end()) deliver(sit->second, f.request, resp);
    }
    schedule_dispatch();
}

void Gateway::deliver(Session& s, const obd::ObdRequest& req, const obd::ObdResponse& resp) {
    Delivery d{req, resp, now_ + config_.overhead};
    bool transformable = s.transform_ && resp.pid == obd::live(obd::kSpeedPid) && std::isfinite(resp.value.value);
    if (!transformable) {
        s.inbox_.push_back(std::move(d));
        ++s.stats_.delivered;
        return;
    }
    s.held_.push_back(std::move(d));
    auto outs = privacy::transform_push(*s.transform_state_, *s.transform_, resp.value.value);
    for (double v : outs) {
        Delivery h = std::move(s.held_.front());
        s.held_.pop_front();
        h.response.value.value = v;
        h.response.raw = obd::encode_clamped(vehicle_.catalog(), h.response.pid, v);
        h.delivered_at = now_ + config_.overhead;
        s.inbox_.push_back(std::move(h));
        ++s.stats_.delivered;
    }
}

void Gateway::process(const Event& e) {
    switch (e.phase) {
        case Phase::Completion: on_completion(); break;
        case Phase::Release: {
            auto it = sessions_.find(e.principal);
            if (it == sessions_.end()) break;
            Session& s = it->second;
            if (!s.release_pending_ || s.release_generation_ != e.generation) break;
            s.release_pending_ = false;
            pump(s);
            break;
        }
        case Phase::Dispatch: on_dispatch(); break;
    }
}

bool Gateway::step() {
    if (events_.empty()) return false;
    Event e = events_.top();
    events_.pop();
    now_ = std::max(now_, e.at);
    process(e);
    return true;
}

void Gateway::advance(SimTime t, bool inclusive) {
    while (!events_.empty()) {
        const Event& top = events_.top();
        if (inclusive ? top.at > t : top.at >= t) break;
        step();
    }
}

void Gateway::run_until(SimTime t) {
    if (t < now_) throw GatewayError(Code::ClockRegression, "cannot run the clock backwards");
    advance(t, true);
    now_ = t;
}

SimTime Gateway::run_until_idle() {
    while (step()) {
    }
    return now_;
}

std::vector<Delivery> Gateway::take_deliveries(const obd::PrincipalId& id) {
    Session& s = session_mut(id);
    std::vector<Delivery> out;
    out.swap(s.inbox_);
    return out;
}

void Gateway::record(const ProbeRecord& r) {
    probe_log_.push_back(r);
    auto it = sessions_.find(r.principal);
    if (it == sessions_.end()) return;
    for (auto& cb : it->second.probe_subscribers_) cb(r);
}

// ---------------------------------------------------------------- port management

void Gateway::require_privileged(const Caller& caller) const {
    if (caller.kind == Caller::Kind::Owner) return;
    auto it = apps_.find(caller.app_id);
    if (it == apps_.end() || it->second.capability_token != caller.token)
        throw GatewayError(Code::Unauthorized, "caller '" + caller.app_id + "' presented no valid capability");
    if (!it->second.privileged)
        throw GatewayError(Code::Unauthorized, "application '" + caller.app_id + "' is not privileged");
    if (it->second.state != AppState::Running)
        throw GatewayError(Code::Unauthorized, "application '" + caller.app_id + "' is not running");
}

void Gateway::block_port(const Caller& caller, const obd::PrincipalId& id) {
    require_privileged(caller);
    Session& s = session_mut(id);
    s.blocked_ = true;
    deny_queued(s, DenyReason::Blocked);
}

void Gateway::unblock(const Caller& caller, const obd::PrincipalId& id) {
    require_privileged(caller);
    session_mut(id).blocked_ = false;
}

void Gateway::set_rate(const Caller& caller, const obd::PrincipalId& id, double rate) {
    require_privileged(caller);
    Session& s = session_mut(id);
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw GatewayError(Code::InvalidArgument, "rate must be positive, got " + std::to_string(rate));
    if (s.limiter_)
        s.limiter_->set_rate(rate);
    else
        s.limiter_.emplace(rate);
    // Re-time a pending release under the new spacing.
    s.release_pending_ = false;
    ++s.release_generation_;
    pump(s);
}

std::vector<ProbeRecord> Gateway::probe(const Caller& caller, const obd::PrincipalId& id, SimTime since) const {
    require_privileged(caller);
    bool known = sessions_.count(id) > 0;
    std::vector<ProbeRecord> out;
    for (const auto& r : probe_log_) {
        if (r.principal != id) continue;
        known = true;
        if (r.timestamp >= since) out.push_back(r);
    }
    if (!known) throw GatewayError(Code::NotFound, "no session or records for principal '" + id + "'");
    return out;
}

void Gateway::subscribe_probe(const Caller& caller, const obd::PrincipalId& id,
                              std::function<void(const ProbeRecord&)> callback) {
    require_privileged(caller);
    session_mut(id).probe_subscribers_.push_back(std::move(callback));
}

obd::ObdResponse Gateway::send_raw(const Caller& caller, obd::ObdRequest request) {
    require_privileged(caller);
    request.principal_id = caller.kind == Caller::Kind::Owner ? "owner" : caller.app_id;
    if (request.issued_at < now_) request.issued_at = now_;
    advance(request.issued_at, false);
    now_ = request.issued_at;
    std::uint64_t seq = ++frame_seq_;
    bus_pending_.push_back(Frame{request, seq, true, false});
    schedule_dispatch();
    return wait_for(seq);
}

// ---------------------------------------------------------------- transforms

void Gateway::set_response_transform(const Caller& caller, const obd::PrincipalId& id,
                                     std::optional<privacy::PrivacyConfig> config) {
    require_privileged(caller);
    Session& s = session_mut(id);
    if (s.transform_) flush_transform(id);
    if (config) {
        config->validate();
        s.transform_state_.emplace(config->seed);
    } else {
        s.transform_state_.reset();
    }
    s.transform_ = std::move(config);
}

void Gateway::flush_transform(const obd::PrincipalId& id) {
    Session& s = session_mut(id);
    if (!s.transform_) return;
    auto outs = privacy::flush(*s.transform_state_, *s.transform_);
    for (double v : outs) {
        if (s.held_.empty()) break;
        Delivery h = std::move(s.held_.front());
        s.held_.pop_front();
        h.response.value.value = v;
        h.response.raw = obd::encode_clamped(vehicle_.catalog(), h.response.pid, v);
        h.delivered_at = now_ + config_.overhead;
        s.inbox_.push_back(std::move(h));
        ++s.stats_.delivered;
    }
}

// ---------------------------------------------------------------- applications

namespace {
std::string make_token(const std::string& app_id, std::uint64_t counter, const std::string& digest) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%06llu", static_cast<unsigned long long>(counter));
    return "cap-" + app_id + "-" + buf + "-" + digest.substr(0, std::min<std::size_t>(12, digest.size()));
}
}  // namespace

AppHandle Gateway::install(const store::Package& package) {
    if (package.app_id.empty()) throw GatewayError(Code::InvalidArgument, "package has no app id");
    auto it = apps_.find(package.app_id);
    if (it != apps_.end() && it->second.state != AppState::Halted)
        throw GatewayError(Code::Duplicate, "application '" + package.app_id + "' is already installed (" +
                                                to_string(it->second.state) + ")");
    if (sessions_.count(package.app_id) && it == apps_.end())
        throw GatewayError(Code::Duplicate, "principal id '" + package.app_id + "' is taken by a dongle");

    AppHandle h;
    h.app_id = package.app_id;
    h.version = package.version;
    h.state = AppState::Installed;
    h.capability_token = make_token(package.app_id, ++app_counter_, package.digest);
    h.sandbox = {"sandbox-" + package.app_id + "-" + std::to_string(app_counter_), package.manifest.resource_needs};
    h.privileged = package.manifest.privileged;
    apps_[h.app_id] = h;

    if (sessions_.count(h.app_id)) detach(h.app_id);
    attach(policy::Principal{h.app_id, policy::PrincipalKind::Application, h.capability_token,
                             package.manifest.profile});
    return h;
}

AppHandle Gateway::app_lifecycle(AppAction action, const std::string& app_id) {
    if (action == AppAction::Install)
        throw GatewayError(Code::InvalidArgument, "install requires a package");
    auto it = apps_.find(app_id);
    if (it == apps_.end()) throw GatewayError(Code::NotFound, "no application '" + app_id + "'");
    AppHandle& h = it->second;
    auto illegal = [&](const char* verb) {
        return GatewayError(Code::IllegalTransition,
                            std::string("cannot ") + verb + " application '" + app_id + "' in state " +
                                to_string(h.state));
    };
    switch (action) {
        case AppAction::Install: break;
        case AppAction::Start:
            if (h.state != AppState::Installed && h.state != AppState::Paused) throw illegal("start");
            h.state = AppState::Running;
            break;
        case AppAction::Pause:
            if (h.state != AppState::Running) throw illegal("pause");
            h.state = AppState::Paused;
            if (sessions_.count(app_id)) deny_queued(sessions_.at(app_id), DenyReason::Inactive);
            break;
        case AppAction::Halt:
            if (h.state != AppState::Running && h.state != AppState::Paused) throw illegal("halt");
            h.state = AppState::Halted;
            if (sessions_.count(app_id)) detach(app_id);
            break;
        case AppAction::Remove: {
            if (h.state == AppState::Running) throw illegal("remove");
            AppHandle out = h;
            if (sessions_.count(app_id)) detach(app_id);
            apps_.erase(it);
            return out;
        }
    }
    return h;
}

AppHandle Gateway::self_update(const Caller& caller, const std::string& target_app_id,
                               const store::Package& package) {
    if (caller.kind != Caller::Kind::App)
        throw GatewayError(Code::Unauthorized, "self-update must be initiated by the application itself");
    auto self = apps_.find(caller.app_id);
    if (self == apps_.end() || self->second.capability_token != caller.token)
        throw GatewayError(Code::Unauthorized, "caller '" + caller.app_id + "' presented no valid capability");
    if (target_app_id != caller.app_id || package.app_id != caller.app_id)
        throw GatewayError(Code::CrossAppUpdate, "application '" + caller.app_id + "' may not update '" +
                                                     (target_app_id != caller.app_id ? target_app_id
                                                                                     : package.app_id) +
                                                     "'");
    AppHandle& h = self->second;
    if (h.state == AppState::Halted)
        throw GatewayError(Code::IllegalTransition, "halted application cannot update itself");
    if (!(package.version > h.version))
        throw GatewayError(Code::VersionRegression,
                           "new version " + package.version.str() + " is not newer than " + h.version.str());

    h.version = package.version;
    h.state = AppState::Installed;
    // An update can shed the privileged flag but never acquire it.
    h.privileged = h.privileged && package.manifest.privileged;
    h.sandbox.resource_needs = package.manifest.resource_needs;

    if (sessions_.count(h.app_id)) {
        Session& s = sessions_.at(h.app_id);
        deny_queued(s, DenyReason::Inactive);
        s.principal_.profile = package.manifest.profile;
        policies_.install_predefined(h.app_id,
                                     policy::derive_predefined_policies(vehicle_.profile(), s.principal_));
    }
    return h;
}

const AppHandle& Gateway::app(const std::string& app_id) const {
    auto it = apps_.find(app_id);
    if (it == apps_.end()) throw GatewayError(Code::NotFound, "no application '" + app_id + "'");
    return it->second;
}

}  // namespace smartcore::gateway
