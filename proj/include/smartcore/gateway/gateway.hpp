#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "smartcore/gateway/rate_limiter.hpp"
#include "smartcore/obd/pid.hpp"
#include "smartcore/policy/context.hpp"
#include "smartcore/policy/policy.hpp"
#include "smartcore/policy/policy_store.hpp"
#include "smartcore/privacy/transform.hpp"
#include "smartcore/sim_time.hpp"
#include "smartcore/store/package.hpp"
#include "smartcore/vehicle/vehicle.hpp"
#include "smartcore/version.hpp"

namespace smartcore::gateway {

class GatewayError : public std::runtime_error {
public:
    enum class Code {
        Duplicate,
        NotFound,
        Unauthorized,
        InvalidArgument,
        IllegalTransition,
        CrossAppUpdate,
        VersionRegression,
        ClockRegression,
    };
    GatewayError(Code c, const std::string& what) : std::runtime_error(what), code_(c) {}
    Code code() const { return code_; }

private:
    Code code_;
};

std::string to_string(GatewayError::Code c);

enum class Direction { ToVehicle, FromVehicle, Denied };
std::string to_string(Direction d);

enum class DenyReason { Blocked, Policy, QueueOverflow, Inactive };
std::string to_string(DenyReason r);

struct ProbeRecord {
    SimTime timestamp;
    obd::PrincipalId principal;
    Direction direction = Direction::ToVehicle;
    obd::ObdRequest request;
    std::optional<obd::ObdResponse> response;  // from_vehicle only
    std::string note;                           // denial reason / "raw"
};

struct Outcome {
    enum class Kind { Queued, Denied, Response };
    Kind kind = Kind::Queued;
    std::optional<DenyReason> reason;
    std::string detail;
    std::optional<obd::ObdResponse> response;

    bool denied() const { return kind == Kind::Denied; }
};

/// A response handed back to a principal, possibly rewritten by its
/// privacy transform.
struct Delivery {
    obd::ObdRequest request;
    obd::ObdResponse response;
    SimTime delivered_at;
};

struct SessionStats {
    std::uint64_t submitted = 0;
    std::uint64_t denied = 0;
    std::uint64_t forwarded = 0;  // frames put on the wire
    std::uint64_t delivered = 0;
    std::uint64_t overflow_drops = 0;
};

enum class AppState { Installed, Running, Paused, Halted };
std::string to_string(AppState s);

struct SandboxDescriptor {
    std::string container_id;
    std::vector<std::string> resource_needs;
};

struct AppHandle {
    std::string app_id;
    Version version;
    AppState state = AppState::Installed;
    std::string capability_token;
    SandboxDescriptor sandbox;
    bool privileged = false;
};

enum class AppAction { Install, Start, Pause, Halt, Remove };
AppAction parse_app_action(const std::string& s);

/// Who is invoking a management operation: the vehicle owner's trusted
/// console, or a hosted application presenting its capability token.
struct Caller {
    enum class Kind { Owner, App };
    Kind kind = Kind::Owner;
    std::string app_id;
    std::string token;

    static Caller owner() { return {}; }
    static Caller app(const AppHandle& h) { return {Kind::App, h.app_id, h.capability_token}; }
};

struct GatewayConfig {
    SimTime service_time = SimTime::from_ns(10'000'000);  // one frame on the bus
    SimTime overhead = SimTime::zero();                   // gateway processing per delivery
    std::size_t queue_capacity = 1024;
    policy::RecognitionOptions recognition;
    policy::LocationRegistry locations;
};

class Session {
public:
    const policy::Principal& principal() const { return principal_; }
    bool blocked() const { return blocked_; }
    std::size_t queue_depth() const { return queue_.size(); }
    /// Admitted frames that have not reached the vehicle yet.
    std::size_t outstanding() const { return queue_.size() + on_bus_; }
    const std::optional<RateLimiterState>& limiter() const { return limiter_; }
    const SessionStats& stats() const { return stats_; }
    const std::optional<privacy::PrivacyConfig>& transform() const { return transform_; }

private:
    friend class Gateway;

    struct Pending {
        obd::ObdRequest request;
        std::uint64_t seq = 0;
    };

    policy::Principal principal_;
    std::deque<Pending> queue_;  // admitted, not yet released to the bus
    std::optional<RateLimiterState> limiter_;
    bool blocked_ = false;
    std::size_t on_bus_ = 0;  // released frames waiting for arbitration
    std::uint64_t release_generation_ = 0;
    bool release_pending_ = false;
    std::vector<std::function<void(const ProbeRecord&)>> probe_subscribers_;
    SessionStats stats_;

    std::optional<privacy::PrivacyConfig> transform_;
    std::optional<privacy::TransformState> transform_state_;
    std::deque<Delivery> held_;  // speed responses waiting for their window
    std::vector<Delivery> inbox_;
};

/// The port guardian. Every principal talks to the vehicle through a
/// session: blocked check, policy decision under the current context,
/// rate-limited FIFO, single-port bus arbitration, optional response
/// transform, delivery.
///
/// Time is simulated. Operations that take a timestamp first run all
/// events scheduled before it; submissions must arrive in non-decreasing
/// time order. The class is not internally synchronized; CommandLoop
/// serializes access from concurrent producers.
class Gateway {
public:
    explicit Gateway(vehicle::VirtualVehicle& vehicle, GatewayConfig config = {});

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    SimTime now() const { return now_; }
    const GatewayConfig& config() const { return config_; }
    vehicle::VirtualVehicle& vehicle() { return vehicle_; }
    policy::PolicyStore& policies() { return policies_; }
    const policy::PolicyStore& policies() const { return policies_; }

    // --- sessions -------------------------------------------------------
    const Session& attach(const policy::Principal& principal);
    void detach(const obd::PrincipalId& id);
    const Session& session(const obd::PrincipalId& id) const;
    bool attached(const obd::PrincipalId& id) const { return sessions_.count(id) > 0; }
    std::vector<obd::PrincipalId> principals() const;

    Outcome submit(const obd::ObdRequest& request);
    /// Submit and run the clock until the vehicle answers (or the request
    /// is denied). The returned response is the vehicle's own; a response
    /// transform only affects what lands in the inbox.
    Outcome call(const obd::ObdRequest& request);

    void run_until(SimTime t);
    /// Runs until no events remain; returns the final clock.
    SimTime run_until_idle();

    std::vector<Delivery> take_deliveries(const obd::PrincipalId& id);
    policy::ContextSnapshot context_at(SimTime t) const;

    // --- port management ------------------------------------------------
    void block_port(const Caller& caller, const obd::PrincipalId& id);
    void unblock(const Caller& caller, const obd::PrincipalId& id);
    void set_rate(const Caller& caller, const obd::PrincipalId& id, double rate);
    std::vector<ProbeRecord> probe(const Caller& caller, const obd::PrincipalId& id, SimTime since) const;
    void subscribe_probe(const Caller& caller, const obd::PrincipalId& id,
                         std::function<void(const ProbeRecord&)> callback);
    obd::ObdResponse send_raw(const Caller& caller, obd::ObdRequest request);

    // --- response transforms -------------------------------------------
    void set_response_transform(const Caller& caller, const obd::PrincipalId& id,
                                std::optional<privacy::PrivacyConfig> config);
    /// Releases any partially filled window as a final shuffled batch.
    void flush_transform(const obd::PrincipalId& id);

    // --- applications ---------------------------------------------------
    /// Installs (or reinstalls after halt) and attaches the app's principal.
    AppHandle install(const store::Package& package);
    /// Start, pause, halt, remove. Install goes through install().
    AppHandle app_lifecycle(AppAction action, const std::string& app_id);
    AppHandle self_update(const Caller& caller, const std::string& target_app_id, const store::Package& package);
    const AppHandle& app(const std::string& app_id) const;

    // --- observability --------------------------------------------------
    const std::vector<ProbeRecord>& probe_log() const { return probe_log_; }
    std::uint64_t vehicle_services() const { return services_; }

private:
    enum class Phase : int { Completion = 0, Release = 1, Dispatch = 2 };
    struct Event {
        SimTime at;
        Phase phase;
        std::uint64_t seq;
        obd::PrincipalId principal;  // Release
        std::uint64_t generation = 0;
        bool operator>(const Event& o) const {
            if (at != o.at) return at > o.at;
            if (phase != o.phase) return phase > o.phase;
            return seq > o.seq;
        }
    };
    struct Frame {
        obd::ObdRequest request;
        std::uint64_t seq = 0;
        bool raw = false;
        bool limited = false;
    };

    Session& session_mut(const obd::PrincipalId& id);
    void require_privileged(const Caller& caller) const;
    void advance(SimTime t, bool inclusive);
    void process(const Event& e);
    void schedule(SimTime at, Phase phase, obd::PrincipalId principal = {}, std::uint64_t generation = 0);
    void schedule_dispatch();
    void pump(Session& s);
    void release_head(Session& s);
    void on_dispatch();
    void on_completion();
    bool step();
    obd::ObdResponse wait_for(std::uint64_t seq);
    void deliver(Session& s, const obd::ObdRequest& req, const obd::ObdResponse& resp);
    void record(const ProbeRecord& r);
    void deny_queued(Session& s, DenyReason reason);
    Outcome deny(Session& s, const obd::ObdRequest& req, DenyReason reason, std::string detail);

    vehicle::VirtualVehicle& vehicle_;
    GatewayConfig config_;
    policy::PolicyStore policies_;
    std::map<obd::PrincipalId, Session> sessions_;
    std::map<std::string, AppHandle> apps_;

    SimTime now_ = SimTime::zero();
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> events_;
    std::uint64_t seq_ = 0;
    bool dispatch_pending_ = false;

    std::vector<Frame> bus_pending_;
    std::optional<Frame> in_service_;
    std::optional<obd::ObdResponse> in_service_response_;
    std::map<std::uint64_t, std::optional<obd::ObdResponse>> awaited_;

    std::vector<ProbeRecord> probe_log_;
    std::uint64_t services_ = 0;
    std::uint64_t app_counter_ = 0;
    std::uint64_t frame_seq_ = 0;
};

}  // namespace smartcore::gateway
