// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only
// when every criterion holds.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "smartcore/gateway/gateway.hpp"
#include "smartcore/obd/catalog.hpp"
#include "smartcore/obd/codec.hpp"
#include "smartcore/partition/calibrate.hpp"
#include "smartcore/partition/simulate.hpp"
#include "smartcore/pathing/attack.hpp"
#include "smartcore/pathing/profile.hpp"
#include "smartcore/policy/policy.hpp"
#include "smartcore/privacy/transform.hpp"
#include "smartcore/privacy/utility.hpp"

using namespace smartcore;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (pass) note << what;
            pass = false;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// 1-3: partition model

// Published measurements, keyed as (cpu MHz, resolution, placement).
struct Published {
    double cpu;
    const char* res;
    partition::PlacementKind placement;
    double dtr;
};

const std::vector<Published>& published_dtr() {
    using P = partition::PlacementKind;
    static const std::vector<Published> v{
        {600, "1080p", P::Cloud, 6.8},  {600, "1080p", P::SmartCore, 8.0},  {600, "1080p", P::Hybrid, 11.88},
        {600, "720p", P::Cloud, 4.4},   {600, "720p", P::SmartCore, 5.7},   {600, "720p", P::Hybrid, 5.57},
        {1200, "720p", P::Cloud, 3.6},  {1200, "720p", P::SmartCore, 3.0},  {1200, "720p", P::Hybrid, 4.3},
    };
    return v;
}

struct Calibrated {
    partition::CalibrationFixture fixture;
    partition::PipelineModel model;
    double calibrate_s = 0.0;
};

Calibrated& calibrated() {
    static Calibrated c = [] {
        Calibrated r;
        auto t0 = Clock::now();
        r.fixture = partition::load_fixture(std::string(SMARTCORE_DATA_DIR) + "/fixtures/amber_measurements.json");
        r.model = partition::calibrate(r.fixture).model;
        r.calibrate_s = seconds_since(t0);
        return r;
    }();
    return c;
}

partition::SimResult run_partition(double cpu, const std::string& res, partition::PlacementKind placement) {
    const auto& c = calibrated();
    auto stream = c.fixture.stream;
    stream.resolution = partition::parse_resolution(res);
    auto resources = c.fixture.resources;
    resources.cpu_mhz = cpu;
    return partition::simulate(c.model, placement, stream, resources, c.fixture.alerts, c.fixture.seed);
}

Verdict ac1_dtr() {
    Verdict v;
    auto t0 = Clock::now();
    calibrated();
    double worst = 0.0;
    for (const auto& p : published_dtr()) {
        auto r = run_partition(p.cpu, p.res, p.placement);
        v.require(r.detected, "target not detected");
        double err = std::abs(r.dtr - p.dtr) / p.dtr;
        worst = std::max(worst, err);
        if (err > 0.05) {
            std::ostringstream os;
            os << p.cpu << "MHz " << p.res << " " << partition::to_string(p.placement) << " dtr " << r.dtr
               << " vs " << p.dtr;
            v.require(false, os.str());
        }
    }
    double elapsed = seconds_since(t0);
    v.require(elapsed < 10.0, "runtime over 10 s");
    v.note << (v.pass ? "" : "; ") << "max rel err " << worst << ", " << elapsed << " s";
    return v;
}

Verdict ac2_usage() {
    Verdict v;
    using P = partition::PlacementKind;
    double cloud = run_partition(600, "720p", P::Cloud).cellular_mb();
    double edge = run_partition(600, "720p", P::SmartCore).cellular_mb();
    double hybrid = run_partition(600, "720p", P::Hybrid).cellular_mb();
    v.require(std::abs(cloud - 115.0) / 115.0 <= 0.05, "cloud usage off");
    // A zero target has no relative error; 5% of the smallest non-zero value is the bound.
    v.require(std::abs(edge) <= 0.05 * 3.3, "smartcore usage off");
    v.require(std::abs(hybrid - 3.3) / 3.3 <= 0.05, "hybrid usage off");
    double ratio = cloud / hybrid;
    v.require(std::abs(ratio - 34.8) / 34.8 <= 0.05, "ratio off");
    v.note << (v.pass ? "" : "; ") << "cloud " << cloud << " MB, smartcore " << edge << " MB, hybrid " << hybrid
           << " MB, ratio " << ratio;
    return v;
}

Verdict ac3_crossover() {
    Verdict v;
    using P = partition::PlacementKind;
    auto dtr = [](double cpu, const char* res, P p) { return run_partition(cpu, res, p).dtr; };
    v.require(dtr(600, "720p", P::Hybrid) < dtr(600, "720p", P::SmartCore), "600/720p: hybrid not below smartcore");
    v.require(dtr(600, "1080p", P::Hybrid) > dtr(600, "1080p", P::SmartCore), "600/1080p: hybrid not above smartcore");
    double s = dtr(1200, "720p", P::SmartCore), c = dtr(1200, "720p", P::Cloud), h = dtr(1200, "720p", P::Hybrid);
    v.require(s < c && c < h, "1200/720p: expected smartcore < cloud < hybrid");
    v.note << (v.pass ? "" : "; ") << "1200MHz smartcore " << s << " < cloud " << c << " < hybrid " << h;
    return v;
}

// ---------------------------------------------------------------------------
// 4: DoS

constexpr std::int64_t kServiceMs = 10;
constexpr std::size_t kQueueCap = 1024;

struct DosOutcome {
    // (principal, issued ms) -> completion ms; absent when unserved at the horizon
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> completed;
    std::set<std::pair<std::string, std::int64_t>> admitted;
    std::vector<double> legit_latency_ms;  // unserved censored at the horizon
};

void finish_latencies(DosOutcome& o, std::int64_t horizon_ms) {
    for (const auto& key : o.admitted) {
        if (key.first != "legit") continue;
        auto it = o.completed.find(key);
        o.legit_latency_ms.push_back(static_cast<double>((it == o.completed.end() ? horizon_ms : it->second) - key.second));
    }
}

double p95(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size())));
    return v[std::max<std::size_t>(rank, 1) - 1];
}

// Millisecond-tick brute force of the port: completions, then arrivals, then
// releases, then one dispatch per free bus. All event times in this workload
// are whole milliseconds, so the tick grid is exact.
DosOutcome dos_oracle(std::int64_t horizon_ms, bool limit_attacker) {
    struct Frame {
        std::string who;
        int pid;
        std::int64_t issued;
        std::uint64_t order;
    };
    struct Sess {
        std::string who;
        int pid;
        std::int64_t period;
        bool limited;
        std::deque<Frame> queue;
        std::size_t on_bus = 0;
        std::optional<std::int64_t> last_dispatch;
    };
    std::vector<Sess> sessions{{"attacker", 0x00, 10, limit_attacker, {}, 0, {}}, {"legit", 0x0D, 1000, false, {}, 0, {}}};
    std::vector<Frame> bus;
    std::optional<Frame> in_service;
    std::int64_t finish = 0;
    std::uint64_t order = 0;
    DosOutcome out;

    for (std::int64_t t = 0; t <= horizon_ms; ++t) {
        if (in_service && finish == t) {
            out.completed[{in_service->who, in_service->issued}] = t;
            in_service.reset();
        }
        for (auto& s : sessions) {
            if (t < horizon_ms && t % s.period == 0) {
                if (s.queue.size() + s.on_bus < kQueueCap) {
                    s.queue.push_back({s.who, s.pid, t, order++});
                    out.admitted.insert({s.who, t});
                }
            }
        }
        auto release = [&](Sess& s) {
            if (!s.limited) {
                while (!s.queue.empty()) {
                    bus.push_back(s.queue.front());
                    s.queue.pop_front();
                    ++s.on_bus;
                }
                return;
            }
            if (s.on_bus > 0 || s.queue.empty()) return;
            std::int64_t ready = s.queue.front().issued;
            if (s.last_dispatch) ready = std::max(ready, *s.last_dispatch + 1000);
            if (t >= ready) {
                bus.push_back(s.queue.front());
                s.queue.pop_front();
                ++s.on_bus;
            }
        };
        for (auto& s : sessions) release(s);
        if (!in_service && !bus.empty()) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < bus.size(); ++i) {
                const auto& a = bus[i];
                const auto& b = bus[best];
                if (std::tie(a.pid, a.issued, a.order) < std::tie(b.pid, b.issued, b.order)) best = i;
            }
            in_service = bus[best];
            bus.erase(bus.begin() + static_cast<std::ptrdiff_t>(best));
            finish = t + kServiceMs;
            for (auto& s : sessions) {
                if (s.who != in_service->who) continue;
                --s.on_bus;
                s.last_dispatch = t;
            }
        }
    }
    finish_latencies(out, horizon_ms);
    return out;
}

DosOutcome dos_gateway(std::int64_t horizon_ms, bool limit_attacker) {
    std::vector<vehicle::TraceSample> samples{{0.0, 30.0, std::nullopt}, {static_cast<double>(horizon_ms) / 1000.0 + 10.0, 30.0, std::nullopt}};
    vehicle::VirtualVehicle veh(vehicle::DrivingTrace("dos", samples), vehicle::VehicleProfile{});
    gateway::GatewayConfig cfg;
    cfg.service_time = SimTime::from_ns(kServiceMs * 1'000'000);
    cfg.queue_capacity = kQueueCap;
    gateway::Gateway gw(veh, cfg);
    gw.attach({"attacker", policy::PrincipalKind::Dongle, "", policy::profile::kProtection});
    gw.attach({"legit", policy::PrincipalKind::Dongle, "", policy::profile::kInsurance});
    if (limit_attacker) gw.set_rate(gateway::Caller::owner(), "attacker", 1.0);

    DosOutcome out;
    for (std::int64_t t = 0; t < horizon_ms; t += 10) {
        auto at = SimTime::from_ns(t * 1'000'000);
        if (!gw.submit({"attacker", obd::live(0x00), at}).denied()) out.admitted.insert({"attacker", t});
        if (t % 1000 == 0 && !gw.submit({"legit", obd::live(obd::kSpeedPid), at}).denied()) out.admitted.insert({"legit", t});
    }
    gw.run_until(SimTime::from_ns(horizon_ms * 1'000'000));
    for (const auto& r : gw.probe_log())
        if (r.direction == gateway::Direction::FromVehicle)
            out.completed[{r.principal, r.request.issued_at.ns() / 1'000'000}] = r.timestamp.ns() / 1'000'000;
    finish_latencies(out, horizon_ms);
    return out;
}

Verdict ac4_dos() {
    Verdict v;
    const double unloaded = static_cast<double>(kServiceMs);
    std::vector<double> growth;
    for (std::int64_t horizon : {15'000, 30'000, 60'000}) {
        for (bool limited : {false, true}) {
            auto o = dos_oracle(horizon, limited);
            auto g = dos_gateway(horizon, limited);
            v.require(o.completed == g.completed && o.admitted == g.admitted,
                      "gateway disagrees with the tick oracle (horizon " + std::to_string(horizon) + " ms)");
            double p = p95(g.legit_latency_ms);
            if (!limited) growth.push_back(p);
            if (limited && horizon == 60'000) {
                v.require(p <= 3.0 * unloaded, "limited p95 above 3x unloaded");
                v.note << (v.pass ? "" : "; ") << "limited p95 " << p << " ms";
            }
        }
    }
    v.require(growth[0] < growth[1] && growth[1] < growth[2], "unlimited p95 not growing with duration");
    v.require(growth[2] > 100.0 * unloaded, "unlimited p95 not unbounded");
    v.note << "; unlimited p95 " << growth[0] << "/" << growth[1] << "/" << growth[2] << " ms at 15/30/60 s";
    return v;
}

// ---------------------------------------------------------------------------
// 5: insurance policy exhaustiveness

Verdict ac5_insurance() {
    Verdict v;
    auto t0 = Clock::now();
    policy::Principal ins{"insurer", policy::PrincipalKind::Dongle, "", policy::profile::kInsurance};
    auto pols = policy::derive_predefined_policies(vehicle::VehicleProfile{}, ins);
    std::vector<obd::Pid> writes{{obd::service::kClearDtc, 0}, {obd::service::kControl, 0}, {0x2E, 0}, {0x31, 0}};
    std::vector<obd::Pid> other_reads{{obd::service::kReadDtc, 0}, {obd::service::kVehicleInfo, 0x02}};
    std::size_t checked = 0;
    for (const auto& ctx : policy::all_contexts()) {
        for (const auto& e : obd::PidCatalog::standard().entries()) {
            bool allowed = policy::evaluate({"insurer", e.pid, SimTime::zero()}, ins, ctx, pols).allowed();
            bool expected = e.pid.code == obd::kSpeedPid || e.pid.code == obd::kOdometerPid;
            v.require(allowed == expected, "unexpected decision for " + obd::to_string(e.pid));
            ++checked;
        }
        for (const auto& w : writes) {
            v.require(obd::is_write(w), obd::to_string(w) + " not classified as a write");
            v.require(!policy::evaluate({"insurer", w, SimTime::zero()}, ins, ctx, pols).allowed(), "write allowed");
            ++checked;
        }
        for (const auto& r : other_reads) {
            v.require(!policy::evaluate({"insurer", r, SimTime::zero()}, ins, ctx, pols).allowed(), "non-live read allowed");
            ++checked;
        }
    }
    double elapsed = seconds_since(t0);
    v.require(policy::all_contexts().size() == 64, "context space is not 64");
    v.require(elapsed < 1.0, "slower than 1 s");
    v.note << (v.pass ? "" : "; ") << checked << " decisions over " << policy::all_contexts().size() << " contexts in "
           << elapsed << " s";
    return v;
}

// ---------------------------------------------------------------------------
// 6: privacy invariants

std::vector<double> random_trace(privacy::Rng& rng, std::size_t n) {
    std::vector<double> t(n);
    double v = 0.0;
    for (auto& x : t) {
        v = std::clamp(v + (rng.unit() - 0.5) * 12.0, 0.0, 120.0);
        x = std::round(v);
    }
    return t;
}

Verdict ac6_privacy() {
    Verdict v;
    auto t0 = Clock::now();
    privacy::Rng rng(2017);
    for (int i = 0; i < 100; ++i) {
        auto trace = random_trace(rng, 50 + rng.below(500));
        privacy::PrivacyConfig shuffle{privacy::Algorithm::Shuffle, 1 + rng.below(40), 1, 0.0, rng.next()};
        auto out = privacy::transform_all(shuffle, trace);
        auto u = privacy::utility_report(trace, out);
        v.require(u.actual == u.transformed, "shuffle changed the speeding-sample count");
        v.require(!u.degradation || *u.degradation == 0.0, "shuffle degradation not zero");

        privacy::PrivacyConfig zero{privacy::Algorithm::Noise, 1, 1, 0.0, rng.next()};
        v.require(privacy::transform_all(zero, trace) == trace, "noise with R=0 is not the identity");
        privacy::PrivacyConfig tiny{privacy::Algorithm::Noise, 1, 1, 1e-9, rng.next()};
        auto near = privacy::transform_all(tiny, trace);
        for (std::size_t k = 0; k < trace.size(); ++k)
            v.require(std::abs(near[k] - trace[k]) <= 1e-9, "noise with R->0 does not converge to identity");

        for (auto alg : {privacy::Algorithm::Shuffle, privacy::Algorithm::RoundShuffle, privacy::Algorithm::Noise}) {
            privacy::PrivacyConfig c{alg, 1 + rng.below(20), alg == privacy::Algorithm::RoundShuffle ? 5 : 1, 20.0, rng.next()};
            v.require(privacy::transform_all(c, trace) == privacy::transform_all(c, trace), "same seed, different output");
        }
    }
    double elapsed = seconds_since(t0);
    v.require(elapsed < 5.0, "slower than 5 s");
    v.note << (v.pass ? "" : "; ") << "100 traces, " << elapsed << " s";
    return v;
}

// ---------------------------------------------------------------------------
// 7: attack degradation ordering

std::vector<pathing::NodeId> random_route(const pathing::RoadNetwork& net, int edges, privacy::Rng& rng) {
    std::vector<pathing::NodeId> path{net.nodes()[rng.below(net.nodes().size())].id};
    while (static_cast<int>(path.size()) <= edges) {
        std::vector<pathing::NodeId> next;
        for (const auto& a : net.neighbors(path.back()))
            if (std::find(path.begin(), path.end(), a.to) == path.end()) next.push_back(a.to);
        if (next.empty()) break;
        path.push_back(next[rng.below(next.size())]);
    }
    return path;
}

Verdict ac7_attack_ordering() {
    Verdict v;
    auto t0 = Clock::now();
    using A = privacy::Algorithm;
    struct Cfg {
        std::string name;
        privacy::PrivacyConfig c;
    };
    std::vector<Cfg> cfgs{{"identity", {A::Identity, 1, 1, 0, 0}}};
    for (std::size_t w : {5, 10, 20}) cfgs.push_back({"alg1 W=" + std::to_string(w), {A::Shuffle, w, 1, 0, 0}});
    for (std::size_t w : {5, 10, 20}) cfgs.push_back({"alg2 W=" + std::to_string(w), {A::RoundShuffle, w, 5, 0, 0}});
    cfgs.push_back({"alg3 R=20", {A::Noise, 1, 1, 20.0, 0}});

    std::vector<double> err(cfgs.size(), 0.0);
    double noise_degradation = 0.0;
    int runs = 0;
    for (int grid = 0; grid < 10; ++grid) {
        auto net = pathing::random_grid({}, 1000 + static_cast<std::uint64_t>(grid));
        privacy::Rng rng(77 + static_cast<std::uint64_t>(grid));
        auto route = random_route(net, 6, rng);
        auto trace = pathing::predict_profile(route, net);
        pathing::GroundTruth truth{route.back(), net.path_length(route)};
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            for (std::size_t k = 0; k < cfgs.size(); ++k) {
                auto c = cfgs[k].c;
                c.seed = seed * 31 + static_cast<std::uint64_t>(grid);
                auto seen = privacy::transform_all(c, trace);
                err[k] += *pathing::estimate_destination(seen, route.front(), net, {}, truth).error_ratio;
                if (c.alg == A::Noise) noise_degradation += privacy::utility_report(trace, seen).degradation.value_or(0.0);
            }
            ++runs;
        }
    }
    for (auto& e : err) e /= runs;
    noise_degradation /= runs;
    const double identity = err.front(), noise = err.back();
    for (std::size_t k = 1; k + 1 < cfgs.size(); ++k) {
        v.require(identity < err[k], cfgs[k].name + " not above identity");
        v.require(err[k] < noise, cfgs[k].name + " not below alg3");
    }
    v.require(noise_degradation <= 0.15, "alg3 utility degradation above 15%");
    v.note << (v.pass ? "" : "; ") << "mean error";
    for (std::size_t k = 0; k < cfgs.size(); ++k) v.note << " " << cfgs[k].name << "=" << err[k];
    v.note << "; alg3 degradation " << noise_degradation << "; " << runs << " runs, " << seconds_since(t0) << " s";
    return v;
}

// ---------------------------------------------------------------------------
// 8: beam search vs brute force

struct Brute {
    std::vector<pathing::NodeId> best{};
    double score = std::numeric_limits<double>::infinity();
    std::size_t candidates = 0;
};

// Depth-first enumeration of every simple path from the origin with the
// documented acceptance rule, independent of the beam's level-by-level order.
void enumerate(const pathing::RoadNetwork& net, std::vector<pathing::NodeId>& path, double len, double lo, double hi,
               const std::function<void(const std::vector<pathing::NodeId>&)>& visit) {
    bool extended = false;
    for (const auto& adj : net.neighbors(path.back())) {
        if (std::find(path.begin(), path.end(), adj.to) != path.end()) continue;
        extended = true;
        double l = len + net.edges()[adj.edge].len_m;
        path.push_back(adj.to);
        if (l >= lo) visit(path);
        if (l < hi) enumerate(net, path, l, lo, hi, visit);
        path.pop_back();
    }
    if (!extended && path.size() > 1 && len < lo) visit(path);
}

Verdict ac8_oracle_equivalence() {
    Verdict v;
    int networks = 0, tried = 0;
    std::size_t max_candidates = 0;
    privacy::Rng rng(424242);
    while (networks < 20 && tried < 500) {
        ++tried;
        pathing::GridOptions go;
        go.rows = 3 + static_cast<int>(rng.below(2));
        go.cols = 3 + static_cast<int>(rng.below(2));
        auto net = pathing::random_grid(go, rng.next());
        auto route = random_route(net, 2 + static_cast<int>(rng.below(3)), rng);
        auto trace = pathing::predict_profile(route, net);
        privacy::PrivacyConfig noise{privacy::Algorithm::Noise, 1, 1, 10.0 * rng.unit(), rng.next()};
        trace = privacy::transform_all(noise, trace);

        pathing::AttackOptions opts;
        opts.beam_width = 0;
        const double d = pathing::integrate_distance_m(trace);
        Brute b;
        std::vector<pathing::NodeId> start{route.front()};
        enumerate(net, start, 0.0, d * (1 - opts.distance_slack), d * (1 + opts.distance_slack),
                  [&](const std::vector<pathing::NodeId>& p) {
                      ++b.candidates;
                      double s = pathing::score_path(trace, p, net, opts);
                      if (b.candidates == 1 || pathing::better(s, p, b.score, b.best)) {
                          b.score = s;
                          b.best = p;
                      }
                  });
        if (b.candidates == 0 || b.candidates > 200) continue;
        ++networks;
        max_candidates = std::max(max_candidates, b.candidates);
        auto r = pathing::estimate_destination(trace, route.front(), net, opts);
        v.require(r.best_path == b.best, "best path differs on network " + std::to_string(networks));
        v.require(r.hypotheses == b.candidates, "candidate count differs on network " + std::to_string(networks));
        v.require(r.score == b.score, "score differs on network " + std::to_string(networks));
    }
    v.require(networks == 20, "could not build 20 networks with at most 200 candidates");
    v.note << (v.pass ? "" : "; ") << networks << " networks, up to " << max_candidates << " candidates";
    return v;
}

// ---------------------------------------------------------------------------
// 9: mediation

Verdict ac9_mediation() {
    Verdict v;
    privacy::Rng rng(99);
    const std::vector<std::string> profiles{"insurance", "protection", "diagnostic", "unknown"};
    std::vector<obd::Pid> pids;
    for (const auto& e : obd::PidCatalog::standard().entries()) pids.push_back(e.pid);
    pids.push_back({obd::service::kClearDtc, 0});
    pids.push_back({obd::service::kReadDtc, 0});
    pids.push_back({obd::service::kControl, 1});
    std::size_t total_frames = 0, total_denied = 0;

    for (int schedule = 0; schedule < 1000; ++schedule) {
        vehicle::VehicleProfile prof;
        if (rng.below(3) == 0) prof.quirks.push_back(vehicle::kQuirkDenyAllWhileMoving);
        std::vector<vehicle::TraceSample> samples;
        for (int k = 0; k <= 40; ++k) samples.push_back({k * 2.0, rng.below(2) ? 0.0 : 40.0 * rng.unit(), std::nullopt});
        samples.push_back({10000.0, 0.0, std::nullopt});
        vehicle::VirtualVehicle veh(vehicle::DrivingTrace("mix", samples), prof);
        gateway::GatewayConfig cfg;
        cfg.queue_capacity = 1 + rng.below(20);
        cfg.service_time = SimTime::from_ns(static_cast<std::int64_t>(1 + rng.below(20)) * 1'000'000);
        gateway::Gateway gw(veh, cfg);
        const auto owner = gateway::Caller::owner();

        std::vector<std::string> ids;
        std::size_t n = 2 + rng.below(3);
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back("p" + std::to_string(i));
            gw.attach({ids.back(), policy::PrincipalKind::Dongle, "", profiles[rng.below(profiles.size())]});
            if (rng.below(2)) gw.set_rate(owner, ids.back(), 0.5 + 20.0 * rng.unit());
        }
        std::int64_t t_us = 0;
        std::size_t steps = 20 + rng.below(200);
        for (std::size_t k = 0; k < steps; ++k) {
            // a raw send is synchronous and may move the clock past the schedule
            t_us = std::max(t_us, gw.now().ns() / 1000) + 1 + static_cast<std::int64_t>(rng.below(300'000));
            auto at = SimTime::from_ns(t_us * 1000);
            const auto& who = ids[rng.below(ids.size())];
            switch (rng.below(20)) {
                case 0: gw.block_port(owner, who); break;
                case 1: gw.unblock(owner, who); break;
                case 2: gw.run_until(at); gw.send_raw(owner, {"owner", pids[rng.below(pids.size())], at}); break;
                case 3: veh.inject_event({vehicle::EventKind::CheckEngineOn, at.seconds()}); break;
                default: gw.submit({who, pids[rng.below(pids.size())], at}); break;
            }
        }
        gw.run_until_idle();

        std::vector<obd::ObdRequest> forwarded;
        std::set<std::tuple<std::string, std::int64_t, int, int>> denied;
        for (const auto& r : gw.probe_log()) {
            if (r.direction == gateway::Direction::ToVehicle) forwarded.push_back(r.request);
            if (r.direction == gateway::Direction::Denied)
                denied.insert({r.request.principal_id, r.request.issued_at.ns(), r.request.pid.mode, r.request.pid.code});
        }
        auto served = veh.service_log();
        v.require(served.size() == forwarded.size(), "serviced count differs from to_vehicle records");
        v.require(served.size() == gw.vehicle_services(), "gateway service counter differs");
        for (std::size_t i = 0; i < std::min(served.size(), forwarded.size()); ++i) {
            const auto& s = served[i];
            v.require(s.principal_id == forwarded[i].principal_id && s.pid == forwarded[i].pid &&
                          s.issued_at == forwarded[i].issued_at,
                      "vehicle log order differs from probe log");
            v.require(!denied.count({s.principal_id, s.issued_at.ns(), s.pid.mode, s.pid.code}),
                      "denied frame reached the vehicle");
        }
        total_frames += served.size();
        total_denied += denied.size();
        if (!v.pass) {
            v.note << " (schedule " << schedule << ")";
            break;
        }
    }
    if (v.pass) v.note << "1000 schedules, " << total_frames << " serviced, " << total_denied << " denied";
    return v;
}

// ---------------------------------------------------------------------------
// 10: codec

Verdict ac10_codec() {
    Verdict v;
    privacy::Rng rng(10);
    std::size_t checked = 0;
    double worst = 0.0;
    for (const auto& e : obd::PidCatalog::standard().entries()) {
        const double q = e.quantum();
        for (int i = 0; i < 1000; ++i) {
            double x = e.min_value() + (e.max_value() - e.min_value()) * rng.unit();
            auto raw = obd::encode_value(e.pid, x);
            v.require(raw.size() == e.payload_len, "payload length mismatch for " + obd::to_string(e.pid));
            double back = obd::decode_value(e.pid, raw).value;
            v.require(std::abs(back - x) <= q * (1 + 1e-9), "round-trip error above one step for " + obd::to_string(e.pid));
            worst = std::max(worst, std::abs(back - x) / q);
            ++checked;
        }
    }
    v.note << (v.pass ? "" : "; ") << checked << " values over " << obd::PidCatalog::standard().size()
           << " PIDs, worst " << worst << " steps";
    return v;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        Verdict (*run)();
    };
    const Criterion criteria[] = {
        {"AC1  DTR reproduction after calibration", ac1_dtr},
        {"AC2  cellular data usage and cloud/hybrid ratio", ac2_usage},
        {"AC3  placement crossover", ac3_crossover},
        {"AC4  DoS mitigation vs tick oracle", ac4_dos},
        {"AC5  insurance policy exhaustiveness", ac5_insurance},
        {"AC6  privacy invariants", ac6_privacy},
        {"AC7  attack degradation ordering", ac7_attack_ordering},
        {"AC8  beam vs brute-force enumeration", ac8_oracle_equivalence},
        {"AC9  gateway mediation", ac9_mediation},
        {"AC10 codec round-trip", ac10_codec},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v.pass = false;
            v.note << "exception: " << e.what();
        }
        std::printf("[%s] %s: %s\n", v.pass ? "PASS" : "FAIL", c.name, v.note.str().c_str());
        std::fflush(stdout);
        failed += v.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
