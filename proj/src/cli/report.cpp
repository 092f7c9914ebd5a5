#include "smartcore/cli/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "smartcore/gateway/gateway.hpp"
#include "smartcore/partition/calibrate.hpp"
#include "smartcore/partition/simulate.hpp"
#include "smartcore/pathing/profile.hpp"
#include "smartcore/policy/policy_io.hpp"
#include "smartcore/privacy/utility.hpp"

namespace smartcore::cli {

using nlohmann::json;

const MetricRow* Report::find(const std::string& metric) const {
    for (const auto& m : metrics)
        if (m.metric == metric) return &m;
    return nullptr;
}

bool Report::passed() const {
    return std::all_of(expectations.begin(), expectations.end(), [](const ExpectationResult& e) { return e.passed; });
}

std::string utc_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

}  // namespace

std::vector<ExpectationResult> check_expectations(const std::vector<Expectation>& expectations,
                                                  const std::vector<MetricRow>& metrics) {
    auto lookup = [&](const std::string& name) -> std::optional<double> {
        for (const auto& m : metrics)
            if (m.metric == name) return m.value;
        return std::nullopt;
    };
    std::vector<ExpectationResult> out;
    for (const auto& e : expectations) {
        ExpectationResult r;
        r.expectation = e;
        r.actual = lookup(e.metric);
        if (e.ref) {
            if (auto ref = lookup(*e.ref)) r.bound = e.factor * *ref;
        } else {
            r.bound = e.value;
        }
        if (!r.actual) {
            r.detail = "metric '" + e.metric + "' was not produced";
        } else if (!r.bound) {
            r.detail = "reference metric '" + *e.ref + "' was not produced";
        } else {
            double a = *r.actual, b = *r.bound;
            if (e.op == "<") r.passed = a < b;
            else if (e.op == "<=") r.passed = a <= b;
            else if (e.op == ">") r.passed = a > b;
            else if (e.op == ">=") r.passed = a >= b;
            else if (e.op == "==") r.passed = a == b;
            else r.passed = b == 0.0 ? std::abs(a) <= e.rel_tol : std::abs(a - b) / std::abs(b) <= e.rel_tol;
            r.detail = "actual " + fmt(a) + (e.op == "approx" ? " ~ " : " " + e.op + " ") + fmt(b);
        }
        out.push_back(std::move(r));
    }
    return out;
}

json to_json(const Report& r) {
    json metrics = json::array();
    for (const auto& m : r.metrics) metrics.push_back({{"metric", m.metric}, {"value", m.value}, {"unit", m.unit}});
    json exps = json::array();
    for (const auto& e : r.expectations) {
        json x = {{"metric", e.expectation.metric}, {"op", e.expectation.op}, {"passed", e.passed}, {"detail", e.detail}};
        x["actual"] = e.actual ? json(*e.actual) : json(nullptr);
        x["bound"] = e.bound ? json(*e.bound) : json(nullptr);
        exps.push_back(x);
    }
    return {{"schema_version", kReportSchemaVersion},
            {"scenario", r.scenario},
            {"seed", r.seed},
            {"config", r.config},
            {"metrics", metrics},
            {"probe_summary", r.probe_summary},
            {"expectations", exps},
            {"passed", r.passed()},
            {"timestamp", r.timestamp}};
}

std::string render_text(const Report& r) {
    std::ostringstream os;
    os << "scenario " << r.scenario << " (seed " << r.seed << ")\n\n";
    std::size_t w = 6;
    for (const auto& m : r.metrics) w = std::max(w, m.metric.size());
    os << std::left << std::setw(static_cast<int>(w) + 2) << "metric" << std::right << std::setw(14) << "value"
       << "  unit\n";
    for (const auto& m : r.metrics)
        os << std::left << std::setw(static_cast<int>(w) + 2) << m.metric << std::right << std::setw(14) << fmt(m.value)
           << "  " << m.unit << "\n";
    if (!r.probe_summary.empty()) {
        os << "\nprobe summary\n";
        for (const auto& [who, s] : r.probe_summary.items()) {
            os << "  " << who << ": to_vehicle " << s.value("to_vehicle", 0) << ", from_vehicle "
               << s.value("from_vehicle", 0) << ", denied " << s.value("denied", 0);
            if (s.contains("deny_reasons") && !s["deny_reasons"].empty()) {
                os << " (";
                bool first = true;
                for (const auto& [reason, n] : s["deny_reasons"].items()) {
                    os << (first ? "" : ", ") << reason << " " << n.get<std::size_t>();
                    first = false;
                }
                os << ")";
            }
            os << "\n";
        }
    }
    if (!r.expectations.empty()) {
        os << "\nexpectations\n";
        for (const auto& e : r.expectations)
            os << "  " << (e.passed ? "PASS" : "FAIL") << "  " << e.expectation.metric << " " << e.expectation.op << " "
               << (e.expectation.ref ? fmt(e.expectation.factor) + " x " + *e.expectation.ref : fmt(e.expectation.value))
               << "  (" << e.detail << ")\n";
    }
    std::size_t ok = std::count_if(r.expectations.begin(), r.expectations.end(),
                                   [](const ExpectationResult& e) { return e.passed; });
    os << "\nresult: " << (r.passed() ? "PASS" : "FAIL") << " (" << ok << "/" << r.expectations.size()
       << " expectations)\n";
    return os.str();
}

namespace {

struct Metrics {
    std::vector<MetricRow> rows;
    void add(std::string name, double value, std::string unit) {
        rows.push_back({std::move(name), value, std::move(unit)});
    }
};

// Nearest-rank percentile of an unsorted sample.
double percentile(std::vector<double> v, double p) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
    return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

std::vector<pathing::NodeId> random_route(const pathing::RoadNetwork& net, int edges, std::uint64_t seed) {
    privacy::Rng rng(seed);
    const auto& nodes = net.nodes();
    std::vector<pathing::NodeId> path{nodes[rng.below(nodes.size())].id};
    while (static_cast<int>(path.size()) <= edges) {
        std::vector<pathing::NodeId> next;
        for (const auto& a : net.neighbors(path.back()))
            if (std::find(path.begin(), path.end(), a.to) == path.end()) next.push_back(a.to);
        if (next.empty()) break;
        path.push_back(next[rng.below(next.size())]);
    }
    return path;
}

vehicle::DrivingTrace synthesize_trace(const std::vector<double>& speeds) {
    std::vector<vehicle::TraceSample> samples;
    for (std::size_t k = 0; k < speeds.size(); ++k) samples.push_back({static_cast<double>(k), speeds[k], std::nullopt});
    if (samples.size() < 2) samples.push_back({static_cast<double>(samples.size()), 0.0, std::nullopt});
    return vehicle::DrivingTrace("route", std::move(samples));
}

std::string file_of(const Scenario& s) { return s.source.empty() ? "<scenario>" : s.source.string(); }

struct RouteSetup {
    pathing::RoadNetwork net;
    std::vector<pathing::NodeId> route;
};

RouteSetup setup_route(const Scenario& s) {
    const AttackSpec& a = *s.attack;
    RouteSetup r;
    try {
        r.net = a.network_file ? pathing::load_network(a.network_file->string()) : pathing::random_grid(a.grid, a.grid_seed);
        r.route = a.route.empty() ? random_route(r.net, a.route_edges, s.seed) : a.route;
        r.net.path_length(r.route);
    } catch (const pathing::NetworkError& e) {
        throw ScenarioError(file_of(s), 0, std::string("attack: ") + e.what());
    }
    return r;
}

// Per-principal streams pulled out of a finished gateway run.
struct Collected {
    std::vector<double> raw_speed;        // what the vehicle answered
    std::vector<double> delivered_speed;  // what the principal received
};

void run_gateway(const Scenario& s, const vehicle::DrivingTrace& trace, const std::optional<RouteSetup>& route,
                 Metrics& m, json& probe_summary) {
    vehicle::VirtualVehicle veh(trace, s.vehicle);
    try {
        auto events = s.events;
        if (s.events_file) {
            auto more = vehicle::load_events_file(s.events_file->string());
            events.insert(events.end(), more.begin(), more.end());
        }
        for (const auto& e : events) veh.inject_event(e);
    } catch (const std::exception& e) {
        throw ScenarioError(file_of(s), 0, std::string("events: ") + e.what());
    }

    gateway::GatewayConfig cfg;
    cfg.service_time = SimTime::from_seconds(s.gateway.service_time_ms / 1000.0);
    cfg.overhead = SimTime::from_seconds(s.gateway.overhead_ms / 1000.0);
    cfg.queue_capacity = s.gateway.queue_capacity;
    gateway::Gateway gw(veh, cfg);
    const auto owner = gateway::Caller::owner();

    for (const auto& p : s.principals) {
        if (p.kind == policy::PrincipalKind::Application) {
            store::Package pkg;
            pkg.app_id = p.id;
            pkg.version = Version::parse("1.0.0");
            pkg.manifest.profile = p.profile;
            gw.install(pkg);
            gw.app_lifecycle(gateway::AppAction::Start, p.id);
        } else {
            gw.attach(policy::Principal{p.id, p.kind, p.token, p.profile});
        }
    }
    for (const auto& f : s.policy_files) {
        policy::PolicyDocument doc;
        try {
            doc = policy::load_policy_document(f.string());
        } catch (const std::exception& e) {
            throw ScenarioError(f.string(), 0, e.what());
        }
        if (!gw.attached(doc.principal))
            throw ScenarioError(f.string(), 0, "policy document names unknown principal '" + doc.principal + "'");
        try {
            for (auto& pol : doc.policies) gw.policies().add(pol);
        } catch (const std::exception& e) {
            throw ScenarioError(f.string(), 0, e.what());
        }
        if (doc.response_transform) gw.set_response_transform(owner, doc.principal, doc.response_transform);
    }
    for (const auto& p : s.principals) {
        if (p.rate_limit) gw.set_rate(owner, p.id, *p.rate_limit);
        if (p.blocked) gw.block_port(owner, p.id);
    }
    if (s.privacy) gw.set_response_transform(owner, s.privacy->principal, s.privacy->config);

    const double horizon = std::min(s.duration_s, trace.end());
    struct Submission {
        std::int64_t t_ns;
        std::size_t principal, workload;
        std::uint64_t k;
    };
    std::vector<Submission> subs;
    for (std::size_t pi = 0; pi < s.principals.size(); ++pi) {
        const auto& p = s.principals[pi];
        for (std::size_t wi = 0; wi < p.workload.size(); ++wi) {
            const auto& w = p.workload[wi];
            const double stop = std::min(w.stop_s.value_or(horizon), horizon);
            for (std::uint64_t k = 0;; ++k) {
                double t = w.start_s + static_cast<double>(k) / w.rate_hz;
                if (t >= stop) break;
                if (t < trace.start()) continue;
                subs.push_back({SimTime::from_seconds(t).ns(), pi, wi, k});
            }
        }
    }
    std::sort(subs.begin(), subs.end(), [](const Submission& a, const Submission& b) {
        return std::tie(a.t_ns, a.principal, a.workload, a.k) < std::tie(b.t_ns, b.principal, b.workload, b.k);
    });

    std::map<std::string, std::multiset<std::pair<std::int64_t, std::uint8_t>>> admitted;
    for (const auto& sub : subs) {
        const auto& p = s.principals[sub.principal];
        obd::ObdRequest req{p.id, p.workload[sub.workload].pid, SimTime::from_ns(sub.t_ns)};
        auto out = gw.submit(req);
        if (!out.denied()) admitted[p.id].insert({sub.t_ns, req.pid.code});
    }
    gw.run_until(SimTime::from_seconds(horizon));
    if (s.privacy) gw.flush_transform(s.privacy->principal);

    std::map<std::string, Collected> streams;
    std::map<std::string, std::vector<double>> latencies;
    std::map<std::string, json> summary;
    std::size_t to_vehicle = 0, from_vehicle = 0, denied = 0;
    for (const auto& r : gw.probe_log()) {
        json& js = summary[r.principal];
        if (js.is_null()) js = {{"to_vehicle", 0}, {"from_vehicle", 0}, {"denied", 0}, {"deny_reasons", json::object()}};
        switch (r.direction) {
            case gateway::Direction::ToVehicle:
                ++to_vehicle;
                js["to_vehicle"] = js["to_vehicle"].get<std::size_t>() + 1;
                break;
            case gateway::Direction::FromVehicle: {
                ++from_vehicle;
                js["from_vehicle"] = js["from_vehicle"].get<std::size_t>() + 1;
                if (r.note == "raw") break;
                auto& adm = admitted[r.principal];
                if (auto it = adm.find({r.request.issued_at.ns(), r.request.pid.code}); it != adm.end()) adm.erase(it);
                latencies[r.principal].push_back((r.timestamp + cfg.overhead - r.request.issued_at).seconds() * 1000.0);
                if (r.response && r.request.pid == obd::live(obd::kSpeedPid))
                    streams[r.principal].raw_speed.push_back(r.response->value.value);
                break;
            }
            case gateway::Direction::Denied: {
                ++denied;
                js["denied"] = js["denied"].get<std::size_t>() + 1;
                std::string reason = r.note.substr(0, r.note.find(':'));
                js["deny_reasons"][reason] = js["deny_reasons"].value(reason, 0) + 1;
                break;
            }
        }
    }
    for (auto& [id, js] : summary) probe_summary[id] = js;

    const double unloaded = s.gateway.service_time_ms + s.gateway.overhead_ms;
    m.add("gateway.horizon_s", horizon, "s");
    m.add("gateway.unloaded_latency_ms", unloaded, "ms");
    for (const auto& p : s.principals) {
        const auto& st = gw.session(p.id).stats();
        for (const auto& d : gw.take_deliveries(p.id))
            if (d.request.pid == obd::live(obd::kSpeedPid)) streams[p.id].delivered_speed.push_back(d.response.value.value);
        auto lat = latencies[p.id];
        // Frames still waiting at the horizon count with the time they have
        // waited so far, a lower bound on their eventual latency.
        std::size_t unserved = admitted[p.id].size();
        for (const auto& [t_ns, _] : admitted[p.id])
            lat.push_back((SimTime::from_seconds(horizon) - SimTime::from_ns(t_ns)).seconds() * 1000.0 + s.gateway.overhead_ms);
        const std::string pre = p.id + ".";
        m.add(pre + "submitted", static_cast<double>(st.submitted), "count");
        m.add(pre + "denied", static_cast<double>(st.denied), "count");
        m.add(pre + "forwarded", static_cast<double>(st.forwarded), "count");
        m.add(pre + "delivered", static_cast<double>(st.delivered), "count");
        m.add(pre + "overflow_drops", static_cast<double>(st.overflow_drops), "count");
        m.add(pre + "unserved", static_cast<double>(unserved), "count");
        if (!lat.empty()) {
            m.add(pre + "latency_p50_ms", percentile(lat, 0.50), "ms");
            m.add(pre + "latency_p95_ms", percentile(lat, 0.95), "ms");
            m.add(pre + "latency_max_ms", *std::max_element(lat.begin(), lat.end()), "ms");
        }
    }
    m.add("vehicle.serviced", static_cast<double>(veh.service_count()), "count");
    m.add("probe.to_vehicle", static_cast<double>(to_vehicle), "count");
    m.add("probe.from_vehicle", static_cast<double>(from_vehicle), "count");
    m.add("probe.denied", static_cast<double>(denied), "count");
    m.add("gateway.mediation_consistent", veh.service_count() == to_vehicle ? 1.0 : 0.0, "bool");

    if (s.privacy) {
        const auto& c = streams[s.privacy->principal];
        if (c.raw_speed.empty()) throw ScenarioError(file_of(s), 0, "privacy: principal received no speed readings");
        double thr = s.privacy->threshold_kmh > 0 ? s.privacy->threshold_kmh : privacy::kDefaultThresholdKmh;
        auto u = privacy::utility_report(c.raw_speed, c.delivered_speed, thr, privacy::UtilityMode::SampleCount);
        m.add("privacy.samples", static_cast<double>(c.delivered_speed.size()), "count");
        m.add("privacy.utility_actual", static_cast<double>(u.actual), "count");
        m.add("privacy.utility_transformed", static_cast<double>(u.transformed), "count");
        if (u.degradation) m.add("privacy.utility_degradation", *u.degradation, "ratio");
        std::size_t n = std::min(c.raw_speed.size(), c.delivered_speed.size());
        double abs_err = 0.0;
        for (std::size_t i = 0; i < n; ++i) abs_err += std::abs(c.raw_speed[i] - c.delivered_speed[i]);
        m.add("privacy.mean_abs_change_kmh", n ? abs_err / static_cast<double>(n) : 0.0, "km/h");
    }

    if (s.attack && route) {
        const auto& c = streams[s.attack->principal];
        if (c.delivered_speed.empty()) throw ScenarioError(file_of(s), 0, "attack: principal received no speed readings");
        pathing::GroundTruth truth{route->route.back(), route->net.path_length(route->route)};
        auto res = pathing::estimate_destination(c.delivered_speed, route->route.front(), route->net,
                                                 s.attack->options, truth);
        auto base = pathing::estimate_destination(c.raw_speed, route->route.front(), route->net, s.attack->options, truth);
        m.add("attack.error_ratio", *res.error_ratio, "ratio");
        m.add("attack.error_ratio_untransformed", *base.error_ratio, "ratio");
        m.add("attack.estimated_destination", res.estimated_destination, "node");
        m.add("attack.actual_destination", route->route.back(), "node");
        m.add("attack.hypotheses", static_cast<double>(res.hypotheses), "count");
        m.add("attack.travelled_m", truth.travelled_m, "m");
    }
}

void run_partition(const Scenario& s, Metrics& m) {
    using namespace partition;
    const PartitionSpec& p = *s.partition;
    CalibrationFixture fx;
    PipelineModel model;
    try {
        fx = load_fixture(p.fixture.string());
        if (p.model) {
            std::ifstream in(*p.model);
            model = model_from_json(json::parse(in));
        } else {
            auto cal = calibrate(fx);
            model = cal.model;
            m.add("partition.calibration.max_relative_error", cal.max_relative_error, "ratio");
            m.add("partition.calibration.feasible", cal.feasible ? 1.0 : 0.0, "bool");
        }
    } catch (const ModelError& e) {
        throw ScenarioError(file_of(s), 0, std::string("partition: ") + e.what());
    } catch (const json::exception& e) {
        throw ScenarioError(p.model ? p.model->string() : file_of(s), 0, e.what());
    }
    FrameStream stream = fx.stream;
    ResourceModel res = fx.resources;
    try {
        if (p.resolution) stream.resolution = parse_resolution(*p.resolution);
        if (p.fps) stream.fps = *p.fps;
        if (p.cpu_mhz) res.cpu_mhz = *p.cpu_mhz;
    } catch (const ModelError& e) {
        throw ScenarioError(file_of(s), 0, std::string("partition: ") + e.what());
    }
    std::map<std::string, double> usage;
    for (const auto& name : p.placements) {
        auto r = simulate(model, parse_placement(name), stream, res, fx.alerts, p.seed.value_or(fx.seed));
        const std::string pre = "partition." + name + ".";
        if (r.detected) {
            m.add(pre + "dtr", r.dtr, "ratio");
            m.add(pre + "t_detection_s", r.t_detection_s, "s");
        }
        m.add(pre + "detected", r.detected ? 1.0 : 0.0, "bool");
        m.add(pre + "cellular_mb", r.cellular_mb(), "MB");
        m.add(pre + "cloud_requests", static_cast<double>(r.cloud_requests), "count");
        usage[name] = r.cellular_mb();
    }
    if (usage.count("cloud") && usage.count("hybrid") && usage["hybrid"] > 0)
        m.add("partition.cloud_hybrid_usage_ratio", usage["cloud"] / usage["hybrid"], "ratio");
}

}  // namespace

Report run_scenario(const Scenario& s) {
    Report rep;
    rep.scenario = s.name;
    rep.seed = s.seed;
    rep.config = to_json(s);
    rep.timestamp = utc_timestamp();
    Metrics m;

    std::optional<RouteSetup> route;
    if (s.attack) {
        route = setup_route(s);
        rep.config["attack"]["resolved_route"] = route->route;
    }
    if (!s.principals.empty()) {
        vehicle::DrivingTrace trace;
        try {
            trace = s.trace ? vehicle::load_trace_file(s.trace->string())
                            : synthesize_trace(pathing::predict_profile(route->route, route->net, s.attack->options.profile));
        } catch (const vehicle::TraceError& e) {
            throw ScenarioError(s.trace ? s.trace->string() : file_of(s), e.line(), e.what());
        }
        json probe = json::object();
        run_gateway(s, trace, route, m, probe);
        rep.probe_summary = probe;
    }
    if (s.partition) run_partition(s, m);

    rep.metrics = std::move(m.rows);
    rep.expectations = check_expectations(s.expectations, rep.metrics);
    return rep;
}

}  // namespace smartcore::cli
