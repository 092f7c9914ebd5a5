#include "smartcore/cli/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "smartcore/policy/policy_io.hpp"

namespace smartcore::cli {

namespace fs = std::filesystem;
using nlohmann::json;

ScenarioError::ScenarioError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(file + (line ? ":" + std::to_string(line) : std::string()) + ": " + what),
      file_(file),
      line_(line) {}

namespace {

// Semantic error inside the document; `where` is a dotted key path that the
// loader maps back to a line.
struct Invalid {
    std::string where;
    std::string message;
};

[[noreturn]] void invalid(const std::string& where, const std::string& message) { throw Invalid{where, message}; }

std::string join(const std::string& prefix, const std::string& key) { return prefix.empty() ? key : prefix + "." + key; }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) invalid(where, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j.items())
        if (!ok.count(k)) invalid(join(where, k), "unknown key '" + k + "'");
}

template <typename T>
T get(const json& j, const char* key, const std::string& where, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        invalid(join(where, key), "wrong type for '" + std::string(key) + "'");
    }
}

template <typename T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) invalid(where.empty() ? key : where, "missing required key '" + std::string(key) + "'");
    return get<T>(j, key, where, T{});
}

double positive(double v, const std::string& where, const std::string& what) {
    if (!(v > 0.0)) invalid(where, what + " must be positive");
    return v;
}

fs::path existing(const fs::path& base, const std::string& rel, const std::string& where) {
    fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base / rel;
    if (!fs::exists(p)) invalid(where, "referenced file does not exist: " + p.string());
    return p.lexically_normal();
}

obd::Pid pid_at(const json& j, const char* key, const std::string& where) {
    try {
        return obd::parse_pid(require<std::string>(j, key, where));
    } catch (const obd::ObdError& e) {
        invalid(join(where, key), e.what());
    }
}

vehicle::VehicleProfile vehicle_from(const json& j, const std::string& where) {
    allow_keys(j, where, {"vin", "make", "model", "supported_pids", "quirks", "constants", "initial_odometer_km"});
    vehicle::VehicleProfile v;
    v.vin = get<std::string>(j, "vin", where, v.vin);
    v.make = get<std::string>(j, "make", where, v.make);
    v.model = get<std::string>(j, "model", where, v.model);
    for (const auto& s : get<std::vector<std::string>>(j, "supported_pids", where, {})) {
        try {
            v.supported_pids.insert(obd::parse_pid(s).code);
        } catch (const obd::ObdError& e) {
            invalid(join(where, "supported_pids"), e.what());
        }
    }
    v.quirks = get<std::vector<std::string>>(j, "quirks", where, {});
    if (j.contains("constants")) {
        for (const auto& [k, val] : j["constants"].items()) {
            if (!val.is_number()) invalid(join(where, "constants"), "constant for " + k + " must be a number");
            try {
                v.constants[obd::parse_pid(k).code] = val.get<double>();
            } catch (const obd::ObdError& e) {
                invalid(join(where, "constants"), e.what());
            }
        }
    }
    v.initial_odometer_km = get<double>(j, "initial_odometer_km", where, 0.0);
    return v;
}

PrincipalSpec principal_from(const json& j, const std::string& where) {
    allow_keys(j, where, {"id", "kind", "profile", "token", "rate_limit", "blocked", "workload"});
    PrincipalSpec p;
    p.id = require<std::string>(j, "id", where);
    if (p.id.empty()) invalid(join(where, "id"), "principal id must not be empty");
    try {
        p.kind = policy::parse_principal_kind(get<std::string>(j, "kind", where, "dongle"));
    } catch (const std::exception& e) {
        invalid(join(where, "kind"), e.what());
    }
    p.profile = get<std::string>(j, "profile", where, "");
    p.token = get<std::string>(j, "token", where, "");
    if (j.contains("rate_limit")) p.rate_limit = positive(get<double>(j, "rate_limit", where, 0.0), join(where, "rate_limit"), "rate_limit");
    p.blocked = get<bool>(j, "blocked", where, false);
    if (j.contains("workload")) {
        const json& w = j["workload"];
        if (!w.is_array()) invalid(join(where, "workload"), "expected an array");
        for (std::size_t i = 0; i < w.size(); ++i) {
            std::string at = join(where, "workload");
            allow_keys(w[i], at, {"pid", "rate_hz", "start_s", "stop_s"});
            Workload wl;
            wl.pid = pid_at(w[i], "pid", at);
            wl.rate_hz = positive(get<double>(w[i], "rate_hz", at, 1.0), join(at, "rate_hz"), "rate_hz");
            wl.start_s = get<double>(w[i], "start_s", at, 0.0);
            if (w[i].contains("stop_s")) wl.stop_s = get<double>(w[i], "stop_s", at, 0.0);
            p.workload.push_back(wl);
        }
    }
    return p;
}

PrivacySpec privacy_from(const json& j, const std::string& where, std::uint64_t seed) {
    allow_keys(j, where, {"principal", "alg", "W", "p", "R_uniform", "seed", "threshold_kmh"});
    PrivacySpec s;
    s.principal = require<std::string>(j, "principal", where);
    json cfg = j;
    cfg.erase("principal");
    cfg.erase("threshold_kmh");
    if (!cfg.contains("seed")) cfg["seed"] = seed;
    try {
        s.config = policy::privacy_config_from_json(cfg);
        s.config.validate();
    } catch (const std::exception& e) {
        invalid(where, e.what());
    }
    s.threshold_kmh = get<double>(j, "threshold_kmh", where, 0.0);
    return s;
}

AttackSpec attack_from(const json& j, const std::string& where, const fs::path& base) {
    allow_keys(j, where, {"principal", "network", "grid", "route", "route_edges", "beam_width", "distance_slack",
                          "low_speed_kmh", "accel_mps2", "stop_dwell_s"});
    AttackSpec a;
    a.principal = require<std::string>(j, "principal", where);
    if (j.contains("network") && j.contains("grid")) invalid(where, "give either 'network' or 'grid', not both");
    if (j.contains("network")) a.network_file = existing(base, get<std::string>(j, "network", where, ""), join(where, "network"));
    if (j.contains("grid")) {
        std::string g = join(where, "grid");
        const json& gj = j["grid"];
        allow_keys(gj, g, {"rows", "cols", "min_block_m", "max_block_m", "min_limit_kmh", "max_limit_kmh",
                           "stop_probability", "seed"});
        a.grid.rows = get<int>(gj, "rows", g, a.grid.rows);
        a.grid.cols = get<int>(gj, "cols", g, a.grid.cols);
        a.grid.min_block_m = get<double>(gj, "min_block_m", g, a.grid.min_block_m);
        a.grid.max_block_m = get<double>(gj, "max_block_m", g, a.grid.max_block_m);
        a.grid.min_limit_kmh = get<double>(gj, "min_limit_kmh", g, a.grid.min_limit_kmh);
        a.grid.max_limit_kmh = get<double>(gj, "max_limit_kmh", g, a.grid.max_limit_kmh);
        a.grid.stop_probability = get<double>(gj, "stop_probability", g, a.grid.stop_probability);
        a.grid_seed = get<std::uint64_t>(gj, "seed", g, a.grid_seed);
    }
    a.route = get<std::vector<pathing::NodeId>>(j, "route", where, {});
    if (a.route.size() == 1) invalid(join(where, "route"), "a route needs at least two nodes");
    a.route_edges = get<int>(j, "route_edges", where, a.route_edges);
    if (a.route_edges < 1) invalid(join(where, "route_edges"), "route_edges must be at least 1");
    a.options.beam_width = get<std::size_t>(j, "beam_width", where, a.options.beam_width);
    a.options.distance_slack = get<double>(j, "distance_slack", where, a.options.distance_slack);
    a.options.low_speed_kmh = get<double>(j, "low_speed_kmh", where, a.options.low_speed_kmh);
    a.options.profile.accel_mps2 = get<double>(j, "accel_mps2", where, a.options.profile.accel_mps2);
    a.options.profile.stop_dwell_s = get<double>(j, "stop_dwell_s", where, a.options.profile.stop_dwell_s);
    return a;
}

PartitionSpec partition_from(const json& j, const std::string& where, const fs::path& base) {
    allow_keys(j, where, {"fixture", "model", "placements", "resolution", "cpu_mhz", "fps", "seed"});
    PartitionSpec p;
    p.fixture = existing(base, require<std::string>(j, "fixture", where), join(where, "fixture"));
    if (j.contains("model")) p.model = existing(base, get<std::string>(j, "model", where, ""), join(where, "model"));
    p.placements = get<std::vector<std::string>>(j, "placements", where, p.placements);
    if (p.placements.empty()) invalid(join(where, "placements"), "at least one placement is required");
    for (const auto& s : p.placements)
        if (s != "cloud" && s != "smartcore" && s != "hybrid")
            invalid(join(where, "placements"), "unknown placement '" + s + "'");
    if (j.contains("resolution")) p.resolution = get<std::string>(j, "resolution", where, "");
    if (j.contains("cpu_mhz")) p.cpu_mhz = positive(get<double>(j, "cpu_mhz", where, 0.0), join(where, "cpu_mhz"), "cpu_mhz");
    if (j.contains("fps")) p.fps = positive(get<double>(j, "fps", where, 0.0), join(where, "fps"), "fps");
    if (j.contains("seed")) p.seed = get<std::uint64_t>(j, "seed", where, 0);
    return p;
}

Expectation expectation_from(const json& j, const std::string& where) {
    allow_keys(j, where, {"metric", "op", "value", "ref", "factor", "rel_tol"});
    Expectation e;
    e.metric = require<std::string>(j, "metric", where);
    e.op = get<std::string>(j, "op", where, e.op);
    static const std::set<std::string> ops{"<", "<=", ">", ">=", "==", "approx"};
    if (!ops.count(e.op)) invalid(join(where, "op"), "unknown operator '" + e.op + "'");
    if (j.contains("value") == j.contains("ref")) invalid(where, "give exactly one of 'value' or 'ref'");
    e.value = get<double>(j, "value", where, 0.0);
    if (j.contains("ref")) e.ref = get<std::string>(j, "ref", where, "");
    e.factor = get<double>(j, "factor", where, 1.0);
    e.rel_tol = get<double>(j, "rel_tol", where, e.rel_tol);
    return e;
}

// Best-effort line of a dotted key path: each segment is searched as a
// quoted key after the previous one.
std::size_t line_of(const std::string& text, const std::string& where) {
    std::size_t pos = 0;
    bool found = false;
    std::stringstream ss(where);
    std::string seg;
    while (std::getline(ss, seg, '.')) {
        auto at = text.find("\"" + seg + "\"", pos);
        if (at == std::string::npos) break;
        pos = at;
        found = true;
    }
    if (!found) return 0;
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n')) + 1;
}

std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n')) + 1;
}

}  // namespace

namespace {

Scenario parse(const json& j, const fs::path& base_dir, const std::string& file) {
    {
        allow_keys(j, "", {"name", "description", "seed", "duration_s", "trace", "vehicle", "events", "events_file",
                           "gateway", "principals", "policies", "privacy", "attack", "partition", "expectations"});
        Scenario s;
        s.source = file;
        s.name = require<std::string>(j, "name", "");
        s.description = get<std::string>(j, "description", "", "");
        s.seed = get<std::uint64_t>(j, "seed", "", 0);
        s.duration_s = positive(get<double>(j, "duration_s", "", s.duration_s), "duration_s", "duration_s");
        if (j.contains("trace")) s.trace = existing(base_dir, get<std::string>(j, "trace", "", ""), "trace");
        if (j.contains("vehicle")) s.vehicle = vehicle_from(j["vehicle"], "vehicle");
        if (j.contains("events")) {
            try {
                s.events = vehicle::parse_events(j["events"].dump());
            } catch (const std::exception& e) {
                invalid("events", e.what());
            }
        }
        if (j.contains("events_file"))
            s.events_file = existing(base_dir, get<std::string>(j, "events_file", "", ""), "events_file");
        if (j.contains("gateway")) {
            const json& g = j["gateway"];
            allow_keys(g, "gateway", {"service_time_ms", "overhead_ms", "queue_capacity"});
            s.gateway.service_time_ms = positive(get<double>(g, "service_time_ms", "gateway", 10.0),
                                                 "gateway.service_time_ms", "service_time_ms");
            s.gateway.overhead_ms = get<double>(g, "overhead_ms", "gateway", 0.0);
            if (s.gateway.overhead_ms < 0) invalid("gateway.overhead_ms", "overhead_ms must not be negative");
            s.gateway.queue_capacity = get<std::size_t>(g, "queue_capacity", "gateway", 1024);
            if (s.gateway.queue_capacity == 0) invalid("gateway.queue_capacity", "queue_capacity must be positive");
        }
        std::set<std::string> ids;
        if (j.contains("principals")) {
            if (!j["principals"].is_array()) invalid("principals", "expected an array");
            for (const auto& pj : j["principals"]) {
                auto p = principal_from(pj, "principals");
                if (!ids.insert(p.id).second) invalid("principals", "duplicate principal '" + p.id + "'");
                s.principals.push_back(std::move(p));
            }
        }
        if (j.contains("policies")) {
            const json& pj = j["policies"];
            std::vector<std::string> files;
            if (pj.is_string())
                files.push_back(pj.get<std::string>());
            else
                files = get<std::vector<std::string>>(j, "policies", "", {});
            for (const auto& f : files) s.policy_files.push_back(existing(base_dir, f, "policies"));
        }
        if (j.contains("privacy")) {
            s.privacy = privacy_from(j["privacy"], "privacy", s.seed);
            if (!ids.count(s.privacy->principal))
                invalid("privacy.principal", "unknown principal '" + s.privacy->principal + "'");
        }
        if (j.contains("attack")) {
            s.attack = attack_from(j["attack"], "attack", base_dir);
            if (!ids.count(s.attack->principal))
                invalid("attack.principal", "unknown principal '" + s.attack->principal + "'");
        }
        if (j.contains("partition")) s.partition = partition_from(j["partition"], "partition", base_dir);
        if (j.contains("expectations")) {
            if (!j["expectations"].is_array()) invalid("expectations", "expected an array");
            for (const auto& e : j["expectations"]) s.expectations.push_back(expectation_from(e, "expectations"));
        }
        if (!s.principals.empty() && !s.trace && !s.attack)
            invalid("trace", "principals need a trace (or an attack route to synthesize one)");
        return s;
    }
}

std::string message(const Invalid& e) { return (e.where.empty() ? "" : e.where + ": ") + e.message; }

}  // namespace

Scenario scenario_from_json(const json& j, const fs::path& base_dir, const std::string& file) {
    try {
        return parse(j, base_dir, file);
    } catch (const Invalid& e) {
        throw ScenarioError(file, line_of(j.dump(2), e.where), message(e));
    }
}

Scenario load_scenario(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path.string(), 0, "cannot open scenario file");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string(), line_of_byte(text, e.byte), e.what());
    }
    try {
        return parse(j, path.parent_path(), path.string());
    } catch (const Invalid& e) {
        throw ScenarioError(path.string(), line_of(text, e.where), message(e));
    }
}

json to_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    if (!s.description.empty()) j["description"] = s.description;
    j["seed"] = s.seed;
    j["duration_s"] = s.duration_s;
    if (s.trace) j["trace"] = s.trace->filename().string();
    json v = {{"vin", s.vehicle.vin}, {"make", s.vehicle.make}, {"model", s.vehicle.model},
              {"quirks", s.vehicle.quirks}, {"initial_odometer_km", s.vehicle.initial_odometer_km}};
    json sup = json::array();
    for (auto c : s.vehicle.supported_pids) sup.push_back(obd::to_string(obd::live(c)));
    v["supported_pids"] = sup;
    json consts = json::object();
    for (const auto& [c, val] : s.vehicle.constants) consts[obd::to_string(obd::live(c))] = val;
    v["constants"] = consts;
    j["vehicle"] = v;
    json ev = json::array();
    for (const auto& e : s.events) ev.push_back({{"kind", vehicle::to_string(e.kind)}, {"at", e.at}});
    j["events"] = ev;
    if (s.events_file) j["events_file"] = s.events_file->filename().string();
    j["gateway"] = {{"service_time_ms", s.gateway.service_time_ms},
                    {"overhead_ms", s.gateway.overhead_ms},
                    {"queue_capacity", s.gateway.queue_capacity}};
    json ps = json::array();
    for (const auto& p : s.principals) {
        json pj = {{"id", p.id}, {"kind", policy::to_string(p.kind)}, {"profile", p.profile}, {"blocked", p.blocked}};
        pj["rate_limit"] = p.rate_limit ? json(*p.rate_limit) : json(nullptr);
        json w = json::array();
        for (const auto& wl : p.workload) {
            json x = {{"pid", obd::to_string(wl.pid)}, {"rate_hz", wl.rate_hz}, {"start_s", wl.start_s}};
            x["stop_s"] = wl.stop_s ? json(*wl.stop_s) : json(nullptr);
            w.push_back(x);
        }
        pj["workload"] = w;
        ps.push_back(pj);
    }
    j["principals"] = ps;
    json pf = json::array();
    for (const auto& p : s.policy_files) pf.push_back(p.filename().string());
    j["policies"] = pf;
    if (s.privacy) {
        json pj = policy::to_json(s.privacy->config);
        pj["principal"] = s.privacy->principal;
        pj["threshold_kmh"] = s.privacy->threshold_kmh;
        j["privacy"] = pj;
    }
    if (s.attack) {
        const auto& a = *s.attack;
        json aj = {{"principal", a.principal},
                   {"route", a.route},
                   {"route_edges", a.route_edges},
                   {"beam_width", a.options.beam_width},
                   {"distance_slack", a.options.distance_slack},
                   {"low_speed_kmh", a.options.low_speed_kmh},
                   {"accel_mps2", a.options.profile.accel_mps2},
                   {"stop_dwell_s", a.options.profile.stop_dwell_s}};
        if (a.network_file)
            aj["network"] = a.network_file->filename().string();
        else
            aj["grid"] = {{"rows", a.grid.rows},
                          {"cols", a.grid.cols},
                          {"min_block_m", a.grid.min_block_m},
                          {"max_block_m", a.grid.max_block_m},
                          {"min_limit_kmh", a.grid.min_limit_kmh},
                          {"max_limit_kmh", a.grid.max_limit_kmh},
                          {"stop_probability", a.grid.stop_probability},
                          {"seed", a.grid_seed}};
        j["attack"] = aj;
    }
    if (s.partition) {
        const auto& p = *s.partition;
        json pj = {{"fixture", p.fixture.filename().string()}, {"placements", p.placements}};
        pj["model"] = p.model ? json(p.model->filename().string()) : json(nullptr);
        if (p.resolution) pj["resolution"] = *p.resolution;
        if (p.cpu_mhz) pj["cpu_mhz"] = *p.cpu_mhz;
        if (p.fps) pj["fps"] = *p.fps;
        if (p.seed) pj["seed"] = *p.seed;
        j["partition"] = pj;
    }
    json ex = json::array();
    for (const auto& e : s.expectations) {
        json x = {{"metric", e.metric}, {"op", e.op}};
        if (e.ref) {
            x["ref"] = *e.ref;
            x["factor"] = e.factor;
        } else {
            x["value"] = e.value;
        }
        if (e.op == "approx") x["rel_tol"] = e.rel_tol;
        ex.push_back(x);
    }
    j["expectations"] = ex;
    return j;
}

}  // namespace smartcore::cli
