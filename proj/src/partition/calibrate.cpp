#include "smartcore/partition/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace smartcore::partition {

std::string to_string(Metric m) { return m == Metric::Dtr ? "dtr" : "cellular_mb"; }

Metric parse_metric(const std::string& s) {
    if (s == "dtr") return Metric::Dtr;
    if (s == "cellular_mb") return Metric::CellularMb;
    throw ModelError("unknown metric '" + s + "'");
}

CalibrationFixture fixture_from_json(const nlohmann::json& j) {
    CalibrationFixture f;
    try {
        f.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("stream")) f.stream = stream_from_json(j["stream"]);
        if (j.contains("resources")) f.resources = resources_from_json(j["resources"]);
        if (j.contains("alerts"))
            for (const auto& a : j["alerts"]) f.alerts.push_back(store::alert_from_json(a));
        else
            f.alerts = default_alerts();
        if (j.contains("initial")) f.initial = model_from_json(j["initial"]);
        f.tolerance = j.value("tolerance", f.tolerance);
        for (const auto& o : j.at("observations")) {
            Observation ob;
            ob.id = o.at("id").get<std::string>();
            ob.placement = parse_placement(o.at("placement").get<std::string>());
            ob.resolution = o.value("resolution", ob.resolution);
            ob.cpu_mhz = o.value("cpu_mhz", ob.cpu_mhz);
            ob.fps = o.value("fps", ob.fps);
            ob.metric = parse_metric(o.value("metric", std::string("dtr")));
            ob.value = o.at("value").get<double>();
            ob.abs_tolerance = o.value("abs_tolerance", ob.abs_tolerance);
            f.observations.push_back(ob);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ModelError(std::string("malformed calibration fixture: ") + e.what());
    }
    if (f.observations.empty()) throw ModelError("calibration fixture has no observations");
    return f;
}

CalibrationFixture load_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError("calibration fixture not found: " + path);
    try {
        return fixture_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
        throw ModelError(path + ": " + e.what());
    }
}

FrameStream observation_stream(const CalibrationFixture& f, const Observation& o) {
    FrameStream s = f.stream;
    s.resolution = parse_resolution(o.resolution);
    s.fps = o.fps;
    return s;
}

ResourceModel observation_resources(const CalibrationFixture& f, const Observation& o) {
    ResourceModel r = f.resources;
    r.cpu_mhz = o.cpu_mhz;
    return r;
}

namespace {

// Frames depend only on (resolution, fps) and the seed, never on the cost
// parameters, so they are generated once per distinct stream.
struct Workbench {
    const CalibrationFixture& fx;
    std::map<std::pair<std::string, double>, std::vector<FrameDescriptor>> frames;

    explicit Workbench(const CalibrationFixture& f) : fx(f) {
        for (const auto& o : f.observations) {
            auto key = std::make_pair(o.resolution, o.fps);
            if (!frames.count(key)) frames[key] = generate_frames(observation_stream(f, o), f.alerts, f.seed);
        }
    }

    double simulate_one(const PipelineModel& m, const Observation& o) const {
        auto r = simulate_frames(m, o.placement, observation_stream(fx, o), observation_resources(fx, o), fx.alerts,
                                 frames.at({o.resolution, o.fps}), false);
        if (o.metric == Metric::CellularMb) return r.cellular_mb();
        return r.detected ? r.dtr : 1e6;
    }

    std::vector<Residual> residuals(const PipelineModel& m) const {
        std::vector<Residual> out;
        for (const auto& o : fx.observations) {
            Residual r;
            r.id = o.id;
            r.observed = o.value;
            r.simulated = simulate_one(m, o);
            r.relative = o.value != 0.0;
            r.error = r.relative ? std::abs(r.simulated - o.value) / std::abs(o.value) : std::abs(r.simulated - o.value);
            r.within = r.relative ? r.error <= fx.tolerance : r.error <= o.abs_tolerance;
            out.push_back(r);
        }
        return out;
    }
};

// Residual vector in log-parameter space, with a faint pull toward the
// starting point so that directions the data cannot see stay put.
struct Objective {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const Workbench* bench;
    PipelineModel base;
    Eigen::VectorXd prior;
    double prior_weight = 1e-3;

    int inputs() const { return static_cast<int>(prior.size()); }
    int values() const { return static_cast<int>(bench->fx.observations.size() + prior.size()); }

    PipelineModel model_at(const Eigen::VectorXd& x) const {
        PipelineModel m = base;
        std::vector<double> v(static_cast<std::size_t>(x.size()));
        for (Eigen::Index i = 0; i < x.size(); ++i) v[static_cast<std::size_t>(i)] = std::exp(x[i]);
        set_fitted(m, v);
        m.calibrated = true;
        return m;
    }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
        PipelineModel m = model_at(x);
        const auto& obs = bench->fx.observations;
        for (std::size_t i = 0; i < obs.size(); ++i) {
            double sim = bench->simulate_one(m, obs[i]);
            double scale = obs[i].value != 0.0 ? std::abs(obs[i].value) : 1.0;
            fvec[static_cast<Eigen::Index>(i)] = (sim - obs[i].value) / scale;
        }
        for (Eigen::Index k = 0; k < x.size(); ++k)
            fvec[static_cast<Eigen::Index>(obs.size()) + k] = prior_weight * (x[k] - prior[k]);
        return 0;
    }
};

}  // namespace

std::vector<Residual> evaluate(const PipelineModel& model, const CalibrationFixture& fixture) {
    Workbench bench(fixture);
    return bench.residuals(model);
}

CalibrationResult calibrate(const CalibrationFixture& fixture) {
    Workbench bench(fixture);
    std::vector<double> start = get_fitted(fixture.initial);
    Eigen::VectorXd x(static_cast<Eigen::Index>(start.size()));
    for (std::size_t i = 0; i < start.size(); ++i)
        x[static_cast<Eigen::Index>(i)] = std::log(std::max(start[i], 1e-9));

    Objective obj{&bench, fixture.initial, x};
    Eigen::NumericalDiff<Objective> diff(obj);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Objective>> lm(diff);
    lm.parameters.maxfev = 4000;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-12;
    lm.minimize(x);

    CalibrationResult res;
    res.model = obj.model_at(x);
    res.iterations = static_cast<int>(lm.iter);
    res.residuals = bench.residuals(res.model);
    res.feasible = true;
    for (const auto& r : res.residuals) {
        if (r.relative) res.max_relative_error = std::max(res.max_relative_error, r.error);
        res.feasible = res.feasible && r.within;
    }
    return res;
}

nlohmann::json to_json(const CalibrationResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& x : r.residuals)
        rows.push_back({{"id", x.id},
                        {"observed", x.observed},
                        {"simulated", x.simulated},
                        {"error", x.error},
                        {"error_kind", x.relative ? "relative" : "absolute"},
                        {"within", x.within}});
    return {{"model", to_json(r.model)},
            {"residuals", rows},
            {"max_relative_error", r.max_relative_error},
            {"iterations", r.iterations},
            {"feasible", r.feasible}};
}

}  // namespace smartcore::partition
