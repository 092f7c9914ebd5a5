#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartcore/partition/pipeline.hpp"
#include "smartcore/partition/simulate.hpp"

namespace smartcore::partition {

enum class Metric { Dtr, CellularMb };
std::string to_string(Metric m);
Metric parse_metric(const std::string& s);

/// One published measurement the model has to reproduce.
struct Observation {
    std::string id;
    PlacementKind placement = PlacementKind::Cloud;
    std::string resolution = "720p";
    double cpu_mhz = 600.0;
    double fps = 1.0;
    Metric metric = Metric::Dtr;
    double value = 0.0;
    /// Zero-valued targets are compared absolutely (relative error is
    /// undefined); this is the allowed absolute gap in the metric's unit.
    double abs_tolerance = 0.05;
};

struct CalibrationFixture {
    std::uint64_t seed = 0;
    FrameStream stream;        // resolution and fps are overridden per observation
    ResourceModel resources;   // cpu_mhz is overridden per observation
    std::vector<store::AlertRecord> alerts;
    std::vector<Observation> observations;
    PipelineModel initial;     // starting point of the fit
    double tolerance = 0.05;   // max relative error per observation
};

CalibrationFixture fixture_from_json(const nlohmann::json& j);
CalibrationFixture load_fixture(const std::string& path);  // throws ModelError if missing or malformed

struct Residual {
    std::string id;
    double observed = 0.0;
    double simulated = 0.0;
    double error = 0.0;     // relative, or absolute for zero targets
    bool relative = true;
    bool within = false;
};

struct CalibrationResult {
    PipelineModel model;
    std::vector<Residual> residuals;
    double max_relative_error = 0.0;
    int iterations = 0;
    bool feasible = false;  // every residual within tolerance
};

nlohmann::json to_json(const CalibrationResult& r);

/// Stream and resources an observation is evaluated under.
FrameStream observation_stream(const CalibrationFixture& f, const Observation& o);
ResourceModel observation_resources(const CalibrationFixture& f, const Observation& o);

/// Evaluates a model against every observation without fitting.
std::vector<Residual> evaluate(const PipelineModel& model, const CalibrationFixture& fixture);

/// Least-squares fit of the cost parameters (Levenberg-Marquardt in log
/// space, which keeps every cost positive). Deterministic for a fixture.
/// An infeasible fit is returned with feasible = false, not thrown.
CalibrationResult calibrate(const CalibrationFixture& fixture);

}  // namespace smartcore::partition
