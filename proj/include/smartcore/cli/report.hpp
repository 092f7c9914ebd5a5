#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartcore/cli/scenario.hpp"

namespace smartcore::cli {

inline constexpr int kReportSchemaVersion = 1;

struct MetricRow {
    std::string metric;
    double value = 0.0;
    std::string unit;
};

struct ExpectationResult {
    Expectation expectation;
    std::optional<double> actual;
    std::optional<double> bound;  // value, or factor * ref
    bool passed = false;
    std::string detail;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 0;
    nlohmann::json config;
    std::vector<MetricRow> metrics;
    nlohmann::json probe_summary = nlohmann::json::object();
    std::vector<ExpectationResult> expectations;
    std::string timestamp;  // ISO 8601 UTC; the only field that varies between identical runs

    const MetricRow* find(const std::string& metric) const;
    bool passed() const;
};

/// Evaluates every expectation exactly once against the report's metrics.
std::vector<ExpectationResult> check_expectations(const std::vector<Expectation>& expectations,
                                                  const std::vector<MetricRow>& metrics);

nlohmann::json to_json(const Report& r);
std::string render_text(const Report& r);
std::string utc_timestamp();

/// Runs every section the scenario declares and evaluates its expectations.
/// Deterministic for a given scenario and seed apart from the timestamp.
Report run_scenario(const Scenario& scenario);

}  // namespace smartcore::cli
