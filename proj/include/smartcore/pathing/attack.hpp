#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "smartcore/pathing/profile.hpp"
#include "smartcore/pathing/road_network.hpp"

namespace smartcore::pathing {

struct AttackOptions {
    std::size_t beam_width = 32;  // 0 = unbounded (exhaustive)
    /// Paths whose length is within this fraction of the trace's integrated
    /// distance are accepted as complete hypotheses.
    double distance_slack = 0.05;
    double low_speed_kmh = 2.0;
    ProfileOptions profile;
};

struct GroundTruth {
    NodeId destination = 0;
    double travelled_m = 0.0;
};

struct AttackResult {
    NodeId estimated_destination = 0;
    std::vector<NodeId> best_path;
    double score = 0.0;  // aligned RMSE, km/h
    double distance_budget_m = 0.0;
    std::size_t hypotheses = 0;

    std::optional<NodeId> actual_destination;
    double travelled_m = 0.0;
    std::optional<double> error_ratio;
};

/// Straight-line distance between the two nodes over the distance actually
/// travelled. Throws std::invalid_argument unless travelled > 0.
double attack_error(const RoadNetwork& net, NodeId estimated, NodeId actual, double travelled_m);

/// Score of a complete hypothesis: the trip ends at rest at the last node.
double score_path(std::span<const double> trace, const std::vector<NodeId>& path, const RoadNetwork& net,
                  const AttackOptions& opts);

/// Score of a partial hypothesis against the trace prefix covering the
/// same distance; used only to rank the beam.
double score_prefix(std::span<const double> trace, const std::vector<NodeId>& path, const RoadNetwork& net,
                    const AttackOptions& opts);

/// Ranking used everywhere: lower score, then fewer nodes, then
/// lexicographically smaller node sequence.
bool better(double score_a, const std::vector<NodeId>& a, double score_b, const std::vector<NodeId>& b);

/// Beam search over simple paths leaving `origin`. A path is extended while
/// its length is below D(1 + slack) where D is the trace's integrated
/// distance; every path reaching D(1 - slack), and every dead end short of
/// it, is a complete hypothesis. Only the extendable frontier is pruned to
/// the beam width. Returns the best complete hypothesis (the origin itself
/// when there is none). An empty trace throws std::invalid_argument.
AttackResult estimate_destination(std::span<const double> trace, NodeId origin, const RoadNetwork& net,
                                  const AttackOptions& opts = {},
                                  std::optional<GroundTruth> truth = std::nullopt);

}  // namespace smartcore::pathing
