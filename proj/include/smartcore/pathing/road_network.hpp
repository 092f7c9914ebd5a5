#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace smartcore::pathing {

using NodeId = int;

struct Node {
    NodeId id = 0;
    double x = 0.0;  // metres, planar
    double y = 0.0;
    bool stop = false;  // stop sign / signal: vehicles come to rest here
};

struct Edge {
    NodeId a = 0;
    NodeId b = 0;
    double len_m = 0.0;
    double limit_kmh = 0.0;
};

class NetworkError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Undirected road graph. Neighbour lists are sorted by node id so every
/// traversal is deterministic.
class RoadNetwork {
public:
    RoadNetwork() = default;
    /// Throws NetworkError on duplicate ids, dangling or non-positive edges,
    /// or a disconnected graph.
    RoadNetwork(std::vector<Node> nodes, std::vector<Edge> edges);

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    bool contains(NodeId id) const { return index_.count(id) > 0; }
    const Node& node(NodeId id) const;

    struct Adjacent {
        NodeId to;
        std::size_t edge;
    };
    const std::vector<Adjacent>& neighbors(NodeId id) const;
    std::optional<std::size_t> edge_between(NodeId a, NodeId b) const;

    /// Straight-line distance between two nodes.
    double distance(NodeId a, NodeId b) const;
    /// Sum of edge lengths along a node sequence; throws on a missing edge.
    double path_length(const std::vector<NodeId>& path) const;

private:
    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<NodeId, std::size_t> index_;
    std::vector<std::vector<Adjacent>> adj_;
};

RoadNetwork network_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RoadNetwork& n);
RoadNetwork load_network(const std::string& path);

/// n nodes on a straight road, no branches.
RoadNetwork line_network(int n, double spacing_m, double limit_kmh);

struct GridOptions {
    int rows = 4;
    int cols = 4;
    double min_block_m = 300.0;
    double max_block_m = 900.0;
    double min_limit_kmh = 50.0;
    double max_limit_kmh = 70.0;
    double stop_probability = 0.4;
};

/// Irregular grid: block lengths, limits and stop flags drawn from the seed.
RoadNetwork random_grid(const GridOptions& opts, std::uint64_t seed);

}  // namespace smartcore::pathing
