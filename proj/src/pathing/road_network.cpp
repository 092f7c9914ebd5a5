#include "smartcore/pathing/road_network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "smartcore/privacy/transform.hpp"

namespace smartcore::pathing {

RoadNetwork::RoadNetwork(std::vector<Node> nodes, std::vector<Edge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!index_.emplace(nodes_[i].id, i).second)
            throw NetworkError("duplicate node id " + std::to_string(nodes_[i].id));
    }
    adj_.resize(nodes_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        std::string name = "edge " + std::to_string(ed.a) + "-" + std::to_string(ed.b);
        if (!contains(ed.a) || !contains(ed.b)) throw NetworkError(name + " references an unknown node");
        if (ed.a == ed.b) throw NetworkError(name + " is a self-loop");
        if (!(ed.len_m > 0.0)) throw NetworkError(name + " must have positive length");
        if (!(ed.limit_kmh > 0.0)) throw NetworkError(name + " must have a positive speed limit");
        if (edge_between(ed.a, ed.b)) throw NetworkError(name + " is duplicated");
        adj_[index_.at(ed.a)].push_back({ed.b, e});
        adj_[index_.at(ed.b)].push_back({ed.a, e});
    }
    for (auto& list : adj_)
        std::sort(list.begin(), list.end(), [](const Adjacent& l, const Adjacent& r) { return l.to < r.to; });

    if (nodes_.empty()) return;
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
        std::size_t i = stack.back();
        stack.pop_back();
        for (const auto& a : adj_[i]) {
            std::size_t j = index_.at(a.to);
            if (!seen[j]) {
                seen[j] = true;
                ++reached;
                stack.push_back(j);
            }
        }
    }
    if (reached != nodes_.size())
        throw NetworkError("network is disconnected: " + std::to_string(reached) + " of " +
                           std::to_string(nodes_.size()) + " nodes reachable");
}

const Node& RoadNetwork::node(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NetworkError("unknown node " + std::to_string(id));
    return nodes_[it->second];
}

const std::vector<RoadNetwork::Adjacent>& RoadNetwork::neighbors(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw NetworkError("unknown node " + std::to_string(id));
    return adj_[it->second];
}

std::optional<std::size_t> RoadNetwork::edge_between(NodeId a, NodeId b) const {
    auto it = index_.find(a);
    if (it == index_.end() || it->second >= adj_.size()) return std::nullopt;
    for (const auto& n : adj_[it->second])
        if (n.to == b) return n.edge;
    return std::nullopt;
}

double RoadNetwork::distance(NodeId a, NodeId b) const {
    const Node& p = node(a);
    const Node& q = node(b);
    return std::hypot(p.x - q.x, p.y - q.y);
}

double RoadNetwork::path_length(const std::vector<NodeId>& path) const {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        auto e = edge_between(path[i - 1], path[i]);
        if (!e)
            throw NetworkError("path is disconnected between " + std::to_string(path[i - 1]) + " and " +
                               std::to_string(path[i]));
        len += edges_[*e].len_m;
    }
    return len;
}

RoadNetwork network_from_json(const nlohmann::json& j) {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    for (const auto& n : j.at("nodes"))
        nodes.push_back({n.at("id").get<int>(), n.at("x").get<double>(), n.at("y").get<double>(),
                         n.value("stop", false)});
    for (const auto& e : j.at("edges")) {
        Edge ed{e.at("a").get<int>(), e.at("b").get<int>(), 0.0, e.at("limit_kmh").get<double>()};
        ed.len_m = e.contains("len_m") ? e["len_m"].get<double>() : 0.0;
        edges.push_back(ed);
    }
    // Missing lengths default to the straight-line distance.
    std::map<int, std::pair<double, double>> at;
    for (const auto& n : nodes) at[n.id] = {n.x, n.y};
    for (auto& e : edges) {
        if (e.len_m == 0.0 && at.count(e.a) && at.count(e.b))
            e.len_m = std::hypot(at[e.a].first - at[e.b].first, at[e.a].second - at[e.b].second);
    }
    return RoadNetwork(std::move(nodes), std::move(edges));
}

nlohmann::json to_json(const RoadNetwork& n) {
    nlohmann::json nodes = nlohmann::json::array(), edges = nlohmann::json::array();
    for (const auto& v : n.nodes()) nodes.push_back({{"id", v.id}, {"x", v.x}, {"y", v.y}, {"stop", v.stop}});
    for (const auto& e : n.edges())
        edges.push_back({{"a", e.a}, {"b", e.b}, {"len_m", e.len_m}, {"limit_kmh", e.limit_kmh}});
    return {{"nodes", nodes}, {"edges", edges}};
}

RoadNetwork load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NetworkError("cannot open network file " + path);
    try {
        return network_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw NetworkError(path + ": " + e.what());
    }
}

RoadNetwork line_network(int n, double spacing_m, double limit_kmh) {
    if (n < 1) throw NetworkError("line network needs at least one node");
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) nodes.push_back({i, i * spacing_m, 0.0, false});
    for (int i = 1; i < n; ++i) edges.push_back({i - 1, i, spacing_m, limit_kmh});
    return RoadNetwork(std::move(nodes), std::move(edges));
}

RoadNetwork random_grid(const GridOptions& o, std::uint64_t seed) {
    if (o.rows < 1 || o.cols < 1) throw NetworkError("grid needs at least one row and column");
    privacy::Rng rng(seed);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.unit(); };

    std::vector<double> xs{0.0}, ys{0.0};
    for (int c = 1; c < o.cols; ++c) xs.push_back(xs.back() + uniform(o.min_block_m, o.max_block_m));
    for (int r = 1; r < o.rows; ++r) ys.push_back(ys.back() + uniform(o.min_block_m, o.max_block_m));

    std::vector<Node> nodes;
    for (int r = 0; r < o.rows; ++r)
        for (int c = 0; c < o.cols; ++c)
            nodes.push_back({r * o.cols + c, xs[c], ys[r], rng.unit() < o.stop_probability});

    // Limits come in 10 km/h steps, per street (row or column), like real signage.
    auto limit = [&] {
        int steps = static_cast<int>(std::floor((o.max_limit_kmh - o.min_limit_kmh) / 10.0)) + 1;
        return o.min_limit_kmh + 10.0 * static_cast<double>(rng.below(static_cast<std::uint64_t>(steps)));
    };
    std::vector<Edge> edges;
    for (int r = 0; r < o.rows; ++r) {
        double lim = limit();
        for (int c = 1; c < o.cols; ++c) edges.push_back({r * o.cols + c - 1, r * o.cols + c, xs[c] - xs[c - 1], lim});
    }
    for (int c = 0; c < o.cols; ++c) {
        double lim = limit();
        for (int r = 1; r < o.rows; ++r)
            edges.push_back({(r - 1) * o.cols + c, r * o.cols + c, ys[r] - ys[r - 1], lim});
    }
    return RoadNetwork(std::move(nodes), std::move(edges));
}

}  // namespace smartcore::pathing
