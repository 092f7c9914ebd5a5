#include "smartcore/pathing/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace smartcore::pathing {

double attack_error(const RoadNetwork& net, NodeId estimated, NodeId actual, double travelled_m) {
    if (!(travelled_m > 0.0)) throw std::invalid_argument("travelled distance must be positive");
    return net.distance(estimated, actual) / travelled_m;
}

double score_path(std::span<const double> trace, const std::vector<NodeId>& path, const RoadNetwork& net,
                  const AttackOptions& opts) {
    ProfileOptions po = opts.profile;
    po.end_at_rest = true;
    auto prof = predict_profile(path, net, po);
    return aligned_rmse(trace, prof, opts.low_speed_kmh);
}

double score_prefix(std::span<const double> trace, const std::vector<NodeId>& path, const RoadNetwork& net,
                    const AttackOptions& opts) {
    ProfileOptions po = opts.profile;
    po.end_at_rest = false;
    auto prof = predict_profile(path, net, po);
    double len = net.path_length(path);
    const double hz = opts.profile.sample_hz;
    double covered = 0.0;
    std::size_t n = 1;
    while (n < trace.size() && covered < len) {
        covered += 0.5 * (trace[n - 1] + trace[n]) / 3.6 / hz;
        ++n;
    }
    return aligned_rmse(trace.subspan(0, n), prof, opts.low_speed_kmh);
}

bool better(double sa, const std::vector<NodeId>& a, double sb, const std::vector<NodeId>& b) {
    if (sa != sb) return sa < sb;
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

namespace {
struct Hypothesis {
    std::vector<NodeId> path;
    double len = 0.0;
    double score = 0.0;
};
}  // namespace

AttackResult estimate_destination(std::span<const double> trace, NodeId origin, const RoadNetwork& net,
                                  const AttackOptions& opts, std::optional<GroundTruth> truth) {
    if (trace.empty()) throw std::invalid_argument("cannot attack an empty trace");
    if (!net.contains(origin)) throw NetworkError("origin " + std::to_string(origin) + " is not in the network");

    const double budget = integrate_distance_m(trace, opts.profile.sample_hz);
    const double lo = budget * (1.0 - opts.distance_slack);
    const double hi = budget * (1.0 + opts.distance_slack);

    AttackResult res;
    res.distance_budget_m = budget;
    res.estimated_destination = origin;
    res.best_path = {origin};
    res.score = std::numeric_limits<double>::infinity();

    auto consider = [&](const std::vector<NodeId>& path) {
        ++res.hypotheses;
        double s = score_path(trace, path, net, opts);
        if (res.hypotheses == 1 || better(s, path, res.score, res.best_path)) {
            res.score = s;
            res.best_path = path;
        }
    };

    std::vector<Hypothesis> frontier;
    if (0.0 < hi) frontier.push_back({{origin}, 0.0, 0.0});
    while (!frontier.empty()) {
        std::vector<Hypothesis> next;
        for (const auto& h : frontier) {
            bool extended = false;
            for (const auto& adj : net.neighbors(h.path.back())) {
                if (std::find(h.path.begin(), h.path.end(), adj.to) != h.path.end()) continue;
                extended = true;
                Hypothesis q{h.path, h.len + net.edges()[adj.edge].len_m, 0.0};
                q.path.push_back(adj.to);
                if (q.len >= lo) consider(q.path);
                if (q.len < hi) next.push_back(std::move(q));
            }
            if (!extended && h.path.size() > 1 && h.len < lo) consider(h.path);
        }
        if (opts.beam_width > 0 && next.size() > opts.beam_width) {
            for (auto& q : next) q.score = score_prefix(trace, q.path, net, opts);
            std::sort(next.begin(), next.end(), [](const Hypothesis& a, const Hypothesis& b) {
                return better(a.score, a.path, b.score, b.path);
            });
            next.resize(opts.beam_width);
        }
        frontier = std::move(next);
    }

    res.estimated_destination = res.best_path.back();
    if (truth) {
        res.actual_destination = truth->destination;
        res.travelled_m = truth->travelled_m;
        res.error_ratio = attack_error(net, res.estimated_destination, truth->destination, truth->travelled_m);
    }
    return res;
}

}  // namespace smartcore::pathing
