#include "smartcore/pathing/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smartcore::pathing {

namespace {
constexpr double kKmhPerMps = 3.6;

double interp(std::span<const double> v, double x) {
    if (x <= 0.0) return v.front();
    double last = static_cast<double>(v.size() - 1);
    if (x >= last) return v.back();
    auto i = static_cast<std::size_t>(std::floor(x));
    double f = x - static_cast<double>(i);
    return v[i] + f * (v[i + 1] - v[i]);
}
}  // namespace

std::vector<double> predict_profile(const std::vector<NodeId>& path, const RoadNetwork& net,
                                    const ProfileOptions& opts) {
    if (path.size() < 2) return {};
    if (!(opts.accel_mps2 > 0.0) || !(opts.sample_hz > 0.0) || !(opts.step_m > 0.0) || opts.stop_dwell_s < 0.0)
        throw NetworkError("profile options must be positive");

    // Grid points along the path with their speed caps (m/s).
    std::vector<double> cap{0.0};
    std::vector<double> ds;
    std::vector<bool> dwell{false};
    for (std::size_t k = 1; k < path.size(); ++k) {
        auto e = net.edge_between(path[k - 1], path[k]);
        if (!e)
            throw NetworkError("path is disconnected between " + std::to_string(path[k - 1]) + " and " +
                               std::to_string(path[k]));
        const Edge& edge = net.edges()[*e];
        double lim = edge.limit_kmh / kKmhPerMps;
        auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(edge.len_m / opts.step_m)));
        double step = edge.len_m / static_cast<double>(n);
        cap.back() = std::min(cap.back(), lim);
        if (k == 1) cap.back() = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ds.push_back(step);
            cap.push_back(lim);
            dwell.push_back(false);
        }
        bool last = k + 1 == path.size();
        if (last) {
            if (opts.end_at_rest) cap.back() = 0.0;
        } else if (net.node(path[k]).stop) {
            cap.back() = 0.0;
            dwell.back() = true;
        }
    }

    const double a = opts.accel_mps2;
    std::vector<double> v = cap;
    v[0] = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i + 1] = std::min(cap[i + 1], std::sqrt(v[i] * v[i] + 2 * a * ds[i]));
    for (std::size_t i = v.size() - 1; i-- > 0;) v[i] = std::min(v[i], std::sqrt(v[i + 1] * v[i + 1] + 2 * a * ds[i]));

    // Speed is linear in time within each grid step, so (t, v) knots
    // describe the profile exactly.
    std::vector<double> kt{0.0}, kv{0.0};
    double t = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
        double sum = v[i] + v[i + 1];
        t += sum > 0.0 ? 2.0 * ds[i] / sum : 0.0;
        kt.push_back(t);
        kv.push_back(v[i + 1]);
        if (dwell[i + 1] && opts.stop_dwell_s > 0.0) {
            t += opts.stop_dwell_s;
            kt.push_back(t);
            kv.push_back(0.0);
        }
    }

    const double dt = 1.0 / opts.sample_hz;
    auto samples = static_cast<std::size_t>(std::ceil(t / dt - 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(samples);
    std::size_t j = 0;
    for (std::size_t k = 0; k < samples; ++k) {
        double ts = static_cast<double>(k) * dt;
        while (j + 1 < kt.size() && kt[j + 1] < ts) ++j;
        double val;
        if (j + 1 >= kt.size()) {
            val = kv.back();
        } else {
            double span = kt[j + 1] - kt[j];
            double f = span > 0.0 ? std::clamp((ts - kt[j]) / span, 0.0, 1.0) : 1.0;
            val = kv[j] + f * (kv[j + 1] - kv[j]);
        }
        out.push_back(val * kKmhPerMps);
    }
    return out;
}

double integrate_distance_m(std::span<const double> speeds_kmh, double hz) {
    double sum = 0.0;
    for (std::size_t i = 1; i < speeds_kmh.size(); ++i) sum += 0.5 * (speeds_kmh[i - 1] + speeds_kmh[i]);
    return sum / kKmhPerMps / hz;
}

std::vector<double> low_speed_events(std::span<const double> s, double threshold_kmh) {
    std::vector<double> out;
    std::size_t n = s.size();
    std::size_t i = 0;
    while (i < n) {
        if (!(s[i] < threshold_kmh)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && s[j + 1] < threshold_kmh) ++j;
        if (i != 0 && j != n - 1) out.push_back(0.5 * static_cast<double>(i + j));
        i = j + 1;
    }
    return out;
}

double aligned_rmse(std::span<const double> a, std::span<const double> b, double threshold_kmh) {
    if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
    std::vector<double> xa{0.0}, xb{0.0};
    auto ea = low_speed_events(a, threshold_kmh);
    auto eb = low_speed_events(b, threshold_kmh);
    if (ea.size() == eb.size()) {
        xa.insert(xa.end(), ea.begin(), ea.end());
        xb.insert(xb.end(), eb.begin(), eb.end());
    }
    xa.push_back(static_cast<double>(a.size() - 1));
    xb.push_back(static_cast<double>(b.size() - 1));

    double sse = 0.0;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double x = static_cast<double>(i);
        while (seg + 2 < xa.size() && x > xa[seg + 1]) ++seg;
        double span = xa[seg + 1] - xa[seg];
        double f = span > 0.0 ? (x - xa[seg]) / span : 0.0;
        double y = xb[seg] + f * (xb[seg + 1] - xb[seg]);
        double d = a[i] - interp(b, y);
        sse += d * d;
    }
    return std::sqrt(sse / static_cast<double>(a.size()));
}

}  // namespace smartcore::pathing
