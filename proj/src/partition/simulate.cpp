#include "smartcore/partition/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "smartcore/privacy/transform.hpp"

namespace smartcore::partition {

std::optional<Detection> match_alert(const FrameDescriptor& frame, const std::vector<store::AlertRecord>& alerts) {
    for (const auto& p : frame.plates)
        for (const auto& a : alerts)
            if (a.active && a.plate == p.plate) return Detection{frame.index, p.plate};
    return std::nullopt;
}

bool color_prefilter(const PlateObservation& plate, const std::vector<store::AlertRecord>& alerts) {
    return std::any_of(alerts.begin(), alerts.end(),
                       [&](const store::AlertRecord& a) { return a.active && a.color == plate.color; });
}

std::vector<store::AlertRecord> default_alerts() {
    return {{"Honda", "Civic", "silver", "7ABC123", true, 0.0}};
}

namespace {

const std::vector<std::string>& palette() {
    static const std::vector<std::string> p{"white", "black", "silver", "gray", "red", "blue", "green", "brown"};
    return p;
}

std::uint64_t poisson(privacy::Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    double prod = rng.unit();
    std::uint64_t k = 0;
    while (prod > limit) {
        ++k;
        prod *= rng.unit();
    }
    return k;
}

}  // namespace

std::vector<FrameDescriptor> generate_frames(const FrameStream& stream, const std::vector<store::AlertRecord>& alerts,
                                             std::uint64_t seed) {
    stream.validate();
    privacy::Rng rng(seed);

    std::vector<std::string> alert_colors, other_colors;
    const store::AlertRecord* target = nullptr;
    for (const auto& a : alerts) {
        if (!a.active) continue;
        if (!target) target = &a;
        if (std::find(alert_colors.begin(), alert_colors.end(), a.color) == alert_colors.end())
            alert_colors.push_back(a.color);
    }
    for (const auto& c : palette())
        if (std::find(alert_colors.begin(), alert_colors.end(), c) == alert_colors.end()) other_colors.push_back(c);

    auto n = static_cast<std::size_t>(std::floor(stream.duration_s * stream.fps + 1e-9));
    std::vector<FrameDescriptor> frames;
    frames.reserve(n);
    std::uint64_t plate_serial = 0;
    for (std::size_t i = 0; i < n; ++i) {
        FrameDescriptor f;
        f.index = i;
        f.capture_s = static_cast<double>(i) / stream.fps;
        auto count = poisson(rng, stream.plates_mean());
        for (std::uint64_t k = 0; k < count; ++k) {
            PlateObservation p;
            p.plate = "BG" + std::to_string(++plate_serial);
            bool match = !alert_colors.empty() && rng.unit() < stream.color_match_probability;
            const auto& pool = match || other_colors.empty() ? alert_colors : other_colors;
            p.color = pool.empty() ? "white" : pool[rng.below(pool.size())];
            p.area_fraction = 0.005 + 0.015 * rng.unit();
            f.plates.push_back(std::move(p));
        }
        if (target && f.capture_s >= stream.t_appearance_s - 1e-9 &&
            f.capture_s < stream.t_appearance_s + stream.target_visible_s)
            f.plates.push_back({target->plate, target->color, 0.01});
        frames.push_back(std::move(f));
    }
    return frames;
}

namespace {

using Breakdown = std::map<std::string, double>;

void add(Breakdown* b, const std::string& key, double v) {
    if (b && v != 0.0) (*b)[key] += v;
}

// Stages 2-8 for `plates` plates; `scale` converts reference CPU-seconds to wall time.
double plate_stages(const PipelineModel& m, double mp, double plates, double scale, Breakdown* b) {
    double t = plates * (m.plate_fixed + m.plate_per_mp * mp) * scale;
    if (b)
        for (Stage s : all_stages()) add(b, to_string(s), t * per_plate_weight(s));
    return t;
}

double cost(const PipelineModel& m, PlacementKind placement, const FrameDescriptor& frame, const FrameStream& stream,
            const ResourceModel& r, const std::vector<store::AlertRecord>& alerts, Breakdown* b,
            std::size_t* requests, double* bytes) {
    const double mp = stream.resolution.megapixels();
    const double edge = m.reference_mhz / r.cpu_mhz;
    const double cloud = m.cloud_time_factor;
    const auto plates = static_cast<double>(frame.plates.size());
    const double detect = m.detect_per_mp * mp + m.detect_per_plate_mp * plates * mp;

    double t = m.edge_frame_overhead;
    add(b, "edge_overhead", m.edge_frame_overhead);

    switch (placement) {
        case PlacementKind::SmartCore: {
            t += detect * edge;
            add(b, to_string(Stage::PlateDetection), detect * edge);
            t += plate_stages(m, mp, plates, edge, b);
            break;
        }
        case PlacementKind::Cloud: {
            double enc = m.encode_per_mp * mp * edge;
            double up = m.frame_bytes_per_mp * mp;
            double xfer = up / r.bandwidth_bytes_per_s;
            t += enc + xfer + r.rtt_s + m.cloud_request_overhead;
            add(b, "encode", enc);
            add(b, "transfer", xfer);
            add(b, "rtt", r.rtt_s);
            add(b, "cloud_overhead", m.cloud_request_overhead);
            t += detect * cloud;
            add(b, to_string(Stage::PlateDetection), detect * cloud);
            t += plate_stages(m, mp, plates, cloud, b);
            if (requests) ++*requests;
            if (bytes) *bytes += up;
            break;
        }
        case PlacementKind::Hybrid: {
            t += detect * edge;
            add(b, to_string(Stage::PlateDetection), detect * edge);
            double color = m.color_per_plate_mp * plates * mp * edge;
            t += color;
            add(b, "color_filter", color);
            for (const auto& p : frame.plates) {
                if (!color_prefilter(p, alerts)) continue;
                double up = m.crop_bytes_per_mp * mp;
                double xfer = up / r.bandwidth_bytes_per_s;
                t += xfer + r.rtt_s + m.cloud_request_overhead;
                add(b, "transfer", xfer);
                add(b, "rtt", r.rtt_s);
                add(b, "cloud_overhead", m.cloud_request_overhead);
                t += plate_stages(m, mp, 1.0, cloud, b);
                if (requests) ++*requests;
                if (bytes) *bytes += up;
            }
            break;
        }
    }
    return t;
}

void check_inputs(const PipelineModel& model, const FrameStream& stream, const ResourceModel& resources) {
    if (!model.calibrated) throw ModelError("pipeline model is uncalibrated; run calibrate or load a fitted model");
    model.validate();
    stream.validate();
    resources.validate();
}

}  // namespace

double frame_time_s(const PipelineModel& model, PlacementKind placement, const FrameDescriptor& frame,
                    const FrameStream& stream, const ResourceModel& resources,
                    const std::vector<store::AlertRecord>& alerts) {
    check_inputs(model, stream, resources);
    return cost(model, placement, frame, stream, resources, alerts, nullptr, nullptr, nullptr);
}

SimResult simulate(const PipelineModel& model, PlacementKind placement, const FrameStream& stream,
                   const ResourceModel& resources, const std::vector<store::AlertRecord>& alerts,
                   std::uint64_t seed) {
    check_inputs(model, stream, resources);
    return simulate_frames(model, placement, stream, resources, alerts, generate_frames(stream, alerts, seed), true);
}

SimResult simulate_frames(const PipelineModel& model, PlacementKind placement, const FrameStream& stream,
                          const ResourceModel& resources, const std::vector<store::AlertRecord>& alerts,
                          const std::vector<FrameDescriptor>& frames, bool breakdown) {
    check_inputs(model, stream, resources);
    SimResult res;
    res.frames = frames.size();
    double busy_until = 0.0;
    for (const auto& f : frames) {
        double start = std::max(f.capture_s, busy_until);
        double dt = cost(model, placement, f, stream, resources, alerts, breakdown ? &res.time_breakdown_s : nullptr,
                         &res.cloud_requests, &res.frame_bytes);
        busy_until = start + dt;
        if (res.detected || f.capture_s < stream.t_appearance_s - 1e-9) continue;
        auto det = match_alert(f, alerts);
        // Under hybrid, only crops that pass the colour filter are ever read.
        if (det && placement == PlacementKind::Hybrid) {
            auto it = std::find_if(f.plates.begin(), f.plates.end(),
                                   [&](const PlateObservation& p) { return p.plate == det->plate; });
            if (it == f.plates.end() || !color_prefilter(*it, alerts)) det.reset();
        }
        if (det) {
            res.detected = true;
            res.detection = det;
            res.detection_sim_time_s = busy_until;
            res.t_detection_s = busy_until;
            res.dtr = busy_until / stream.t_appearance_s;
            res.report_bytes += model.report_bytes;
        }
    }
    if (resources.include_sync_bytes && placement != PlacementKind::Cloud) {
        double fetches = std::floor(stream.duration_s / resources.sync_period_s) + 1.0;
        res.sync_bytes = fetches * model.sync_bytes;
    }
    return res;
}

SimResult simulate(const PipelineModel& model, PlacementKind placement, const FrameStream& stream,
                   const ResourceModel& resources, std::uint64_t seed) {
    return simulate(model, placement, stream, resources, default_alerts(), seed);
}

nlohmann::json to_json(const SimResult& r) {
    nlohmann::json j = {{"detected", r.detected},
                        {"frames", r.frames},
                        {"cloud_requests", r.cloud_requests},
                        {"frame_bytes", r.frame_bytes},
                        {"report_bytes", r.report_bytes},
                        {"sync_bytes", r.sync_bytes},
                        {"cellular_mb", r.cellular_mb()},
                        {"time_breakdown_s", r.time_breakdown_s}};
    if (r.detected) {
        j["t_detection_s"] = r.t_detection_s;
        j["dtr"] = r.dtr;
        j["detection"] = {{"frame_index", r.detection->frame_index},
                          {"plate", r.detection->plate},
                          {"sim_time_s", r.detection_sim_time_s}};
    } else {
        j["dtr"] = nullptr;
    }
    return j;
}

}  // namespace smartcore::partition
