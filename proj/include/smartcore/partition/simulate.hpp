#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "smartcore/partition/pipeline.hpp"
#include "smartcore/store/alert.hpp"

namespace smartcore::partition {

/// Symbolic stand-in for a video frame: no pixels, just the plates in it.
struct PlateObservation {
    std::string plate;
    std::string color;
    double area_fraction = 0.01;  // of the frame
};

struct FrameDescriptor {
    std::size_t index = 0;
    double capture_s = 0.0;
    std::vector<PlateObservation> plates;
};

struct Detection {
    std::size_t frame_index = 0;
    std::string plate;
};

/// Exact plate-string match against active alerts.
std::optional<Detection> match_alert(const FrameDescriptor& frame, const std::vector<store::AlertRecord>& alerts);

/// Hybrid pre-filter: does the colour sampled above this plate match any
/// active alert's colour?
bool color_prefilter(const PlateObservation& plate, const std::vector<store::AlertRecord>& alerts);

/// Deterministic frame sequence for a stream. The vehicle of the first
/// active alert is in view from t_appearance for target_visible_s seconds;
/// background plates follow a Poisson count with the stream's mean, and
/// each one shares a colour with some alert with the stream's probability.
std::vector<FrameDescriptor> generate_frames(const FrameStream& stream,
                                             const std::vector<store::AlertRecord>& alerts, std::uint64_t seed);

/// Alert database used when a scenario does not bring its own.
std::vector<store::AlertRecord> default_alerts();

struct SimResult {
    bool detected = false;
    double t_detection_s = 0.0;
    double dtr = 0.0;
    std::optional<Detection> detection;
    double detection_sim_time_s = 0.0;

    std::size_t frames = 0;
    std::size_t cloud_requests = 0;
    double frame_bytes = 0.0;   // full frames or plate crops
    double report_bytes = 0.0;  // sighting report(s)
    double sync_bytes = 0.0;    // alert database fetches, when counted

    std::map<std::string, double> time_breakdown_s;

    double cellular_bytes() const { return frame_bytes + report_bytes + sync_bytes; }
    double cellular_mb() const { return cellular_bytes() / 1e6; }
};

nlohmann::json to_json(const SimResult& r);

/// Frames are captured at i/fps and processed strictly in order on one
/// pipeline; each frame's time is the sum of its compute, transfer, and
/// per-request cloud costs under the placement. Throws ModelError for an
/// uncalibrated model or invalid inputs.
SimResult simulate(const PipelineModel& model, PlacementKind placement, const FrameStream& stream,
                   const ResourceModel& resources, const std::vector<store::AlertRecord>& alerts,
                   std::uint64_t seed);

SimResult simulate(const PipelineModel& model, PlacementKind placement, const FrameStream& stream,
                   const ResourceModel& resources, std::uint64_t seed);

/// Same as simulate() over frames the caller already generated; the time
/// breakdown is skipped unless asked for. The calibrator's inner loop.
SimResult simulate_frames(const PipelineModel& model, PlacementKind placement, const FrameStream& stream,
                          const ResourceModel& resources, const std::vector<store::AlertRecord>& alerts,
                          const std::vector<FrameDescriptor>& frames, bool breakdown);

/// Time for one frame, exposed for tests.
double frame_time_s(const PipelineModel& model, PlacementKind placement, const FrameDescriptor& frame,
                    const FrameStream& stream, const ResourceModel& resources,
                    const std::vector<store::AlertRecord>& alerts);

}  // namespace smartcore::partition
