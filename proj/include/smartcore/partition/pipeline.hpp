#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace smartcore::partition {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The eight plate-recognition stages, in execution order.
enum class Stage {
    PlateDetection,
    Binarization,
    CharAnalysis,
    PlateEdges,
    Deskew,
    Segmentation,
    CharRecognition,
    PostProcess,
};
inline constexpr std::size_t kStageCount = 8;
std::string to_string(Stage s);
const std::array<Stage, kStageCount>& all_stages();

/// Share of the per-plate cost (stages 2-8) attributed to each stage.
/// Only used for the time breakdown; the totals are what get fitted.
double per_plate_weight(Stage s);

enum class PlacementKind { Cloud, SmartCore, Hybrid };
std::string to_string(PlacementKind k);
PlacementKind parse_placement(const std::string& s);

struct Resolution {
    std::string name;  // "720p", "1080p" or "WxH"
    int width = 0;
    int height = 0;
    double megapixels() const { return static_cast<double>(width) * height / 1e6; }
};
Resolution parse_resolution(const std::string& s);  // throws ModelError

/// Cost model. Compute costs are CPU-seconds on the edge device at the
/// reference frequency and scale with reference/actual frequency; the
/// cloud runs the same work `cloud_time_factor` times as long.
struct PipelineModel {
    double reference_mhz = 600.0;

    double detect_per_mp = 0.0;          // stage 1, per frame, per megapixel
    double detect_per_plate_mp = 0.0;    // stage 1, per candidate plate, per megapixel
    double plate_fixed = 0.0;            // stages 2-8, per plate
    double plate_per_mp = 0.0;           // stages 2-8, per plate, per megapixel
    double color_per_plate_mp = 0.0;     // colour sample above each plate (hybrid only)
    double encode_per_mp = 0.0;          // frame encoding before upload (cloud only)
    double edge_frame_overhead = 0.0;    // per frame, frequency independent (capture, I/O)
    double cloud_request_overhead = 0.0; // per cloud request, seconds
    double cloud_time_factor = 1.0;      // cloud seconds per edge reference second

    double frame_bytes_per_mp = 0.0;     // uploaded full frame
    double crop_bytes_per_mp = 0.0;      // uploaded plate crop, per frame megapixel
    double report_bytes = 512.0;         // GPS sighting report
    double sync_bytes = 4096.0;          // one alert-database fetch

    bool calibrated = false;  // false until fitted or explicitly parameterized

    void validate() const;  // throws ModelError
};

nlohmann::json to_json(const PipelineModel& m);
PipelineModel model_from_json(const nlohmann::json& j);

/// Names of the fitted parameters, in the order used by the calibrator.
const std::vector<std::string>& fitted_parameter_names();
std::vector<double> get_fitted(const PipelineModel& m);
void set_fitted(PipelineModel& m, const std::vector<double>& v);

struct FrameStream {
    double fps = 1.0;
    Resolution resolution = parse_resolution("720p");
    double duration_s = 600.0;
    double t_appearance_s = 300.0;
    /// Mean plates per frame, keyed by resolution name; "default" otherwise.
    std::map<std::string, double> plates_per_frame{{"default", 3.0}};
    double color_match_probability = 0.4;
    double target_visible_s = 5.0;

    double plates_mean() const;
    void validate() const;  // throws ModelError
};

struct ResourceModel {
    double cpu_mhz = 600.0;
    double bandwidth_bytes_per_s = 625000.0;
    double rtt_s = 0.1;
    double sync_period_s = 30.0;
    bool include_sync_bytes = false;

    void validate() const;  // throws ModelError
};

nlohmann::json to_json(const FrameStream& s);
FrameStream stream_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ResourceModel& r);
ResourceModel resources_from_json(const nlohmann::json& j);

}  // namespace smartcore::partition
