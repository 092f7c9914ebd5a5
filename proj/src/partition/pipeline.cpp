#include "smartcore/partition/pipeline.hpp"

#include <cmath>
#include <regex>

namespace smartcore::partition {

std::string to_string(Stage s) {
    switch (s) {
        case Stage::PlateDetection: return "plate_detection";
        case Stage::Binarization: return "binarization";
        case Stage::CharAnalysis: return "char_analysis";
        case Stage::PlateEdges: return "plate_edges";
        case Stage::Deskew: return "deskew";
        case Stage::Segmentation: return "segmentation";
        case Stage::CharRecognition: return "char_recognition";
        case Stage::PostProcess: return "post_process";
    }
    return "unknown";
}

const std::array<Stage, kStageCount>& all_stages() {
    static const std::array<Stage, kStageCount> stages{
        Stage::PlateDetection, Stage::Binarization, Stage::CharAnalysis,    Stage::PlateEdges,
        Stage::Deskew,         Stage::Segmentation, Stage::CharRecognition, Stage::PostProcess};
    return stages;
}

double per_plate_weight(Stage s) {
    switch (s) {
        case Stage::PlateDetection: return 0.0;
        case Stage::Binarization: return 0.10;
        case Stage::CharAnalysis: return 0.20;
        case Stage::PlateEdges: return 0.10;
        case Stage::Deskew: return 0.10;
        case Stage::Segmentation: return 0.15;
        case Stage::CharRecognition: return 0.30;
        case Stage::PostProcess: return 0.05;
    }
    return 0.0;
}

std::string to_string(PlacementKind k) {
    switch (k) {
        case PlacementKind::Cloud: return "cloud";
        case PlacementKind::SmartCore: return "smartcore";
        case PlacementKind::Hybrid: return "hybrid";
    }
    return "unknown";
}

PlacementKind parse_placement(const std::string& s) {
    if (s == "cloud") return PlacementKind::Cloud;
    if (s == "smartcore") return PlacementKind::SmartCore;
    if (s == "hybrid") return PlacementKind::Hybrid;
    throw ModelError("unknown placement '" + s + "' (expected cloud, smartcore or hybrid)");
}

Resolution parse_resolution(const std::string& s) {
    if (s == "720p") return {s, 1280, 720};
    if (s == "1080p") return {s, 1920, 1080};
    if (s == "480p") return {s, 854, 480};
    static const std::regex wxh(R"((\d{2,5})x(\d{2,5}))");
    std::smatch m;
    if (std::regex_match(s, m, wxh)) return {s, std::stoi(m[1]), std::stoi(m[2])};
    throw ModelError("unknown resolution '" + s + "' (expected 720p, 1080p or WxH)");
}

void PipelineModel::validate() const {
    const double vals[] = {detect_per_mp,      detect_per_plate_mp, plate_fixed,         plate_per_mp,
                           color_per_plate_mp, encode_per_mp,       edge_frame_overhead, cloud_request_overhead,
                           frame_bytes_per_mp, crop_bytes_per_mp,   report_bytes,        sync_bytes};
    for (double v : vals)
        if (!(v >= 0.0) || !std::isfinite(v)) throw ModelError("model costs must be finite and non-negative");
    if (!(cloud_time_factor > 0.0)) throw ModelError("cloud time factor must be positive");
    if (!(reference_mhz > 0.0)) throw ModelError("reference frequency must be positive");
}

namespace {
struct Field {
    const char* name;
    double PipelineModel::*member;
    bool fitted;
};
const std::vector<Field>& fields() {
    static const std::vector<Field> f{
        {"detect_per_mp", &PipelineModel::detect_per_mp, true},
        {"detect_per_plate_mp", &PipelineModel::detect_per_plate_mp, true},
        {"plate_fixed", &PipelineModel::plate_fixed, true},
        {"plate_per_mp", &PipelineModel::plate_per_mp, true},
        {"color_per_plate_mp", &PipelineModel::color_per_plate_mp, true},
        {"encode_per_mp", &PipelineModel::encode_per_mp, true},
        {"edge_frame_overhead", &PipelineModel::edge_frame_overhead, true},
        {"cloud_request_overhead", &PipelineModel::cloud_request_overhead, true},
        {"cloud_time_factor", &PipelineModel::cloud_time_factor, true},
        {"frame_bytes_per_mp", &PipelineModel::frame_bytes_per_mp, true},
        {"crop_bytes_per_mp", &PipelineModel::crop_bytes_per_mp, true},
        {"report_bytes", &PipelineModel::report_bytes, false},
        {"sync_bytes", &PipelineModel::sync_bytes, false},
        {"reference_mhz", &PipelineModel::reference_mhz, false},
    };
    return f;
}
}  // namespace

nlohmann::json to_json(const PipelineModel& m) {
    nlohmann::json j;
    for (const auto& f : fields()) j[f.name] = m.*(f.member);
    j["calibrated"] = m.calibrated;
    return j;
}

PipelineModel model_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelError("pipeline model must be a JSON object");
    PipelineModel m;
    for (const auto& f : fields())
        if (j.contains(f.name)) m.*(f.member) = j[f.name].get<double>();
    m.calibrated = j.value("calibrated", true);
    m.validate();
    return m;
}

const std::vector<std::string>& fitted_parameter_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& f : fields())
            if (f.fitted) n.push_back(f.name);
        return n;
    }();
    return names;
}

std::vector<double> get_fitted(const PipelineModel& m) {
    std::vector<double> v;
    for (const auto& f : fields())
        if (f.fitted) v.push_back(m.*(f.member));
    return v;
}

void set_fitted(PipelineModel& m, const std::vector<double>& v) {
    std::size_t i = 0;
    for (const auto& f : fields()) {
        if (!f.fitted) continue;
        if (i >= v.size()) throw ModelError("too few fitted parameters");
        m.*(f.member) = v[i++];
    }
}

double FrameStream::plates_mean() const {
    auto it = plates_per_frame.find(resolution.name);
    if (it != plates_per_frame.end()) return it->second;
    it = plates_per_frame.find("default");
    return it != plates_per_frame.end() ? it->second : 0.0;
}

void FrameStream::validate() const {
    if (!(fps >= 1.0)) throw ModelError("fps must be at least 1");
    if (!(duration_s > 0.0)) throw ModelError("duration must be positive");
    if (!(t_appearance_s > 0.0) || !(t_appearance_s < duration_s))
        throw ModelError("target appearance time must lie inside the stream");
    if (resolution.width <= 0 || resolution.height <= 0) throw ModelError("resolution must be positive");
    if (!(plates_mean() >= 0.0)) throw ModelError("plates per frame must be non-negative");
    if (!(color_match_probability >= 0.0 && color_match_probability <= 1.0))
        throw ModelError("colour match probability must lie in [0, 1]");
    if (!(target_visible_s > 0.0)) throw ModelError("target visibility window must be positive");
}

void ResourceModel::validate() const {
    if (!(cpu_mhz > 0.0)) throw ModelError("cpu frequency must be positive");
    if (!(bandwidth_bytes_per_s > 0.0)) throw ModelError("bandwidth must be positive");
    if (!(rtt_s >= 0.0)) throw ModelError("round-trip time must be non-negative");
    if (!(sync_period_s > 0.0)) throw ModelError("sync period must be positive");
}

nlohmann::json to_json(const FrameStream& s) {
    return {{"fps", s.fps},
            {"resolution", s.resolution.name},
            {"duration_s", s.duration_s},
            {"t_appearance_s", s.t_appearance_s},
            {"plates_per_frame", s.plates_per_frame},
            {"color_match_probability", s.color_match_probability},
            {"target_visible_s", s.target_visible_s}};
}

FrameStream stream_from_json(const nlohmann::json& j) {
    FrameStream s;
    s.fps = j.value("fps", s.fps);
    if (j.contains("resolution")) s.resolution = parse_resolution(j["resolution"].get<std::string>());
    s.duration_s = j.value("duration_s", s.duration_s);
    s.t_appearance_s = j.value("t_appearance_s", s.t_appearance_s);
    if (j.contains("plates_per_frame")) {
        const auto& p = j["plates_per_frame"];
        if (p.is_number())
            s.plates_per_frame = {{"default", p.get<double>()}};
        else
            s.plates_per_frame = p.get<std::map<std::string, double>>();
    }
    s.color_match_probability = j.value("color_match_probability", s.color_match_probability);
    s.target_visible_s = j.value("target_visible_s", s.target_visible_s);
    s.validate();
    return s;
}

nlohmann::json to_json(const ResourceModel& r) {
    return {{"cpu_mhz", r.cpu_mhz},
            {"bandwidth_bytes_per_s", r.bandwidth_bytes_per_s},
            {"rtt_s", r.rtt_s},
            {"sync_period_s", r.sync_period_s},
            {"include_sync_bytes", r.include_sync_bytes}};
}

ResourceModel resources_from_json(const nlohmann::json& j) {
    ResourceModel r;
    r.cpu_mhz = j.value("cpu_mhz", r.cpu_mhz);
    r.bandwidth_bytes_per_s = j.value("bandwidth_bytes_per_s", r.bandwidth_bytes_per_s);
    r.rtt_s = j.value("rtt_s", r.rtt_s);
    r.sync_period_s = j.value("sync_period_s", r.sync_period_s);
    r.include_sync_bytes = j.value("include_sync_bytes", r.include_sync_bytes);
    r.validate();
    return r;
}

}  // namespace smartcore::partition
