#include "smartcore/vehicle/trace.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace smartcore::vehicle {

DrivingTrace::DrivingTrace(std::string id, std::vector<TraceSample> samples)
    : id_(std::move(id)), samples_(std::move(samples)) {
    if (samples_.size() < 2) throw TraceError(0, "trace needs at least 2 samples, got " + std::to_string(samples_.size()));
    has_position_ = true;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!(samples_[i].speed_kmh >= 0.0) || !std::isfinite(samples_[i].speed_kmh))
            throw TraceError(0, "sample " + std::to_string(i) + ": negative speed");
        if (i > 0 && !(samples_[i].t_s > samples_[i - 1].t_s))
            throw TraceError(0, "sample " + std::to_string(i) + ": non-monotone time");
        has_position_ = has_position_ && samples_[i].position.has_value();
    }
    cumulative_km_.resize(samples_.size(), 0.0);
    for (std::size_t i = 1; i < samples_.size(); ++i) {
        const double dt_h = (samples_[i].t_s - samples_[i - 1].t_s) / 3600.0;
        cumulative_km_[i] = cumulative_km_[i - 1] + samples_[i - 1].speed_kmh * dt_h;
    }
}

std::optional<GeoPoint> DrivingTrace::origin() const {
    return samples_.empty() ? std::nullopt : samples_.front().position;
}

std::size_t DrivingTrace::index_at(double t) const {
    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const TraceSample& s) { return v < s.t_s; });
    if (it == samples_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(samples_.begin(), it) - 1);
}

double DrivingTrace::speed_at(double t) const { return samples_[index_at(t)].speed_kmh; }

double DrivingTrace::distance_km_at(double t) const {
    const auto i = index_at(t);
    const double dt_h = (t - samples_[i].t_s) / 3600.0;
    return cumulative_km_[i] + samples_[i].speed_kmh * std::max(0.0, dt_h);
}

std::optional<GeoPoint> DrivingTrace::position_at(double t) const { return samples_[index_at(t)].position; }

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
        const auto b = f.find_first_not_of(" \t\r");
        const auto e = f.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : f.substr(b, e - b + 1));
    }
    return out;
}

double parse_field(const std::string& text, std::size_t line, const char* column) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw TraceError(line, std::string("malformed ") + column + " value '" + text + "'");
    return v;
}

}  // namespace

DrivingTrace load_trace(std::istream& in, const std::string& id) {
    std::string line;
    std::size_t lineno = 0;
    int col_t = -1, col_v = -1, col_lat = -1, col_lon = -1;
    std::size_t ncols = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto header = split_csv(line);
        ncols = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            const auto& h = header[i];
            const int idx = static_cast<int>(i);
            if (h == "t_s") col_t = idx;
            else if (h == "speed_kmh") col_v = idx;
            else if (h == "lat") col_lat = idx;
            else if (h == "lon") col_lon = idx;
        }
        if (col_t < 0 || col_v < 0) throw TraceError(lineno, "header must declare t_s and speed_kmh columns");
        if ((col_lat < 0) != (col_lon < 0)) throw TraceError(lineno, "lat and lon must appear together");
        break;
    }
    if (ncols == 0) throw TraceError(0, "trace needs at least 2 samples, got 0");

    std::vector<TraceSample> samples;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto f = split_csv(line);
        if (f.size() != ncols)
            throw TraceError(lineno, "expected " + std::to_string(ncols) + " columns, got " + std::to_string(f.size()));
        TraceSample s;
        s.t_s = parse_field(f[col_t], lineno, "t_s");
        s.speed_kmh = parse_field(f[col_v], lineno, "speed_kmh");
        if (col_lat >= 0) {
            s.position = GeoPoint{parse_field(f[col_lat], lineno, "lat"), parse_field(f[col_lon], lineno, "lon")};
        }
        if (s.speed_kmh < 0.0) throw TraceError(lineno, "negative speed");
        if (!samples.empty() && !(s.t_s > samples.back().t_s)) throw TraceError(lineno, "non-monotone time");
        samples.push_back(s);
    }
    if (samples.size() < 2)
        throw TraceError(0, "trace needs at least 2 samples, got " + std::to_string(samples.size()));
    return DrivingTrace(id, std::move(samples));
}

DrivingTrace load_trace_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw TraceError(0, "cannot open trace " + path);
    auto stem = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
    return load_trace(in, stem);
}

}  // namespace smartcore::vehicle
