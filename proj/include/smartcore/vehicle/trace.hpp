#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace smartcore::vehicle {

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;
};

struct TraceSample {
    double t_s = 0.0;
    double speed_kmh = 0.0;
    std::optional<GeoPoint> position;
};

class TraceError : public std::runtime_error {
public:
    TraceError(std::size_t line, const std::string& what)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    /// 1-based line of the offending row; 0 when not tied to a row.
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Timestamped speed samples. Speed is held constant between samples
/// (zero-order hold) and distance is the exact integral of that step
/// function, so odometry is additive over any split of the time axis.
class DrivingTrace {
public:
    DrivingTrace() = default;
    /// Validates: >= 2 samples, strictly increasing t, speed >= 0.
    DrivingTrace(std::string id, std::vector<TraceSample> samples);

    const std::string& id() const { return id_; }
    const std::vector<TraceSample>& samples() const { return samples_; }
    double start() const { return samples_.front().t_s; }
    double end() const { return samples_.back().t_s; }
    bool contains(double t) const { return t >= start() && t <= end(); }
    bool has_position() const { return has_position_; }
    std::optional<GeoPoint> origin() const;

    /// Held speed at t (km/h). Requires contains(t).
    double speed_at(double t) const;
    /// Distance travelled on [start, t] in km. Requires contains(t).
    double distance_km_at(double t) const;
    std::optional<GeoPoint> position_at(double t) const;
    /// Index of the sample whose hold interval covers t.
    std::size_t index_at(double t) const;

private:
    std::string id_;
    std::vector<TraceSample> samples_;
    std::vector<double> cumulative_km_;
    bool has_position_ = false;
};

/// Reads `t_s,speed_kmh[,lat,lon]` CSV. Column order follows the header.
DrivingTrace load_trace(std::istream& in, const std::string& id = "trace");
DrivingTrace load_trace_file(const std::string& path);

}  // namespace smartcore::vehicle
