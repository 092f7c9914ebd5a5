#pragma once

#include <span>
#include <vector>

#include "smartcore/pathing/road_network.hpp"

namespace smartcore::pathing {

struct ProfileOptions {
    double accel_mps2 = 2.0;   // both acceleration and braking
    double sample_hz = 1.0;
    double step_m = 1.0;       // integration grid along the path
    double stop_dwell_s = 0.0; // time spent at rest at intermediate stops
    bool end_at_rest = true;   // false for partial paths still being extended
};

/// Speed trace (km/h at sample_hz) a driver following the path would
/// produce: accelerate to the limit, brake to zero at stop nodes, hold
/// the limit otherwise. The trip starts at rest. A path of fewer than two
/// nodes gives an empty profile; a disconnected one throws NetworkError.
std::vector<double> predict_profile(const std::vector<NodeId>& path, const RoadNetwork& net,
                                    const ProfileOptions& opts = {});

/// Trapezoidal distance in metres of a km/h trace sampled at hz.
double integrate_distance_m(std::span<const double> speeds_kmh, double hz = 1.0);

/// Centres (fractional sample index) of maximal runs below threshold that
/// touch neither end of the trace.
std::vector<double> low_speed_events(std::span<const double> speeds_kmh, double threshold_kmh = 2.0);

/// RMSE between a trace and a candidate profile after a piecewise-linear
/// time warp pinning both endpoints and, when the counts agree, each pair
/// of interior low-speed events. Infinite when either input is empty.
double aligned_rmse(std::span<const double> trace, std::span<const double> profile, double threshold_kmh = 2.0);

}  // namespace smartcore::pathing
