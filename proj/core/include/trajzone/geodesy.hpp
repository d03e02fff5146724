#pragma once

#include "trajzone/trajectory.hpp"

namespace trajzone {

/// Mean Earth radius of the spherical model, in meters.
inline constexpr double kEarthRadiusMeters = 6'371'000.0;

/// Great-circle distance in meters (haversine formula on the sphere).
double haversine_distance(const TrajectoryPoint& a, const TrajectoryPoint& b) noexcept;

/// Forward azimuth from a to b in degrees, normalized to [0, 360).
/// Coincident points have bearing 0.
double initial_bearing(const TrajectoryPoint& a, const TrajectoryPoint& b) noexcept;

}  // namespace trajzone
