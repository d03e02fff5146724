#pragma once

#include "trajzone/trajectory.hpp"

namespace trajzone {

/// Speed, acceleration, turning angle, segment distance and bearing per point.
///
/// distance[i] and bearing[i] describe the segment arriving at point i;
/// angle[i] is the fold of |bearing[i+1] - bearing[i]| into [0, 180].
/// Indices without the required neighbours are 0: speed[0], acceleration[0],
/// acceleration[1], angle[0], angle[last], distance[0], bearing[0].
///
/// Throws Error(InvalidTrajectory) for fewer than 2 points or a non-positive
/// time step.
FeatureSeries compute_point_features(const Trajectory& trajectory);

/// |b - a| folded onto [0, 180].
double turning_angle(double bearing_a, double bearing_b) noexcept;

}  // namespace trajzone
