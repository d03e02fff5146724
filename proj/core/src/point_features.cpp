#include "trajzone/point_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "trajzone/error.hpp"
#include "trajzone/geodesy.hpp"

namespace trajzone {

const char* to_string(PointFeature feature) noexcept {
  switch (feature) {
    case PointFeature::Speed: return "speed";
    case PointFeature::Acceleration: return "acceleration";
    case PointFeature::Angle: return "angle";
    case PointFeature::Distance: return "distance";
    case PointFeature::Bearing: return "bearing";
  }
  return "speed";
}

const std::vector<double>& series(const FeatureSeries& f, PointFeature feature) noexcept {
  switch (feature) {
    case PointFeature::Speed: return f.speed;
    case PointFeature::Acceleration: return f.acceleration;
    case PointFeature::Angle: return f.angle;
    case PointFeature::Distance: return f.distance;
    case PointFeature::Bearing: return f.bearing;
  }
  return f.speed;
}

double turning_angle(double bearing_a, double bearing_b) noexcept {
  double d = std::fmod(std::abs(bearing_b - bearing_a), 360.0);
  if (d > 180.0) d = 360.0 - d;
  return d;
}

FeatureSeries compute_point_features(const Trajectory& trajectory) {
  const auto& p = trajectory.points;
  const std::size_t n = p.size();
  if (n < 2) {
    throw Error(ErrorCode::InvalidTrajectory,
                "trajectory '" + trajectory.id + "' has fewer than 2 points");
  }

  FeatureSeries f;
  f.speed.assign(n, 0.0);
  f.acceleration.assign(n, 0.0);
  f.angle.assign(n, 0.0);
  f.distance.assign(n, 0.0);
  f.bearing.assign(n, 0.0);

  for (std::size_t i = 1; i < n; ++i) {
    const double dt = p[i].t - p[i - 1].t;
    if (!(dt > 0.0)) {
      throw Error(ErrorCode::InvalidTrajectory,
                  "trajectory '" + trajectory.id + "' has a non-positive time step at point " +
                      std::to_string(i));
    }
    f.distance[i] = haversine_distance(p[i - 1], p[i]);
    f.speed[i] = f.distance[i] / dt;
    f.bearing[i] = initial_bearing(p[i - 1], p[i]);
    if (i >= 2) f.acceleration[i] = (f.speed[i] - f.speed[i - 1]) / dt;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    f.angle[i] = turning_angle(f.bearing[i], f.bearing[i + 1]);
  }
  return f;
}

}  // namespace trajzone
