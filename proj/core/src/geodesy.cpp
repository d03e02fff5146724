#include "trajzone/geodesy.hpp"

#include <cmath>
#include <numbers>

namespace trajzone {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

}  // namespace

double haversine_distance(const TrajectoryPoint& a, const TrajectoryPoint& b) noexcept {
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double s_lat = std::sin(dlat / 2.0);
  const double s_lon = std::sin(dlon / 2.0);
  double h = s_lat * s_lat + std::cos(lat1) * std::cos(lat2) * s_lon * s_lon;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusMeters * std::asin(std::sqrt(h));
}

double initial_bearing(const TrajectoryPoint& a, const TrajectoryPoint& b) noexcept {
  if (a.lat == b.lat && a.lon == b.lon) return 0.0;
  const double lat1 = a.lat * kDegToRad;
  const double lat2 = b.lat * kDegToRad;
  const double dlon = (b.lon - a.lon) * kDegToRad;
  const double y = std::sin(dlon) * std::cos(lat2);
  const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
  double deg = std::atan2(y, x) / kDegToRad;
  deg = std::fmod(deg + 360.0, 360.0);
  // fmod can return exactly 360 for tiny negative inputs
  if (deg >= 360.0) deg -= 360.0;
  return deg;
}

}  // namespace trajzone
