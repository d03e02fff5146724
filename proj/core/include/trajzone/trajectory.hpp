#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace trajzone {

struct TrajectoryPoint {
  double lon = 0.0;  // degrees, [-180, 180]
  double lat = 0.0;  // degrees, [-90, 90]
  double t = 0.0;    // UTC seconds since epoch
};

/// Per-point feature series; every series has one entry per trajectory point.
/// Values that need a missing predecessor (or successor, for angle) are 0.
struct FeatureSeries {
  std::vector<double> speed;         // m/s
  std::vector<double> acceleration;  // m/s^2
  std::vector<double> angle;         // turning deviation, degrees in [0, 180]
  std::vector<double> distance;      // meters from the previous point
  std::vector<double> bearing;       // degrees in [0, 360)

  std::size_t size() const noexcept { return speed.size(); }
};

enum class PointFeature { Speed, Acceleration, Angle, Distance, Bearing };

inline constexpr PointFeature kPointFeatures[] = {
    PointFeature::Speed, PointFeature::Acceleration, PointFeature::Angle,
    PointFeature::Distance, PointFeature::Bearing};

const char* to_string(PointFeature feature) noexcept;
const std::vector<double>& series(const FeatureSeries& features, PointFeature feature) noexcept;

struct Trajectory {
  std::string id;
  std::vector<TrajectoryPoint> points;
  std::optional<FeatureSeries> features;
};

struct Provenance {
  std::string source;
  std::string config_hash;
};

/// Immutable after ingestion. Trajectories are kept sorted by id.
struct Dataset {
  std::string name;
  std::vector<Trajectory> trajectories;
  Provenance provenance;

  const Trajectory* find(std::string_view id) const noexcept;
  std::size_t point_count() const noexcept;
};

}  // namespace trajzone
