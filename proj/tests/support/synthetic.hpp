#pragma once

// Synthetic trajectories and vectors for tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "trajzone/csv.hpp"
#include "trajzone/ingest.hpp"
#include "trajzone/outlier.hpp"
#include "trajzone/point_features.hpp"
#include "trajzone/trajectory.hpp"
#include "trajzone/vectorize.hpp"

namespace trajzone::synthetic {

/// Trajectory through (lat, lon) pairs at a fixed time step, features computed.
inline Trajectory make_trajectory(std::string id, const std::vector<std::pair<double, double>>& latlon,
                                  double dt = 60.0, double t0 = 1'600'000'000.0) {
  Trajectory t;
  t.id = std::move(id);
  for (std::size_t i = 0; i < latlon.size(); ++i)
    t.points.push_back({latlon[i].second, latlon[i].first, t0 + dt * static_cast<double>(i)});
  t.features = compute_point_features(t);
  return t;
}

/// Deterministic (std::mt19937_64 raw output only) uniform in [0, 1).
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Correlated random walk: heading wobbles by up to `turn` degrees, step
/// length around `step` degrees of arc.
inline Trajectory random_walk(std::string id, std::size_t points, std::mt19937_64& rng, double step = 0.01,
                              double turn = 40.0, double dt = 60.0) {
  double lat = -30.0 + 60.0 * unit(rng);
  double lon = -150.0 + 300.0 * unit(rng);
  double heading = 360.0 * unit(rng);
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < points; ++i) {
    pts.emplace_back(lat, lon);
    heading += turn * (2.0 * unit(rng) - 1.0);
    const double len = step * (0.5 + unit(rng));
    const double h = heading * 3.14159265358979323846 / 180.0;
    lat += len * std::cos(h);
    lon += len * std::sin(h) / std::cos(lat * 3.14159265358979323846 / 180.0);
  }
  return make_trajectory(std::move(id), pts, dt);
}

inline Dataset random_dataset(std::size_t count, std::uint64_t seed, std::size_t min_points = 20,
                              std::size_t max_points = 60) {
  std::mt19937_64 rng(seed);
  Dataset ds;
  ds.name = "synthetic";
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t n = min_points + static_cast<std::size_t>(unit(rng) * static_cast<double>(max_points - min_points + 1));
    char id[32];
    std::snprintf(id, sizeof id, "t%05zu", i);
    const double step = 0.005 + 0.02 * unit(rng);
    const double turn = 5.0 + 80.0 * unit(rng);
    ds.trajectories.push_back(random_walk(id, n, rng, step, turn, 30.0 + 120.0 * unit(rng)));
  }
  return ds;
}

/// CSV text (trajectory_id,timestamp,lat,lon) for a dataset.
inline std::string to_csv(const Dataset& ds) {
  std::ostringstream out;
  csv::write_row(out, {"trajectory_id", "timestamp", "lat", "lon"});
  for (const auto& t : ds.trajectories)
    for (const auto& p : t.points)
      csv::write_row(out, {t.id, csv::format_double(p.t), csv::format_double(p.lat), csv::format_double(p.lon)});
  return out.str();
}

/// Two groups of vectors that differ only in the 19 speed statistics, zoned
/// by hand as zone 1 and zone 2 of the acceleration-speed combination.
struct TwoZoneSet {
  std::vector<FeatureVector> vectors;
  std::vector<ZonedScore> zoned;
};

inline TwoZoneSet two_zone_speed_set(std::size_t per_zone, std::uint64_t seed, double offset = 4.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  const Combination combo{TaxonomyNode::Acceleration, TaxonomyNode::Speed};
  TwoZoneSet out;
  for (std::size_t i = 0; i < 2 * per_zone; ++i) {
    const bool b = i % 2 == 1;
    FeatureVector v;
    char id[32];
    std::snprintf(id, sizeof id, "z%04zu", i);
    v.trajectory_id = id;
    for (auto& x : v.values) x = nd(rng);
    if (b)
      for (std::size_t c = 0; c < 19; ++c) v.values[c] += offset;
    out.vectors.push_back(v);
    out.zoned.push_back({v.trajectory_id, combo, b ? 0.9 : 0.2, b ? 0.2 : 0.9, b ? 2 : 1});
  }
  return out;
}

}  // namespace trajzone::synthetic
