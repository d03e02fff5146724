#include <doctest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "trajzone/geodesy.hpp"

using namespace trajzone;

TEST_CASE("distance of a point to itself is zero") {
  TrajectoryPoint p{12.5, -33.1, 0};
  CHECK(haversine_distance(p, p) == 0.0);
}

TEST_CASE("antipodal equator points are half a circumference apart") {
  const double d = haversine_distance({0, 0, 0}, {180, 0, 0});
  CHECK(d == doctest::Approx(std::numbers::pi * 6'371'000.0).epsilon(1e-12));
  CHECK(d == doctest::Approx(2.00149e7).epsilon(1e-5));
}

TEST_CASE("paris to london agrees with the vector oracle") {
  TrajectoryPoint paris{2.3522, 48.8566, 0}, london{-0.1278, 51.5074, 0};
  const double d = haversine_distance(paris, london);
  const double ref = oracle::great_circle_m(48.8566, 2.3522, 51.5074, -0.1278);
  CHECK(std::abs(d - ref) / ref < 1e-3);
  CHECK(std::abs(d - ref) < 1e-3);  // both exact on the sphere
}

TEST_CASE("bearing cardinal directions") {
  CHECK(initial_bearing({0, 0, 0}, {0, 1, 0}) == doctest::Approx(0.0));
  CHECK(initial_bearing({0, 0, 0}, {1, 0, 0}) == doctest::Approx(90.0));
  CHECK(initial_bearing({0, 0, 0}, {0, -1, 0}) == doctest::Approx(180.0));
  CHECK(initial_bearing({0, 0, 0}, {-1, 0, 0}) == doctest::Approx(270.0));
  CHECK(initial_bearing({5, 5, 0}, {5, 5, 0}) == 0.0);
}

TEST_CASE("random pairs match oracles") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> lat(-80, 80), lon(-180, 180);
  for (int i = 0; i < 2000; ++i) {
    TrajectoryPoint a{lon(rng), lat(rng), 0}, b{lon(rng), lat(rng), 0};
    const double d = haversine_distance(a, b);
    CHECK(d == doctest::Approx(oracle::great_circle_m(a.lat, a.lon, b.lat, b.lon)).epsilon(1e-9));
    const double brg = initial_bearing(a, b);
    CHECK(brg >= 0.0);
    CHECK(brg < 360.0);
    double diff = std::abs(brg - oracle::azimuth_deg(a.lat, a.lon, b.lat, b.lon));
    diff = std::min(diff, 360.0 - diff);
    CHECK(diff < 1e-7);
  }
}
