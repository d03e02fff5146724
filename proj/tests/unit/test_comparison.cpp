#include <doctest.h>

#include <numeric>
#include <set>

#include "synthetic.hpp"
#include "trajzone/comparison.hpp"
#include "trajzone/error.hpp"
#include "trajzone/geodesy.hpp"

using namespace trajzone;
using synthetic::make_trajectory;

namespace {

constexpr double kDegPerMeter = 180.0 / (3.14159265358979323846 * kEarthRadiusMeters);

/// Equator trajectory with dt = 1 s whose speed series is `speeds` (speed[0] ignored).
Trajectory with_speeds(const std::vector<double>& speeds) {
  std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
  double lon = 0;
  for (std::size_t i = 1; i < speeds.size(); ++i) {
    lon += speeds[i] * kDegPerMeter;
    pts.emplace_back(0.0, lon);
  }
  return make_trajectory("s", pts, 1.0);
}

Trajectory long_walk(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return synthetic::random_walk("w" + std::to_string(seed), n, rng);
}

}  // namespace

TEST_CASE("combination features are the union") {
  const auto f = combination_features(parse_combination("acceleration-speed"));
  CHECK(f.size() == 38);
  CHECK(combination_features(parse_combination("geometric-kinematic")).size() == 72);
  CHECK(combination_features(parse_combination("curvature-speed")).size() == 34);
}

TEST_CASE("planted speed difference ranks speed first") {
  const auto set = synthetic::two_zone_speed_set(40, 1);
  const auto combo = parse_combination("acceleration-speed");
  ForestConfig cfg;
  cfg.n_trees = 100;
  const auto r = compare_zones(set.vectors, set.zoned, combo, 1, 2, cfg);
  CHECK(r.members_a == 40);
  CHECK(r.members_b == 40);
  CHECK(r.train_size == 64);
  CHECK(r.metrics.test_size == 16);
  CHECK(r.metrics.f1 >= 0.95);
  CHECK(r.column_x.node == TaxonomyNode::Acceleration);
  CHECK(r.column_y.node == TaxonomyNode::Speed);
  CHECK(r.column_x.variables.size() + r.column_y.variables.size() == 38);
  REQUIRE_FALSE(r.column_y.variables.empty());
  CHECK(r.column_y.variables[0].name.starts_with("speed_"));
  CHECK(r.column_y.variables[0].importance > r.column_x.variables[0].importance);
  double total = 0;
  std::set<std::string> names;
  for (const auto* col : {&r.column_x, &r.column_y})
    for (std::size_t i = 0; i < col->variables.size(); ++i) {
      total += col->variables[i].importance;
      names.insert(col->variables[i].name);
      if (i) CHECK(col->variables[i - 1].importance >= col->variables[i].importance);
    }
  CHECK(names.size() == 38);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("zone preconditions") {
  auto set = synthetic::two_zone_speed_set(10, 2);
  const auto combo = parse_combination("acceleration-speed");
  auto code = [&](int a, int b) {
    try {
      compare_zones(set.vectors, set.zoned, combo, a, b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  CHECK(code(1, 1) == ErrorCode::IdenticalZones);
  CHECK(code(1, 3) == ErrorCode::InsufficientMembers);
  CHECK(code(1, 7) == ErrorCode::InvalidArgument);
  for (auto& z : set.zoned)
    if (z.zone == 2) z.zone = 0;
  set.zoned[1].zone = 2;
  CHECK(code(1, 2) == ErrorCode::InsufficientMembers);
  CHECK_THROWS_AS(compare_zones(set.vectors, set.zoned, parse_combination("curvature-speed"), 1, 2), Error);
}

TEST_CASE("anchors") {
  std::vector<std::pair<double, double>> still;
  for (int i = 0; i < 6; ++i) still.emplace_back(0.0, 0.001 * i);
  // constant speed except the padded zero: mean is close to every later point
  CHECK(variable_anchor(make_trajectory("c", still), "speed_quant_max") >= 1);

  const auto t = with_speeds({0, 1, 2, 9});
  CHECK(t.features->speed[3] == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(variable_anchor(t, "speed_mean") == 2);
  CHECK(variable_anchor(t, "speed_quant_max") == 3);
  CHECK(variable_anchor(t, "speed_quant_min") == 0);
  CHECK_THROWS_AS(variable_anchor(t, "distance_geometry_1_1"), Error);
  CHECK_THROWS_AS(variable_anchor(t, "speed_bogus"), Error);
}

TEST_CASE("constant series anchors at the first point") {
  Trajectory t{"k", {}, {}};
  for (int i = 0; i < 8; ++i) t.points.push_back({0, 0, static_cast<double>(i)});
  t.features = compute_point_features(t);
  CHECK(variable_anchor(t, "speed_mean") == 0);
  CHECK(variable_anchor(t, "angles_range") == 0);
}

TEST_CASE("window sizes") {
  const auto t = long_walk(100, 3);
  for (const auto& d : variable_catalog()) {
    if (d.signature) continue;
    const auto w = extract_sample(t, d.name);
    REQUIRE(w.anchor.has_value());
    CHECK(w.range.begin <= *w.anchor);
    CHECK(*w.anchor < w.range.end);
    const std::size_t a = *w.anchor;
    const std::size_t expect = std::min<std::size_t>(a, 5) + std::min<std::size_t>(99 - a, 4) + 1;
    CHECK(w.range.size() == expect);
    CHECK(w.points.size() == w.range.size());
    CHECK(w.features.size() == w.range.size());
  }
}

TEST_CASE("window clamp arithmetic") {
  // speed series 0,1,...: quant_max anchors at the last point, quant_min at 0
  std::vector<double> sp(100);
  std::iota(sp.begin(), sp.end(), 0.0);
  sp[20] = 500.0;
  const auto t = with_speeds(sp);
  const auto w = extract_sample(t, "speed_quant_max");
  CHECK(*w.anchor == 20);
  CHECK(w.range.begin == 15);
  CHECK(w.range.end == 25);
  CHECK(w.points.size() == 10);

  std::vector<double> rise(100);
  std::iota(rise.begin(), rise.end(), 1.0);
  const auto tail = extract_sample(with_speeds(rise), "speed_quant_max");
  CHECK(*tail.anchor == 99);
  CHECK(tail.points.size() == 6);

  std::vector<double> fall(100);
  for (std::size_t i = 0; i < 100; ++i) fall[i] = 200.0 - static_cast<double>(i);
  fall[2] = 1000;
  const auto head = extract_sample(with_speeds(fall), "speed_quant_max");
  CHECK(*head.anchor == 2);
  CHECK(head.range.begin == 0);
  CHECK(head.points.size() == 7);

  const auto wide = extract_sample(t, "speed_quant_max", WindowSize{2, 1});
  CHECK(wide.points.size() == 4);
}

TEST_CASE("signature segments share the partition") {
  const auto t = long_walk(23, 4);
  const auto whole = segment_for_signature(t, {1, 1});
  CHECK(whole.points.size() == 23);
  const auto last = segment_for_signature(t, {5, 5});
  CHECK(last.range.begin == 19);
  CHECK(last.points.size() == 4);
  for (std::size_t k = 1; k <= 5; ++k)
    for (std::size_t j = 1; j <= k; ++j) {
      const auto s = segment_for_signature(t, {k, j});
      const auto p = signature_partition(23, {k, j});
      CHECK(s.range.begin == p.begin);
      CHECK(s.range.end == p.end);
      CHECK(s.kind == SampleKind::SignatureSegment);
    }
  const auto routed = sample_for_variable(t, "distance_geometry_2_1");
  CHECK(routed.kind == SampleKind::SignatureSegment);
  CHECK(routed.range.end == 12);
  CHECK(sample_for_variable(t, "angles_range").kind == SampleKind::Window);
}

TEST_CASE("paired samples share a colour range") {
  const auto a = long_walk(60, 5), b = long_walk(40, 6);
  const Trajectory* both[] = {&a, &b};
  const auto p = paired_samples(both, "acceleration_sd");
  REQUIRE(p.windows.size() == 2);
  CHECK(p.windows[0].trajectory_id == a.id);
  CHECK(*p.windows[0].anchor == variable_anchor(a, "acceleration_sd"));
  CHECK(*p.windows[1].anchor == variable_anchor(b, "acceleration_sd"));
  CHECK(p.shared_range.size() == 5);
  const auto [lo, hi] = p.shared_range.at("speed");
  for (const auto& w : p.windows)
    for (double v : w.features.speed) {
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
}
