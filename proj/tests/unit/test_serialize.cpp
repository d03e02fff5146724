#include <doctest.h>

#include <sstream>

#include "synthetic.hpp"
#include "trajzone/comparison.hpp"
#include "trajzone/csv.hpp"
#include "trajzone/error.hpp"
#include "trajzone/serialize.hpp"

using namespace trajzone;
using nlohmann::json;

TEST_CASE("forest config round trip") {
  ForestConfig c;
  c.n_trees = 17;
  c.max_depth = 4;
  c.balanced_class_weight = false;
  c.seed = 9;
  const auto back = forest_config_from_json(to_json(c));
  CHECK(back.n_trees == 17);
  CHECK(back.max_depth == 4);
  CHECK_FALSE(back.balanced_class_weight);
  CHECK(back.seed == 9);
  CHECK(back.canonical() == c.canonical());
  CHECK(to_json(ForestConfig{})["class_weight"] == "balanced");
  CHECK_THROWS_AS(forest_config_from_json(json{{"n_trees", "many"}}), Error);
  CHECK_THROWS_AS(forest_config_from_json(json{{"class_weight", "auto"}}), Error);
  CHECK_THROWS_AS(forest_config_from_json(json{{"test_fraction", 0}}), Error);
}

TEST_CASE("dbos options and schema") {
  const auto o = dbos_options_from_json(json{{"normalize_columns", false}, {"seed", 3}});
  CHECK_FALSE(o.normalize_columns);
  CHECK(o.seed == 3);
  CHECK(to_json(o)["radius_sample_pairs"] == 0);
  const auto s = schema_from_json(
      json{{"id_column", "SID"}, {"filters", json::array({{{"column", "SEASON"}, {"min", 2004}, {"max", 2024}}})}});
  CHECK(s.id_column == "SID");
  CHECK(s.time_column == "timestamp");
  REQUIRE(s.filters.size() == 1);
  CHECK(s.filters[0].max == 2024);
  CHECK_THROWS_AS(schema_from_json(json::array()), Error);
}

TEST_CASE("frequency matrix json") {
  FrequencyMatrix m;
  m.counts[3] = {1, 2, 3, 4};
  const auto j = to_json(m);
  REQUIRE(j["rows"].size() == 7);
  CHECK(j["rows"][3]["combination"] == "curvature-speed");
  CHECK(j["rows"][3]["x_node"] == "speed");
  CHECK(j["rows"][3]["y_node"] == "curvature");
  CHECK(j["rows"][3]["counts"] == json::array({1, 2, 3, 4}));
}

TEST_CASE("report json and importance csv") {
  const auto set = synthetic::two_zone_speed_set(12, 3);
  ForestConfig cfg;
  cfg.n_trees = 20;
  const auto r = compare_zones(set.vectors, set.zoned, parse_combination("acceleration-speed"), 1, 2, cfg);
  const auto j = to_json(r);
  CHECK(j["combination"] == "acceleration-speed");
  CHECK(j["metrics"].contains("f1"));
  CHECK(j["metrics"].contains("accuracy"));
  CHECK(j["columns"]["x"]["node"] == "acceleration");
  CHECK(j["columns"]["y"]["variables"].size() == 19);
  CHECK(j["members"]["zone_a"] == 12);
  CHECK(j.dump() == to_json(r).dump());

  std::ostringstream out;
  write_importance_csv(out, r);
  std::istringstream in(out.str());
  const auto rows = csv::read_all(in);
  REQUIRE(rows.size() == 39);
  CHECK(rows[0] == csv::Row{"column", "node", "rank", "variable", "importance"});
  CHECK(rows[1][0] == "x");
  CHECK(rows[1][2] == "1");
  CHECK(rows[20][0] == "y");
}

TEST_CASE("sample window json") {
  std::mt19937_64 rng(1);
  const auto t = synthetic::random_walk("w", 30, rng);
  const auto win = sample_for_variable(t, "angles_range");
  const auto j = to_json(win);
  CHECK(j["kind"] == "window");
  CHECK(j["points"].size() == j["features"]["speed"].size());
  CHECK(j["anchor"].is_number_unsigned());
  const auto seg = to_json(sample_for_variable(t, "distance_geometry_3_2"));
  CHECK(seg["kind"] == "signature_segment");
  CHECK(seg["signature"]["k"] == 3);
  CHECK(seg["anchor"].is_null());
  const auto tj = to_json(t);
  CHECK(tj["features"].size() == 5);
  CHECK(tj["points"].size() == 30);
}
