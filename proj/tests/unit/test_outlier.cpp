#include <doctest.h>

#include <random>
#include <sstream>
#include <thread>

#include "oracles.hpp"
#include "synthetic.hpp"
#include "trajzone/error.hpp"
#include "trajzone/outlier.hpp"

using namespace trajzone;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  return m;
}

std::vector<FeatureVector> planted_vectors(std::size_t cluster, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i <= cluster; ++i) {
    FeatureVector v;
    v.trajectory_id = "v" + std::to_string(i);
    for (auto& x : v.values) x = 10.0 + nd(rng);
    out.push_back(v);
  }
  for (std::size_t c = 0; c < 19; ++c) out.back().values[c] = 1000.0;  // speed block
  return out;
}

}  // namespace

TEST_CASE("radius examples") {
  CHECK(pairwise_radius(from_rows({{0, 0}, {0, 4}})) == 4.0);
  CHECK(pairwise_radius(from_rows({{0}, {1}, {2}})) == doctest::Approx(4.0 / 3.0));
  CHECK_THROWS_AS(pairwise_radius(from_rows({{1}})), Error);
}

TEST_CASE("radius matches the brute force oracle") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<std::vector<double>> rows(50, std::vector<double>(5));
  for (auto& r : rows)
    for (auto& x : r) x = u(rng);
  const double got = pairwise_radius(from_rows(rows));
  CHECK(std::abs(got - oracle::mean_pairwise_distance(rows)) <= 1e-9 * got);
}

TEST_CASE("sampled radius is seeded and close") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  Matrix m(300, 4);
  for (std::size_t r = 0; r < 300; ++r)
    for (std::size_t c = 0; c < 4; ++c) m(r, c) = u(rng);
  const double a = sampled_radius(m, 20000, 7), b = sampled_radius(m, 20000, 7);
  CHECK(a == b);
  CHECK(a == doctest::Approx(pairwise_radius(m)).epsilon(0.02));
}

TEST_CASE("raw scores") {
  const auto same = dbos_raw(from_rows({{1, 1}, {1, 1}, {1, 1}}), 0.0);
  for (double s : same.scores) CHECK(s == 0.0);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({0.01 * i, 0.0});
  rows.push_back({100.0, 100.0});
  const auto m = from_rows(rows);
  const auto raw = dbos_raw(m, pairwise_radius(m));
  CHECK(raw.scores[10] == 1.0);
  CHECK(raw.neighbor_counts[10] == 0);
  for (int i = 0; i < 10; ++i) CHECK(raw.scores[static_cast<std::size_t>(i)] == doctest::Approx(0.1));
}

TEST_CASE("scaling") {
  const std::vector<double> a{0.1, 0.5, 0.9};
  CHECK(scale_scores(a) == std::vector<double>{0.0, 0.5, 1.0});
  const std::vector<double> eq{0.3, 0.3, 0.3, 0.3};
  CHECK(scale_scores(eq) == std::vector<double>(4, 0.0));
  const std::vector<double> ties{1, 1, 2};
  const auto s = scale_scores(ties);
  CHECK(s[0] == s[1]);
  CHECK(s[2] == 1.0);
  CHECK(s[0] == 0.0);
}

TEST_CASE("scaling is monotone and bounded") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(0, 20);
  std::vector<double> raw(200);
  for (auto& r : raw) r = u(rng) / 20.0;
  const auto s = scale_scores(raw);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(s[i] >= 0.0);
    CHECK(s[i] <= 1.0);
    for (std::size_t j = 0; j < raw.size(); ++j)
      if (raw[i] < raw[j]) CHECK(s[i] < s[j]);
  }
}

TEST_CASE("zone examples") {
  CHECK(assign_zone(0.2407, 1.0) == 1);
  CHECK(assign_zone(0.8519, 0.0566) == 2);
  CHECK(assign_zone(0.0566, 1.0) == 1);
  CHECK(assign_zone(1.0, 0.1887) == 2);
  CHECK(assign_zone(0.5, 0.5) == 3);
  CHECK(assign_zone(0.3, 0.2) == 0);
  CHECK(assign_zone(0.9, 0.9) == 3);
  CHECK(assign_zone(0.0, 0.5) == 3);
  CHECK(assign_zone(0.5, 0.0) == 3);
  CHECK_THROWS_AS(assign_zone(-0.1, 0.2), Error);
  CHECK_THROWS_AS(assign_zone(0.2, 1.01), Error);
  CHECK_THROWS_AS(assign_zone(std::nan(""), 0.2), Error);
}

TEST_CASE("zone agrees with the truth table") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 20000; ++i) {
    const double x = u(rng), y = u(rng);
    REQUIRE(assign_zone(x, y) == oracle::zone_truth_table(x, y));
  }
  for (int i = 0; i <= 20; ++i)
    for (int j = 0; j <= 20; ++j)
      CHECK(assign_zone(i / 20.0, j / 20.0) == oracle::zone_truth_table(i / 20.0, j / 20.0));
}

TEST_CASE("planted outlier is the speed maximum") {
  const auto vs = planted_vectors(50, 5);
  const auto t = score_node(vs, TaxonomyNode::Speed);
  CHECK(t.scores.back() == 1.0);
  for (std::size_t i = 0; i + 1 < vs.size(); ++i) CHECK(t.scores[i] < 0.5);
  const auto zoned = score_combination(vs, parse_combination("acceleration-speed"));
  CHECK(zoned.back().y == 1.0);
}

TEST_CASE("identical trajectories all land in zone 0") {
  std::vector<FeatureVector> vs(6);
  for (std::size_t i = 0; i < vs.size(); ++i) {
    vs[i].trajectory_id = "t" + std::to_string(i);
    vs[i].values.fill(3.0);
  }
  for (const auto& combo : valid_combinations())
    for (const auto& z : score_combination(vs, combo)) {
      CHECK(z.x == 0.0);
      CHECK(z.y == 0.0);
      CHECK(z.zone == 0);
    }
  const auto h = frequency_heatmap(vs);
  for (const auto& row : h.counts) CHECK(row[0] == 6);
}

TEST_CASE("scores are scale invariant and deterministic") {
  auto vs = vectorize_dataset(synthetic::random_dataset(40, 8));
  auto scaled = vs;
  for (auto& v : scaled)
    for (auto& x : v.values) x *= 7.3;
  for (const auto& combo : valid_combinations()) {
    const auto a = score_combination(vs, combo), b = score_combination(scaled, combo);
    const auto c = score_combination(vs, combo);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].x == b[i].x);
      CHECK(a[i].y == b[i].y);
      CHECK(a[i].zone == b[i].zone);
      CHECK(a[i].x == c[i].x);
    }
  }
}

TEST_CASE("heatmap rows sum to the trajectory count") {
  const auto vs = vectorize_dataset(synthetic::random_dataset(30, 9));
  NodeScorer scorer(vs);
  const auto h = scorer.frequency_heatmap();
  for (std::size_t r = 0; r < 7; ++r) {
    std::size_t sum = 0;
    for (auto c : h.counts[r]) sum += c;
    CHECK(sum == 30);
    const auto zoned = scorer.score_combination(valid_combinations()[r]);
    for (int z = 0; z < 4; ++z)
      CHECK(h.counts[r][static_cast<std::size_t>(z)] ==
            static_cast<std::size_t>(std::count_if(zoned.begin(), zoned.end(),
                                                   [&](const ZonedScore& s) { return s.zone == z; })));
  }
}

TEST_CASE("node scorer shares one computation across threads") {
  const auto vs = vectorize_dataset(synthetic::random_dataset(25, 10));
  NodeScorer scorer(vs);
  std::vector<std::shared_ptr<const ScoreTable>> got(8);
  {
    std::vector<std::jthread> ts;
    for (std::size_t i = 0; i < got.size(); ++i)
      ts.emplace_back([&, i] { got[i] = scorer.node_scores(TaxonomyNode::Curvature); });
  }
  for (const auto& g : got) CHECK(g.get() == got[0].get());
  std::vector<FeatureVector> one(vs.begin(), vs.begin() + 1);
  NodeScorer tiny(one);
  CHECK_THROWS_AS(tiny.node_scores(TaxonomyNode::Speed), Error);
}

TEST_CASE("zoned csv round trip") {
  const auto vs = vectorize_dataset(synthetic::random_dataset(15, 11));
  const auto z = score_combination(vs, parse_combination("curvature-speed"));
  std::ostringstream out;
  write_zoned_csv(out, z);
  std::istringstream in(out.str());
  const auto back = read_zoned_csv(in);
  REQUIRE(back.size() == z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    CHECK(back[i].trajectory_id == z[i].trajectory_id);
    CHECK(back[i].x == z[i].x);
    CHECK(back[i].y == z[i].y);
    CHECK(back[i].zone == z[i].zone);
    CHECK(back[i].combination == z[i].combination);
  }
  std::istringstream bad("trajectory_id,combination,x,y,zone\na,curvature-speed,0.1,0.1,3\n");
  CHECK_THROWS_AS(read_zoned_csv(bad), Error);
}

TEST_CASE("no normalization option changes radius units") {
  const auto vs = vectorize_dataset(synthetic::random_dataset(10, 12));
  DbosOptions raw_opts;
  raw_opts.normalize_columns = false;
  const auto a = score_node(vs, TaxonomyNode::Speed, raw_opts);
  const auto b = score_node(vs, TaxonomyNode::Speed);
  CHECK(a.radius != b.radius);
  CHECK(DbosOptions{}.canonical() != raw_opts.canonical());
}
