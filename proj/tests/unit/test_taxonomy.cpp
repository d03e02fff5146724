#include <doctest.h>

#include <set>

#include "trajzone/error.hpp"
#include "trajzone/taxonomy.hpp"
#include "trajzone/vectorize.hpp"

using namespace trajzone;
using N = TaxonomyNode;

TEST_CASE("tree shape") {
  CHECK(is_root(N::Geometric));
  CHECK(is_root(N::Kinematic));
  CHECK(parent(N::Speed) == N::Kinematic);
  CHECK(parent(N::Acceleration) == N::Kinematic);
  CHECK(parent(N::Curvature) == N::Geometric);
  CHECK(parent(N::Indentation) == N::Geometric);
  CHECK_FALSE(parent(N::Geometric).has_value());
  CHECK(family(N::Indentation) == N::Geometric);
  for (auto n : kTaxonomyNodes) {
    CHECK(parse_taxonomy_node(to_string(n)) == n);
    CHECK(parse_taxonomy_node(display_name(n)) == n);
  }
}

TEST_CASE("seven valid combinations in heatmap order") {
  const auto& c = valid_combinations();
  const std::vector<std::string> names{"geometric-kinematic", "acceleration-speed",
                                       "curvature-indentation", "curvature-speed",
                                       "indentation-speed", "acceleration-curvature",
                                       "acceleration-indentation"};
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(to_string(c[i]) == names[i]);
    CHECK(combination_index(c[i]) == i);
    CHECK(parse_combination(names[i]) == c[i]);
  }
  CHECK(c[0] == Combination{N::Kinematic, N::Geometric});
}

TEST_CASE("axis rule is independent of argument order") {
  CHECK(validate_combination(N::Geometric, N::Kinematic) == Combination{N::Kinematic, N::Geometric});
  CHECK(validate_combination(N::Kinematic, N::Geometric) == Combination{N::Kinematic, N::Geometric});
  CHECK(validate_combination(N::Curvature, N::Speed).y_node == N::Curvature);
  CHECK(validate_combination(N::Speed, N::Acceleration).x_node == N::Acceleration);
  CHECK(parse_combination("SPEED-curvature") == parse_combination("curvature-speed"));
}

TEST_CASE("exactly 7 of 15 unordered pairs are legal") {
  std::size_t legal = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const auto a = kTaxonomyNodes[i], b = kTaxonomyNodes[j];
      bool ok = true;
      try {
        validate_combination(a, b);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidCombination);
        ok = false;
      }
      if (i < j && ok) ++legal;
      if (i == j) CHECK_FALSE(ok);
    }
  CHECK(legal == 7);
}

TEST_CASE("illegal pairs") {
  CHECK_THROWS_AS(validate_combination(N::Kinematic, N::Acceleration), Error);
  CHECK_THROWS_AS(validate_combination(N::Speed, N::Speed), Error);
  CHECK_THROWS_AS(validate_combination(N::Kinematic, N::Curvature), Error);
  CHECK_THROWS_AS(parse_combination("kinematic-speed"), Error);
  CHECK_THROWS_AS(parse_combination("speed"), Error);
  CHECK_THROWS_AS(parse_combination("speed-foo"), Error);
}

TEST_CASE("combination subspaces never overlap") {
  for (const auto& c : valid_combinations()) {
    const auto x = node_subspace(c.x_node), y = node_subspace(c.y_node);
    std::set<std::size_t> all(x.begin(), x.end());
    all.insert(y.begin(), y.end());
    CHECK(all.size() == x.size() + y.size());
  }
}
