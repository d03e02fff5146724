#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trajzone/statistics.hpp"

using namespace trajzone;

namespace {

bool close(double a, double b, double tol = 1e-9) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

void check_against_oracle(const std::vector<double>& x) {
  const auto got = summarize_series(x);
  const auto ref = oracle::statistics(x);
  for (std::size_t i = 0; i < kStatisticCount; ++i) {
    INFO("statistic ", to_string(static_cast<Statistic>(i)), " n=", x.size());
    CHECK(close(got[i], ref[i]));
  }
}

}  // namespace

TEST_CASE("symmetric triple") {
  const std::vector<double> x{1, 2, 3};
  const auto s = summarize_series(x);
  CHECK(get(s, Statistic::Mean) == 2.0);
  CHECK(get(s, Statistic::QuantMedian) == 2.0);
  CHECK(get(s, Statistic::Sd) == doctest::Approx(1.0));
  CHECK(get(s, Statistic::Range) == 2.0);
  CHECK(get(s, Statistic::Iqr) == doctest::Approx(1.0));
  CHECK(get(s, Statistic::Skew) == doctest::Approx(0.0));
  CHECK(get(s, Statistic::Mad) == 1.0);
}

TEST_CASE("constant series clamps") {
  const std::vector<double> x{5, 5, 5, 5};
  const auto s = summarize_series(x);
  CHECK(get(s, Statistic::Sd) == 0.0);
  CHECK(get(s, Statistic::Vcoef) == 0.0);
  CHECK(get(s, Statistic::Skew) == 0.0);
  CHECK(get(s, Statistic::Kurt) == 0.0);
  CHECK(get(s, Statistic::Mean) == 5.0);
}

TEST_CASE("single value and zero mean") {
  const auto one = summarize_series(std::vector<double>{3.5});
  CHECK(get(one, Statistic::Sd) == 0.0);
  CHECK(get(one, Statistic::Meanse) == 0.0);
  CHECK(get(one, Statistic::QuantMax) == 3.5);
  const auto zero = summarize_series(std::vector<double>{-1, 1});
  CHECK(get(zero, Statistic::Vcoef) == 0.0);
}

TEST_CASE("known kurtosis") {
  // reference values from pandas
  std::vector<double> x;
  for (int i = 1; i <= 10; ++i) x.push_back(i);
  CHECK(get(summarize_series(x), Statistic::Kurt) == doctest::Approx(-1.2).epsilon(1e-12));
  CHECK(get(summarize_series(std::vector<double>{1, 2, 3, 10}), Statistic::Skew) ==
        doctest::Approx(1.763632614803888).epsilon(1e-12));
}

TEST_CASE("quantile interpolation") {
  const std::vector<double> s{10, 20, 30, 40};
  CHECK(quantile_sorted(s, 0.0) == 10);
  CHECK(quantile_sorted(s, 1.0) == 40);
  CHECK(quantile_sorted(s, 0.5) == 25);
  CHECK(quantile_sorted(s, 0.25) == doctest::Approx(17.5));
}

TEST_CASE("uniform random series of 1000 values") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(1000);
  for (auto& v : x) v = u(rng);
  check_against_oracle(x);
}

TEST_CASE("random lengths and shapes") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> len(1, 300);
  std::lognormal_distribution<double> ln(0, 1.5);
  for (int r = 0; r < 60; ++r) {
    std::vector<double> x(len(rng));
    for (auto& v : x) v = r % 3 == 0 ? std::round(ln(rng)) : ln(rng) - 2.0;
    check_against_oracle(x);
  }
  check_against_oracle({2.0, 2.0, 2.0});
}

TEST_CASE("affine maps") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd(3, 2);
  std::vector<double> x(200), y(200);
  for (auto& v : x) v = nd(rng);
  const double a = 2.5, b = -4.0;
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b;
  const auto sx = summarize_series(x), sy = summarize_series(y);
  CHECK(get(sy, Statistic::Mean) == doctest::Approx(a * get(sx, Statistic::Mean) + b));
  CHECK(get(sy, Statistic::Quant90) == doctest::Approx(a * get(sx, Statistic::Quant90) + b));
  CHECK(get(sy, Statistic::Sd) == doctest::Approx(a * get(sx, Statistic::Sd)));
  CHECK(get(sy, Statistic::Skew) == doctest::Approx(get(sx, Statistic::Skew)).epsilon(1e-9));
  CHECK(get(sy, Statistic::Kurt) == doctest::Approx(get(sx, Statistic::Kurt)).epsilon(1e-9));
}

TEST_CASE("names round trip") {
  for (std::size_t i = 0; i < kStatisticCount; ++i) {
    const auto s = static_cast<Statistic>(i);
    CHECK(parse_statistic(to_string(s)) == s);
  }
  CHECK(to_string(Statistic::Quant05) == "quant_05");
  CHECK_FALSE(parse_statistic("median").has_value());
}
