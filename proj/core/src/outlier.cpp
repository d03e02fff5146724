#include "trajzone/outlier.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "trajzone/csv.hpp"
#include "trajzone/error.hpp"

namespace trajzone {
namespace {

double row_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

void require_rows(const Matrix& m, const char* what) {
  if (m.rows() < 2) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs at least 2 vectors");
  }
}

}  // namespace

std::string DbosOptions::canonical() const {
  std::ostringstream s;
  s << "normalize=" << normalize_columns << ";radius_pairs=" << radius_sample_pairs
    << ";seed=" << seed;
  return s.str();
}

Matrix minmax_columns(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      lo = std::min(lo, m(r, c));
      hi = std::max(hi, m(r, c));
    }
    const double span = hi - lo;
    for (std::size_t r = 0; r < m.rows(); ++r)
      out(r, c) = span > 0.0 ? (m(r, c) - lo) / span : 0.0;
  }
  return out;
}

double pairwise_radius(const Matrix& vectors) {
  require_rows(vectors, "pairwise radius");
  const std::size_t n = vectors.rows();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = vectors.row(i);
    double row_sum = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) row_sum += row_distance(a, vectors.row(j));
    total += row_sum;
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return total / pairs;
}

double sampled_radius(const Matrix& vectors, std::size_t pairs, std::uint64_t seed) {
  require_rows(vectors, "sampled radius");
  if (pairs == 0) return pairwise_radius(vectors);
  const std::uint64_t n = vectors.rows();
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (std::size_t p = 0; p < pairs; ++p) {
    // Modulo bias is negligible for n far below 2^64.
    const std::uint64_t i = rng() % n;
    std::uint64_t j = rng() % (n - 1);
    if (j >= i) ++j;
    total += row_distance(vectors.row(i), vectors.row(j));
  }
  return total / static_cast<double>(pairs);
}

DbosRaw dbos_raw(const Matrix& vectors, double radius) {
  require_rows(vectors, "DBOS");
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::InvalidArgument, "DBOS radius must be a finite non-negative value");
  }
  const std::size_t n = vectors.rows();
  DbosRaw out;
  out.neighbor_counts.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = vectors.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (row_distance(a, vectors.row(j)) <= radius) {
        ++out.neighbor_counts[i];
        ++out.neighbor_counts[j];
      }
    }
  }
  out.scores.resize(n);
  const double others = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out.scores[i] = 1.0 - static_cast<double>(out.neighbor_counts[i]) / others;
  return out;
}

std::vector<double> scale_scores(std::span<const double> raw) {
  const std::size_t n = raw.size();
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });

  std::vector<double> uniform(n);
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && raw[order[j + 1]] == raw[order[i]]) ++j;
    // 1-based ranks i+1 .. j+1 share their average.
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    const double u = (avg_rank - 0.5) / dn;
    for (std::size_t k = i; k <= j; ++k) uniform[order[k]] = u;
    i = j + 1;
  }

  const auto [lo_it, hi_it] = std::minmax_element(uniform.begin(), uniform.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (uniform[i] - lo) / (hi - lo);
  return out;
}

int assign_zone(double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "zone scores must lie in [0, 1]");
  }
  if (x < 0.5 && y < 0.5) return 0;
  if (y > 0.5 && x < y - 0.5) return 1;
  if (x > 0.5 && y < x - 0.5) return 2;
  return 3;
}

ScoreTable score_node(std::span<const FeatureVector> vectors, TaxonomyNode node,
                      const DbosOptions& options) {
  if (vectors.size() < 2) {
    throw Error(ErrorCode::InsufficientMembers,
                "outlier scoring needs at least 2 trajectories, got " +
                    std::to_string(vectors.size()));
  }
  const auto columns = node_subspace(node);
  Matrix m = subspace_matrix(vectors, columns);
  if (options.normalize_columns) m = minmax_columns(m);

  ScoreTable table;
  table.node = node;
  table.trajectory_ids.reserve(vectors.size());
  for (const auto& v : vectors) table.trajectory_ids.push_back(v.trajectory_id);
  table.radius = options.radius_sample_pairs > 0
                     ? sampled_radius(m, options.radius_sample_pairs, options.seed)
                     : pairwise_radius(m);
  auto raw = dbos_raw(m, table.radius);
  table.scores = scale_scores(raw.scores);
  table.raw = std::move(raw.scores);
  table.neighbor_counts = std::move(raw.neighbor_counts);
  return table;
}

std::vector<ZonedScore> zone_scores(const ScoreTable& x_table, const ScoreTable& y_table,
                                    const Combination& combo) {
  if (x_table.scores.size() != y_table.scores.size()) {
    throw Error(ErrorCode::Internal, "score tables are not aligned");
  }
  std::vector<ZonedScore> out;
  out.reserve(x_table.scores.size());
  for (std::size_t i = 0; i < x_table.scores.size(); ++i) {
    const double x = x_table.scores[i];
    const double y = y_table.scores[i];
    out.push_back({x_table.trajectory_ids[i], combo, x, y, assign_zone(x, y)});
  }
  return out;
}

NodeScorer::NodeScorer(std::vector<FeatureVector> vectors, DbosOptions options)
    : vectors_(std::move(vectors)), options_(options) {}

std::shared_ptr<const ScoreTable> NodeScorer::node_scores(TaxonomyNode node) {
  std::shared_future<std::shared_ptr<const ScoreTable>> future;
  std::promise<std::shared_ptr<const ScoreTable>> promise;
  bool owner = false;
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(node);
    if (it == cache_.end()) {
      future = promise.get_future().share();
      cache_.emplace(node, future);
      owner = true;
    } else {
      future = it->second;
    }
  }
  if (owner) {
    try {
      promise.set_value(std::make_shared<const ScoreTable>(score_node(vectors_, node, options_)));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  }
  return future.get();
}

void NodeScorer::preload(std::shared_ptr<const ScoreTable> table) {
  if (!table || table->scores.size() != vectors_.size()) {
    throw Error(ErrorCode::InvalidArgument, "preloaded score table does not match the vectors");
  }
  std::promise<std::shared_ptr<const ScoreTable>> promise;
  promise.set_value(table);
  std::lock_guard lock(mutex_);
  cache_.emplace(table->node, promise.get_future().share());
}

std::vector<ZonedScore> NodeScorer::score_combination(const Combination& combo) {
  const auto x = node_scores(combo.x_node);
  const auto y = node_scores(combo.y_node);
  return zone_scores(*x, *y, combo);
}

FrequencyMatrix NodeScorer::frequency_heatmap() {
  FrequencyMatrix m;
  const auto& combos = valid_combinations();
  for (std::size_t r = 0; r < combos.size(); ++r)
    for (const auto& z : score_combination(combos[r])) ++m.counts[r][static_cast<std::size_t>(z.zone)];
  return m;
}

std::vector<ZonedScore> score_combination(std::span<const FeatureVector> vectors,
                                          const Combination& combo, const DbosOptions& options) {
  NodeScorer scorer({vectors.begin(), vectors.end()}, options);
  return scorer.score_combination(combo);
}

FrequencyMatrix frequency_heatmap(std::span<const FeatureVector> vectors,
                                  const DbosOptions& options) {
  NodeScorer scorer({vectors.begin(), vectors.end()}, options);
  return scorer.frequency_heatmap();
}

void write_scores_csv(std::ostream& out, const ScoreTable& table) {
  csv::write_row(out, {"trajectory_id", "node", "score"});
  const std::string node(to_string(table.node));
  for (std::size_t i = 0; i < table.scores.size(); ++i)
    csv::write_row(out, {table.trajectory_ids[i], node, csv::format_double(table.scores[i])});
}

void write_zoned_csv(std::ostream& out, std::span<const ZonedScore> scores) {
  csv::write_row(out, {"trajectory_id", "combination", "x", "y", "zone"});
  for (const auto& s : scores) {
    csv::write_row(out, {s.trajectory_id, to_string(s.combination), csv::format_double(s.x),
                         csv::format_double(s.y), std::to_string(s.zone)});
  }
}

std::vector<ZonedScore> read_zoned_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.next();
  const csv::Row expected{"trajectory_id", "combination", "x", "y", "zone"};
  if (!header || *header != expected) {
    throw Error(ErrorCode::InvalidArgument,
                "zoned CSV header must be trajectory_id,combination,x,y,zone");
  }
  std::vector<ZonedScore> out;
  while (auto row = reader.next()) {
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != 5) throw Error(ErrorCode::InvalidArgument, "malformed zoned CSV row");
    ZonedScore z;
    z.trajectory_id = (*row)[0];
    z.combination = parse_combination((*row)[1]);
    const auto x = csv::parse_double((*row)[2]);
    const auto y = csv::parse_double((*row)[3]);
    const auto zone = csv::parse_double((*row)[4]);
    if (!x || !y || !zone) throw Error(ErrorCode::InvalidArgument, "malformed zoned CSV row");
    z.x = *x;
    z.y = *y;
    z.zone = static_cast<int>(*zone);
    if (z.zone != assign_zone(z.x, z.y)) {
      throw Error(ErrorCode::InvalidArgument,
                  "zoned CSV row for '" + z.trajectory_id + "' has an inconsistent zone");
    }
    out.push_back(std::move(z));
  }
  return out;
}

}  // namespace trajzone
