#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "trajzone/matrix.hpp"
#include "trajzone/taxonomy.hpp"
#include "trajzone/vectorize.hpp"

namespace trajzone {

struct DbosOptions {
  /// Min-max normalize every subspace column before computing distances.
  bool normalize_columns = true;
  /// 0 computes the radius over all unordered pairs. A positive value
  /// estimates it from that many seeded random pairs instead.
  std::size_t radius_sample_pairs = 0;
  std::uint64_t seed = 42;

  /// Stable text form used in cache keys.
  std::string canonical() const;
};

/// Column-wise min-max scaling into [0, 1]; constant columns become 0.
Matrix minmax_columns(const Matrix& m);

/// Mean Euclidean distance over all n(n-1)/2 unordered row pairs.
/// Throws Error(InvalidArgument) for fewer than 2 rows.
double pairwise_radius(const Matrix& vectors);

/// Seeded estimate of pairwise_radius from `pairs` random distinct-row pairs.
double sampled_radius(const Matrix& vectors, std::size_t pairs, std::uint64_t seed);

struct DbosRaw {
  std::vector<double> scores;                 // 1 - neighbours / (n - 1)
  std::vector<std::size_t> neighbor_counts;   // |{j != i : d(i, j) <= r}|
};

/// Distance-based outlier score for radius r > 0.
DbosRaw dbos_raw(const Matrix& vectors, double radius);

/// Rank-based uniform transform ((average rank - 0.5) / n) followed by a
/// min-max rescale onto [0, 1]. All-equal input maps to all zeros.
std::vector<double> scale_scores(std::span<const double> raw);

/// Decision-boundary zone of a score pair, evaluated literally:
///   0: x < .5 and y < .5
///   1: y > .5 and x < y - .5
///   2: x > .5 and y < x - .5
///   3: everything else (boundaries included)
/// Throws Error(InvalidArgument) outside [0, 1] or for NaN.
int assign_zone(double x, double y);

/// One node's scores over a vectorized dataset, aligned with its row order.
struct ScoreTable {
  TaxonomyNode node;
  std::vector<std::string> trajectory_ids;
  std::vector<double> scores;  // scaled, [0, 1]
  std::vector<double> raw;
  std::vector<std::size_t> neighbor_counts;
  double radius = 0.0;
};

/// Subspace extraction, optional normalization, radius, DBOS and scaling.
ScoreTable score_node(std::span<const FeatureVector> vectors, TaxonomyNode node,
                      const DbosOptions& options = {});

struct ZonedScore {
  std::string trajectory_id;
  Combination combination;
  double x = 0.0;
  double y = 0.0;
  int zone = 0;
};

std::vector<ZonedScore> zone_scores(const ScoreTable& x_table, const ScoreTable& y_table,
                                    const Combination& combo);

/// 7 combinations x 4 zones of trajectory counts; rows follow valid_combinations().
struct FrequencyMatrix {
  std::array<std::array<std::size_t, 4>, 7> counts{};
};

/// Per-node score cache over one immutable set of vectors. Each node is
/// computed at most once; concurrent requests for the same node wait on the
/// single in-flight computation.
class NodeScorer {
 public:
  explicit NodeScorer(std::vector<FeatureVector> vectors, DbosOptions options = {});

  const std::vector<FeatureVector>& vectors() const noexcept { return vectors_; }
  const DbosOptions& options() const noexcept { return options_; }

  /// Throws Error(InsufficientMembers) for fewer than 2 trajectories.
  std::shared_ptr<const ScoreTable> node_scores(TaxonomyNode node);

  /// Installs a previously computed table (e.g. read from disk). Ignored when
  /// the node is already cached or in flight.
  void preload(std::shared_ptr<const ScoreTable> table);

  std::vector<ZonedScore> score_combination(const Combination& combo);
  FrequencyMatrix frequency_heatmap();

 private:
  std::vector<FeatureVector> vectors_;
  DbosOptions options_;
  std::mutex mutex_;
  std::map<TaxonomyNode, std::shared_future<std::shared_ptr<const ScoreTable>>> cache_;
};

/// Convenience wrappers computing through a temporary NodeScorer.
std::vector<ZonedScore> score_combination(std::span<const FeatureVector> vectors,
                                          const Combination& combo,
                                          const DbosOptions& options = {});
FrequencyMatrix frequency_heatmap(std::span<const FeatureVector> vectors,
                                  const DbosOptions& options = {});

/// `trajectory_id,node,score`
void write_scores_csv(std::ostream& out, const ScoreTable& table);
/// `trajectory_id,combination,x,y,zone`
void write_zoned_csv(std::ostream& out, std::span<const ZonedScore> scores);
std::vector<ZonedScore> read_zoned_csv(std::istream& in);

}  // namespace trajzone
