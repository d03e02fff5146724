#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "trajzone/matrix.hpp"

namespace trajzone {

struct ForestConfig {
  std::size_t n_trees = 200;
  std::size_t max_depth = 10;
  bool balanced_class_weight = true;
  std::uint64_t seed = 42;
  double test_fraction = 0.2;
  std::size_t features_per_split = 0;  // 0: floor(sqrt(m))
  std::size_t min_samples_leaf = 1;
  bool bootstrap = true;
  /// Worker threads for tree fitting; 0 uses hardware concurrency. Results
  /// do not depend on this value.
  std::size_t threads = 0;

  /// Throws Error(InvalidArgument) on out-of-range fields.
  void validate() const;
  std::string canonical() const;
};

/// floor(sqrt(m)) unless the config overrides it; always in [1, m].
std::size_t effective_features_per_split(const ForestConfig& config, std::size_t m) noexcept;

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

/// Per class, round(count * test_fraction) members (at least 1) go to the
/// test set, chosen by a seeded shuffle. Binary labels only.
/// Throws Error(InsufficientMembers) when a class has fewer than 2 members.
SplitIndices stratified_split(std::span<const int> labels, const ForestConfig& config);

/// Flat CART tree. Leaves have feature == kLeaf.
struct DecisionTree {
  static constexpr std::size_t kLeaf = static_cast<std::size_t>(-1);

  struct Node {
    std::size_t feature = kLeaf;
    double threshold = 0.0;  // go left when x[feature] <= threshold
    std::size_t left = 0;
    std::size_t right = 0;
    double class1_fraction = 0.0;  // class-weighted share of label 1 at this node
    std::size_t depth = 0;
  };

  std::vector<Node> nodes;
  std::vector<double> impurity_decrease;  // per feature, unnormalized

  double predict_fraction(std::span<const double> x) const noexcept;
  int predict(std::span<const double> x) const noexcept;
  std::size_t depth() const noexcept;
  std::size_t split_count() const noexcept;
};

class Forest {
 public:
  Forest(std::vector<DecisionTree> trees, std::size_t feature_count)
      : trees_(std::move(trees)), feature_count_(feature_count) {}

  const std::vector<DecisionTree>& trees() const noexcept { return trees_; }
  std::size_t feature_count() const noexcept { return feature_count_; }

  /// Majority vote of the trees' class-weighted leaf decisions; a tied vote
  /// falls back to the mean leaf fraction, then to class 0.
  int predict(std::span<const double> x) const noexcept;

 private:
  std::vector<DecisionTree> trees_;
  std::size_t feature_count_;
};

/// Class weights n / (2 n_c) for labels in {0, 1} (all 1 when unbalanced).
std::array<double, 2> class_weights(std::span<const int> labels, bool balanced);

/// Fits n_trees CART trees with Gini impurity under balanced class weights,
/// bootstrap resampling and per-split random feature subsets. Each tree draws
/// from its own stream seeded by (seed, tree index).
/// Throws Error(InvalidArgument) for n < 4 or m < 1 and Error(SingleClass)
/// when y holds one label.
Forest fit_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config);

struct ImportanceVector {
  std::vector<double> values;  // non-negative, sums to 1 unless no_splits
  bool no_splits = false;
};

/// Mean over trees of per-tree normalized weighted impurity decrease,
/// normalized to unit sum.
ImportanceVector gini_importance(const Forest& forest);

struct EvalMetrics {
  double f1 = 0.0;        // macro over the two classes
  double accuracy = 0.0;
  std::array<double, 2> precision{};
  std::array<double, 2> recall{};
  std::array<double, 2> class_f1{};
  std::size_t test_size = 0;
};

EvalMetrics compute_metrics(std::span<const int> truth, std::span<const int> predicted);

/// Throws Error(InvalidArgument) for an empty test set.
EvalMetrics evaluate(const Forest& forest, const Matrix& x, std::span<const int> y,
                     std::span<const std::size_t> rows);

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows);

struct GridCandidate {
  std::size_t n_trees = 0;
  std::size_t max_depth = 0;
  std::size_t features_per_split = 0;  // resolved value
  std::string features_rule;           // "sqrt", "log2", "half", "all"
  double mean_f1 = 0.0;
  double mean_accuracy = 0.0;
};

struct GridSearchResult {
  std::vector<GridCandidate> candidates;  // evaluation order
  std::size_t best = 0;                   // highest mean F1, first on ties
  std::size_t folds = 0;
  std::size_t fits = 0;
};

/// Stratified k-fold search over n_trees {50, 100, 200} x max_depth {5, 10}
/// x features {sqrt, log2, half, all}: 24 candidates. Other fields come
/// from `base`.
GridSearchResult grid_search(const Matrix& x, std::span<const int> y, const ForestConfig& base,
                             std::size_t folds = 5);

}  // namespace trajzone
