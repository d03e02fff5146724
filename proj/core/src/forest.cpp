#include "trajzone/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "trajzone/error.hpp"

namespace trajzone {
namespace {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased integer in [0, bound). std::uniform_int_distribution is not
// specified bit-for-bit across standard libraries, so results would not be
// portable with it.
std::uint64_t bounded(Rng& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % bound;
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[bounded(rng, i)]);
}

void check_binary(std::span<const int> labels) {
  for (int y : labels)
    if (y != 0 && y != 1) throw Error(ErrorCode::InvalidArgument, "labels must be 0 or 1");
}

double gini(double w0, double w1) noexcept {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  const double p0 = w0 / w, p1 = w1 / w;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct Sample {
  std::size_t row;
  int label;
};

class TreeBuilder {
 public:
  TreeBuilder(const Matrix& x, const ForestConfig& config, std::array<double, 2> weights,
              std::size_t mtry, Rng& rng)
      : x_(x), config_(config), weights_(weights), mtry_(mtry), rng_(rng) {
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
  }

  DecisionTree build(std::vector<Sample> samples) {
    tree_.impurity_decrease.assign(x_.cols(), 0.0);
    grow(std::move(samples), 0);
    return std::move(tree_);
  }

 private:
  struct Split {
    std::size_t feature = DecisionTree::kLeaf;
    double threshold = 0.0;
    double decrease = -1.0;
  };

  std::size_t grow(std::vector<Sample> samples, std::size_t depth) {
    double w0 = 0.0, w1 = 0.0;
    for (const auto& s : samples) (s.label ? w1 : w0) += weights_[s.label];

    const std::size_t id = tree_.nodes.size();
    tree_.nodes.push_back({});
    tree_.nodes[id].class1_fraction = (w0 + w1) > 0.0 ? w1 / (w0 + w1) : 0.0;
    tree_.nodes[id].depth = depth;

    const bool pure = w0 == 0.0 || w1 == 0.0;
    if (pure || depth >= config_.max_depth || samples.size() < 2 * config_.min_samples_leaf)
      return id;

    const Split split = find_split(samples, w0, w1);
    if (split.feature == DecisionTree::kLeaf) return id;

    std::vector<Sample> left, right;
    for (const auto& s : samples)
      (x_(s.row, split.feature) <= split.threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    tree_.impurity_decrease[split.feature] += split.decrease;
    tree_.nodes[id].feature = split.feature;
    tree_.nodes[id].threshold = split.threshold;
    const std::size_t l = grow(std::move(left), depth + 1);
    const std::size_t r = grow(std::move(right), depth + 1);
    tree_.nodes[id].left = l;
    tree_.nodes[id].right = r;
    return id;
  }

  Split find_split(const std::vector<Sample>& samples, double w0, double w1) {
    // Partial Fisher-Yates: the first mtry entries become the candidate set.
    const std::size_t m = features_.size();
    for (std::size_t i = 0; i < m && i < mtry_; ++i)
      std::swap(features_[i], features_[i + bounded(rng_, m - i)]);

    std::vector<std::size_t> candidates(features_.begin(), features_.begin() + mtry_);
    std::sort(candidates.begin(), candidates.end());
    Split best;
    for (std::size_t f : candidates) consider(samples, f, w0, w1, best);

    // Keep drawing when every candidate was constant on this node.
    for (std::size_t i = mtry_; best.feature == DecisionTree::kLeaf && i < m; ++i) {
      std::swap(features_[i], features_[i + bounded(rng_, m - i)]);
      consider(samples, features_[i], w0, w1, best);
    }
    return best;
  }

  void consider(const std::vector<Sample>& samples, std::size_t feature, double w0, double w1,
                Split& best) {
    values_.clear();
    for (const auto& s : samples) values_.push_back({x_(s.row, feature), s.label});
    std::sort(values_.begin(), values_.end(), [](const auto& a, const auto& b) {
      return a.first < b.first || (a.first == b.first && a.second < b.second);
    });

    const double total = w0 + w1;
    const double parent = total * gini(w0, w1);
    const std::size_t n = values_.size();
    const std::size_t min_leaf = config_.min_samples_leaf;
    double l0 = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      (values_[i].second ? l1 : l0) += weights_[values_[i].second];
      if (values_[i].first == values_[i + 1].first) continue;
      if (i + 1 < min_leaf || n - (i + 1) < min_leaf) continue;
      const double r0 = w0 - l0, r1 = w1 - l1;
      const double decrease = parent - (l0 + l1) * gini(l0, l1) - (r0 + r1) * gini(r0, r1);
      if (decrease > best.decrease) {
        const double a = values_[i].first, b = values_[i + 1].first;
        double threshold = a + (b - a) / 2.0;
        if (!(threshold < b)) threshold = a;
        best = {feature, threshold, std::max(decrease, 0.0)};
      }
    }
  }

  const Matrix& x_;
  const ForestConfig& config_;
  std::array<double, 2> weights_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<std::size_t> features_;
  std::vector<std::pair<double, int>> values_;
  DecisionTree tree_;
};

std::size_t worker_count(const ForestConfig& config, std::size_t jobs) {
  std::size_t threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  return std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(jobs, 1));
}

}  // namespace

void ForestConfig::validate() const {
  if (n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be at least 1");
  if (max_depth < 1) throw Error(ErrorCode::InvalidArgument, "max_depth must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
  if (min_samples_leaf < 1)
    throw Error(ErrorCode::InvalidArgument, "min_samples_leaf must be at least 1");
}

std::string ForestConfig::canonical() const {
  std::ostringstream s;
  s << "trees=" << n_trees << ";depth=" << max_depth << ";balanced=" << balanced_class_weight
    << ";seed=" << seed << ";test=" << test_fraction << ";mtry=" << features_per_split
    << ";leaf=" << min_samples_leaf << ";bootstrap=" << bootstrap;
  return s.str();
}

std::size_t effective_features_per_split(const ForestConfig& config, std::size_t m) noexcept {
  if (m == 0) return 0;
  std::size_t k = config.features_per_split;
  if (k == 0) k = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m))));
  return std::clamp<std::size_t>(k, 1, m);
}

SplitIndices stratified_split(std::span<const int> labels, const ForestConfig& config) {
  config.validate();
  check_binary(labels);
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < labels.size(); ++i) members[labels[i]].push_back(i);
  for (int c = 0; c < 2; ++c) {
    if (members[c].size() < 2) {
      throw Error(ErrorCode::InsufficientMembers,
                  "insufficient members for stratified split: class " + std::to_string(c) +
                      " has " + std::to_string(members[c].size()));
    }
  }

  Rng rng(config.seed);
  SplitIndices out;
  for (auto& m : members) {
    const auto count = static_cast<double>(m.size());
    auto n_test = static_cast<std::size_t>(std::llround(count * config.test_fraction));
    n_test = std::clamp<std::size_t>(n_test, 1, m.size() - 1);
    shuffle(m, rng);
    out.test.insert(out.test.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), m.begin() + static_cast<std::ptrdiff_t>(n_test), m.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

double DecisionTree::predict_fraction(std::span<const double> x) const noexcept {
  std::size_t i = 0;
  while (nodes[i].feature != kLeaf)
    i = x[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
  return nodes[i].class1_fraction;
}

int DecisionTree::predict(std::span<const double> x) const noexcept {
  return predict_fraction(x) > 0.5 ? 1 : 0;
}

std::size_t DecisionTree::depth() const noexcept {
  std::size_t d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t DecisionTree::split_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.feature != kLeaf; }));
}

int Forest::predict(std::span<const double> x) const noexcept {
  std::size_t votes1 = 0;
  double fraction = 0.0;
  for (const auto& t : trees_) {
    const double f = t.predict_fraction(x);
    fraction += f;
    votes1 += f > 0.5 ? 1 : 0;
  }
  const std::size_t votes0 = trees_.size() - votes1;
  if (votes1 != votes0) return votes1 > votes0 ? 1 : 0;
  return fraction / static_cast<double>(trees_.size()) > 0.5 ? 1 : 0;
}

std::array<double, 2> class_weights(std::span<const int> labels, bool balanced) {
  if (!balanced) return {1.0, 1.0};
  std::array<double, 2> counts{};
  for (int y : labels) counts[y] += 1.0;
  const auto n = static_cast<double>(labels.size());
  return {counts[0] > 0 ? n / (2.0 * counts[0]) : 0.0, counts[1] > 0 ? n / (2.0 * counts[1]) : 0.0};
}

Forest fit_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config) {
  config.validate();
  check_binary(y);
  if (x.rows() != y.size()) throw Error(ErrorCode::InvalidArgument, "X and y row counts differ");
  if (x.rows() < 4) throw Error(ErrorCode::InvalidArgument, "forest fitting needs at least 4 rows");
  if (x.cols() < 1) throw Error(ErrorCode::InvalidArgument, "forest fitting needs at least 1 feature");
  const auto ones = std::count(y.begin(), y.end(), 1);
  if (ones == 0 || static_cast<std::size_t>(ones) == y.size())
    throw Error(ErrorCode::SingleClass, "training labels contain a single class");

  const auto weights = class_weights(y, config.balanced_class_weight);
  const std::size_t mtry = effective_features_per_split(config, x.cols());
  const std::size_t n = x.rows();

  std::vector<DecisionTree> trees(config.n_trees);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    for (std::size_t t = next++; t < trees.size(); t = next++) {
      try {
        Rng rng(splitmix64(config.seed ^ splitmix64(t)));
        std::vector<Sample> samples;
        samples.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t row = config.bootstrap ? bounded(rng, n) : i;
          samples.push_back({row, y[row]});
        }
        TreeBuilder builder(x, config, weights, mtry, rng);
        trees[t] = builder.build(std::move(samples));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };

  const std::size_t workers = worker_count(config, trees.size());
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return Forest(std::move(trees), x.cols());
}

ImportanceVector gini_importance(const Forest& forest) {
  ImportanceVector out;
  out.values.assign(forest.feature_count(), 0.0);
  for (const auto& tree : forest.trees()) {
    const double total =
        std::accumulate(tree.impurity_decrease.begin(), tree.impurity_decrease.end(), 0.0);
    if (total <= 0.0) continue;
    for (std::size_t f = 0; f < out.values.size(); ++f)
      out.values[f] += tree.impurity_decrease[f] / total;
  }
  const double sum = std::accumulate(out.values.begin(), out.values.end(), 0.0);
  if (sum <= 0.0) {
    out.no_splits = true;
    std::fill(out.values.begin(), out.values.end(), 0.0);
    return out;
  }
  for (double& v : out.values) v /= sum;
  return out;
}

EvalMetrics compute_metrics(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.empty() || truth.size() != predicted.size()) {
    throw Error(ErrorCode::InvalidArgument, "metrics need equally sized, non-empty label sets");
  }
  std::array<std::array<double, 2>, 2> confusion{};  // [truth][predicted]
  for (std::size_t i = 0; i < truth.size(); ++i) confusion[truth[i]][predicted[i]] += 1.0;

  EvalMetrics m;
  m.test_size = truth.size();
  m.accuracy = (confusion[0][0] + confusion[1][1]) / static_cast<double>(truth.size());
  for (int c = 0; c < 2; ++c) {
    const double tp = confusion[c][c];
    const double predicted_c = confusion[0][c] + confusion[1][c];
    const double actual_c = confusion[c][0] + confusion[c][1];
    m.precision[c] = predicted_c > 0 ? tp / predicted_c : 0.0;
    m.recall[c] = actual_c > 0 ? tp / actual_c : 0.0;
    const double pr = m.precision[c] + m.recall[c];
    m.class_f1[c] = pr > 0 ? 2.0 * m.precision[c] * m.recall[c] / pr : 0.0;
  }
  m.f1 = (m.class_f1[0] + m.class_f1[1]) / 2.0;
  return m;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
  Matrix out(rows.size(), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = m.row(rows[r]);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

EvalMetrics evaluate(const Forest& forest, const Matrix& x, std::span<const int> y,
                     std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "evaluation needs a non-empty test set");
  std::vector<int> truth, predicted;
  for (std::size_t r : rows) {
    truth.push_back(y[r]);
    predicted.push_back(forest.predict(x.row(r)));
  }
  return compute_metrics(truth, predicted);
}

GridSearchResult grid_search(const Matrix& x, std::span<const int> y, const ForestConfig& base,
                             std::size_t folds) {
  base.validate();
  check_binary(y);
  std::array<std::vector<std::size_t>, 2> members;
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  const std::size_t smallest = std::min(members[0].size(), members[1].size());
  if (smallest < 2) {
    throw Error(ErrorCode::InsufficientMembers,
                "grid search needs at least 2 members of each class");
  }
  folds = std::clamp<std::size_t>(folds, 2, smallest);

  // Stratified fold assignment: shuffled class members dealt round-robin.
  std::vector<std::size_t> fold_of(y.size());
  Rng rng(base.seed);
  for (auto& m : members) {
    shuffle(m, rng);
    for (std::size_t i = 0; i < m.size(); ++i) fold_of[m[i]] = i % folds;
  }

  const std::size_t m = x.cols();
  const std::pair<const char*, std::size_t> rules[] = {
      {"sqrt", static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(m))))},
      {"log2", static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(m))))},
      {"half", m / 2},
      {"all", m},
  };

  GridSearchResult result;
  result.folds = folds;
  for (std::size_t trees : {50, 100, 200}) {
    for (std::size_t depth : {5, 10}) {
      for (const auto& [rule, k] : rules) {
        GridCandidate cand;
        cand.n_trees = trees;
        cand.max_depth = depth;
        cand.features_per_split = std::clamp<std::size_t>(k, 1, m);
        cand.features_rule = rule;
        ForestConfig cfg = base;
        cfg.n_trees = trees;
        cfg.max_depth = depth;
        cfg.features_per_split = cand.features_per_split;
        for (std::size_t f = 0; f < folds; ++f) {
          std::vector<std::size_t> train, test;
          for (std::size_t i = 0; i < y.size(); ++i) (fold_of[i] == f ? test : train).push_back(i);
          const Matrix xt = select_rows(x, train);
          std::vector<int> yt;
          for (std::size_t i : train) yt.push_back(y[i]);
          const Forest forest = fit_forest(xt, yt, cfg);
          const auto metrics = evaluate(forest, x, y, test);
          cand.mean_f1 += metrics.f1;
          cand.mean_accuracy += metrics.accuracy;
          ++result.fits;
        }
        cand.mean_f1 /= static_cast<double>(folds);
        cand.mean_accuracy /= static_cast<double>(folds);
        result.candidates.push_back(cand);
      }
    }
  }
  for (std::size_t i = 1; i < result.candidates.size(); ++i)
    if (result.candidates[i].mean_f1 > result.candidates[result.best].mean_f1) result.best = i;
  return result;
}

}  // namespace trajzone
