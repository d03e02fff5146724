#include "trajzone/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "trajzone/error.hpp"
#include "trajzone/point_features.hpp"

namespace trajzone {
namespace {

const VariableDescriptor& lookup_variable(std::string_view variable) {
  const auto idx = variable_index(variable);
  if (!idx) {
    throw Error(ErrorCode::InvalidArgument, "unknown statistical variable '" +
                                                std::string(variable) + "'");
  }
  return variable_catalog()[*idx];
}

FeatureSeries featurize(const Trajectory& t) {
  return t.features ? *t.features : compute_point_features(t);
}

FeatureSeries slice(const FeatureSeries& f, PointRange r) {
  auto cut = [r](const std::vector<double>& v) {
    return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(r.begin),
                               v.begin() + static_cast<std::ptrdiff_t>(r.end));
  };
  return {cut(f.speed), cut(f.acceleration), cut(f.angle), cut(f.distance), cut(f.bearing)};
}

SampleWindow make_window(const Trajectory& t, const FeatureSeries& features, PointRange range) {
  SampleWindow w;
  w.trajectory_id = t.id;
  w.range = range;
  w.points.assign(t.points.begin() + static_cast<std::ptrdiff_t>(range.begin),
                  t.points.begin() + static_cast<std::ptrdiff_t>(range.end));
  w.features = slice(features, range);
  return w;
}

ImportanceColumn make_column(TaxonomyNode node, const std::vector<std::size_t>& features,
                             const std::vector<double>& importance,
                             const std::vector<bool>& in_node) {
  ImportanceColumn col{node, {}};
  const auto& catalog = variable_catalog();
  for (std::size_t i = 0; i < features.size(); ++i)
    if (in_node[features[i]]) col.variables.push_back({catalog[features[i]].name, importance[i]});
  // Stable: equal importances keep catalog order.
  std::stable_sort(col.variables.begin(), col.variables.end(),
                   [](const RankedVariable& a, const RankedVariable& b) {
                     return a.importance > b.importance;
                   });
  return col;
}

}  // namespace

std::vector<std::size_t> combination_features(const Combination& combo) {
  auto features = node_subspace(combo.x_node);
  const auto y = node_subspace(combo.y_node);
  features.insert(features.end(), y.begin(), y.end());
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  return features;
}

ComparisonReport compare_zones(std::span<const FeatureVector> vectors,
                               std::span<const ZonedScore> zoned, const Combination& combo,
                               int zone_a, int zone_b, const ForestConfig& config) {
  if (zone_a < 0 || zone_a > 3 || zone_b < 0 || zone_b > 3) {
    throw Error(ErrorCode::InvalidArgument, "zones must be integers in 0..3");
  }
  if (zone_a == zone_b) {
    throw Error(ErrorCode::IdenticalZones,
                "cannot compare zone " + std::to_string(zone_a) + " with itself");
  }

  std::unordered_map<std::string_view, int> zone_of;
  for (const auto& z : zoned) {
    if (!(z.combination == combo)) {
      throw Error(ErrorCode::InvalidArgument, "zoned scores belong to combination '" +
                                                  to_string(z.combination) + "'");
    }
    zone_of.emplace(z.trajectory_id, z.zone);
  }

  std::vector<FeatureVector> selected;
  std::vector<int> labels;
  std::size_t members_a = 0, members_b = 0;
  for (const auto& v : vectors) {
    auto it = zone_of.find(v.trajectory_id);
    if (it == zone_of.end()) continue;
    if (it->second == zone_a) {
      selected.push_back(v);
      labels.push_back(0);
      ++members_a;
    } else if (it->second == zone_b) {
      selected.push_back(v);
      labels.push_back(1);
      ++members_b;
    }
  }
  if (members_a < 2 || members_b < 2) {
    throw Error(ErrorCode::InsufficientMembers,
                "insufficient members: zone " + std::to_string(zone_a) + " has " +
                    std::to_string(members_a) + " and zone " + std::to_string(zone_b) + " has " +
                    std::to_string(members_b) + " trajectories (2 required)");
  }

  const auto features = combination_features(combo);
  const Matrix x = subspace_matrix(selected, features);
  const SplitIndices split = stratified_split(labels, config);

  const Matrix x_train = select_rows(x, split.train);
  std::vector<int> y_train;
  for (std::size_t i : split.train) y_train.push_back(labels[i]);
  const Forest forest = fit_forest(x_train, y_train, config);
  const auto importance = gini_importance(forest);

  ComparisonReport report;
  report.combination = combo;
  report.zone_a = zone_a;
  report.zone_b = zone_b;
  report.members_a = members_a;
  report.members_b = members_b;
  report.train_size = split.train.size();
  report.metrics = evaluate(forest, x, labels, split.test);
  report.no_splits = importance.no_splits;
  report.config = config;

  std::vector<bool> in_x(kVariableCount, false), in_y(kVariableCount, false);
  for (auto i : node_subspace(combo.x_node)) in_x[i] = true;
  for (auto i : node_subspace(combo.y_node)) in_y[i] = true;
  report.column_x = make_column(combo.x_node, features, importance.values, in_x);
  report.column_y = make_column(combo.y_node, features, importance.values, in_y);
  return report;
}

std::size_t variable_anchor(const Trajectory& trajectory, std::string_view variable) {
  const auto& desc = lookup_variable(variable);
  const auto base = base_series(desc.base);
  if (!base || !desc.statistic) {
    throw Error(ErrorCode::InvalidArgument,
                "'" + std::string(variable) + "' is a distance-geometry signature; use its segment");
  }
  const FeatureSeries features = featurize(trajectory);
  const auto& values = series(features, *base);
  const double stat = get(summarize_series(values), *desc.statistic);

  std::size_t best = 0;
  double best_gap = std::abs(values[0] - stat);
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double gap = std::abs(values[i] - stat);
    if (gap < best_gap) {
      best_gap = gap;
      best = i;
    }
  }
  return best;
}

SampleWindow extract_sample(const Trajectory& trajectory, std::string_view variable,
                            WindowSize size) {
  const auto& desc = lookup_variable(variable);
  const std::size_t anchor = variable_anchor(trajectory, variable);
  const FeatureSeries features = featurize(trajectory);
  const std::size_t n = trajectory.points.size();

  const PointRange range{anchor >= size.before ? anchor - size.before : 0,
                         std::min(n, anchor + size.after + 1)};
  SampleWindow w = make_window(trajectory, features, range);
  w.variable = std::string(variable);
  w.kind = SampleKind::Window;
  w.anchor = anchor;
  w.statistic = get(summarize_series(series(features, *base_series(desc.base))), *desc.statistic);
  return w;
}

SampleWindow segment_for_signature(const Trajectory& trajectory, SignatureIndex signature) {
  const PointRange range = signature_partition(trajectory.points.size(), signature);
  SampleWindow w = make_window(trajectory, featurize(trajectory), range);
  w.variable = "distance_geometry_" + std::to_string(signature.k) + "_" + std::to_string(signature.j);
  w.kind = SampleKind::SignatureSegment;
  w.signature = signature;
  return w;
}

SampleWindow sample_for_variable(const Trajectory& trajectory, std::string_view variable,
                                 WindowSize size) {
  const auto& desc = lookup_variable(variable);
  if (desc.signature) return segment_for_signature(trajectory, *desc.signature);
  return extract_sample(trajectory, variable, size);
}

PairedSamples paired_samples(std::span<const Trajectory* const> trajectories,
                             std::string_view variable, WindowSize size) {
  PairedSamples out;
  for (const Trajectory* t : trajectories) out.windows.push_back(sample_for_variable(*t, variable, size));
  for (auto feature : kPointFeatures) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& w : out.windows) {
      for (double v : series(w.features, feature)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (lo > hi) lo = hi = 0.0;
    out.shared_range.emplace(to_string(feature), std::make_pair(lo, hi));
  }
  return out;
}

}  // namespace trajzone
