#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajzone/forest.hpp"
#include "trajzone/outlier.hpp"
#include "trajzone/taxonomy.hpp"
#include "trajzone/trajectory.hpp"
#include "trajzone/vectorize.hpp"

namespace trajzone {

struct RankedVariable {
  std::string name;
  double importance = 0.0;
};

struct ImportanceColumn {
  TaxonomyNode node;
  std::vector<RankedVariable> variables;  // non-increasing importance
};

struct ComparisonReport {
  Combination combination;
  int zone_a = 0;
  int zone_b = 0;
  std::size_t members_a = 0;
  std::size_t members_b = 0;
  std::size_t train_size = 0;
  EvalMetrics metrics;
  bool no_splits = false;
  ImportanceColumn column_x;
  ImportanceColumn column_y;
  ForestConfig config;
};

/// Catalog indices trained on for a combination: the union of both node
/// subspaces, ascending.
std::vector<std::size_t> combination_features(const Combination& combo);

/// One-vs-one forest comparison of two zones: zone_a is labelled 0 and
/// zone_b 1, rows keep vector order. `zoned` must be aligned with `vectors`
/// by trajectory id.
/// Throws Error(IdenticalZones) and Error(InsufficientMembers) (fewer than 2
/// trajectories in either zone).
ComparisonReport compare_zones(std::span<const FeatureVector> vectors,
                               std::span<const ZonedScore> zoned, const Combination& combo,
                               int zone_a, int zone_b, const ForestConfig& config = {});

/// Index of the point whose base-series value is closest to the variable's
/// statistic over that series; lowest index on ties.
/// Throws Error(InvalidArgument) for distance-geometry or unknown variables.
std::size_t variable_anchor(const Trajectory& trajectory, std::string_view variable);

struct WindowSize {
  std::size_t before = 5;
  std::size_t after = 4;
};

enum class SampleKind { Window, SignatureSegment };

struct SampleWindow {
  std::string trajectory_id;
  std::string variable;
  SampleKind kind = SampleKind::Window;
  std::optional<std::size_t> anchor;          // windows only
  std::optional<double> statistic;            // windows only
  std::optional<SignatureIndex> signature;    // segments only
  PointRange range;                           // into the full trajectory
  std::vector<TrajectoryPoint> points;
  FeatureSeries features;                     // restricted to range
};

/// Points [anchor - before, anchor + after] clamped to the trajectory.
SampleWindow extract_sample(const Trajectory& trajectory, std::string_view variable,
                            WindowSize size = {});

/// The j-th of k parts, sharing the partition used for the signatures.
SampleWindow segment_for_signature(const Trajectory& trajectory, SignatureIndex signature);

/// Routes distance-geometry variables to segment_for_signature and all other
/// variables to extract_sample.
SampleWindow sample_for_variable(const Trajectory& trajectory, std::string_view variable,
                                 WindowSize size = {});

/// Two windows shown side by side with a colour range per point feature taken
/// over the union of both windows.
struct PairedSamples {
  std::vector<SampleWindow> windows;
  std::map<std::string, std::pair<double, double>> shared_range;
};

PairedSamples paired_samples(std::span<const Trajectory* const> trajectories,
                             std::string_view variable, WindowSize size = {});

}  // namespace trajzone
