#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trajzone/matrix.hpp"
#include "trajzone/statistics.hpp"
#include "trajzone/taxonomy.hpp"
#include "trajzone/trajectory.hpp"

namespace trajzone {

inline constexpr std::size_t kMaxSignatureParts = 5;
inline constexpr std::size_t kSignatureCount = 15;
inline constexpr std::size_t kVariableCount = 3 * kStatisticCount + kSignatureCount;
static_assert(kVariableCount == 72);

/// Distance-geometry signature (k, j): the j-th of k contiguous parts.
struct SignatureIndex {
  std::size_t k = 1;
  std::size_t j = 1;

  bool valid() const noexcept { return k >= 1 && k <= kMaxSignatureParts && j >= 1 && j <= k; }
  friend bool operator==(const SignatureIndex&, const SignatureIndex&) = default;
};

/// The series a statistical variable is computed from.
enum class VariableBase { Speed, Acceleration, Angles, DistanceGeometry };

std::string_view to_string(VariableBase base) noexcept;

struct VariableDescriptor {
  std::string name;
  VariableBase base;
  std::optional<Statistic> statistic;      // set for speed/acceleration/angles
  std::optional<SignatureIndex> signature; // set for distance geometry
};

/// 19 speed + 19 acceleration + 19 angles statistics, then the 15 signatures
/// ordered by k then j. The order defines FeatureVector indexing.
const std::array<VariableDescriptor, kVariableCount>& variable_catalog();

std::optional<std::size_t> variable_index(std::string_view name) noexcept;

/// Point-feature series backing a statistical variable base (nullopt for
/// distance geometry).
std::optional<PointFeature> base_series(VariableBase base) noexcept;

struct FeatureVector {
  std::string trajectory_id;
  std::array<double, kVariableCount> values{};
};

/// Half-open point range [begin, end).
struct PointRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
};

/// j-th (1-based) of k contiguous parts of n points. Parts differ in size by
/// at most one; the remainder goes to the earliest parts.
PointRange signature_partition(std::size_t n, SignatureIndex sig);

/// Chord / path-length straightness of one part, in [0, 1]. Parts with
/// fewer than 2 points or zero path length score 1.
double distance_geometry(std::span<const TrajectoryPoint> points, PointRange part);

/// All 15 signatures, ordered by k then j.
std::array<double, kSignatureCount> distance_geometry_signatures(const Trajectory& trajectory);

/// Requires computed point features.
FeatureVector vectorize_trajectory(const Trajectory& trajectory);

/// Vectors for every trajectory of a featurized dataset, in dataset order.
std::vector<FeatureVector> vectorize_dataset(const Dataset& dataset);

/// Ascending catalog indices of the variables describing a taxonomy node.
std::vector<std::size_t> node_subspace(TaxonomyNode node);

/// Rows of `vectors` restricted to `columns`.
Matrix subspace_matrix(std::span<const FeatureVector> vectors, std::span<const std::size_t> columns);

/// `trajectory_id` + 72 catalog-named columns, one row per vector.
void write_vectors_csv(std::ostream& out, std::span<const FeatureVector> vectors);
std::vector<FeatureVector> read_vectors_csv(std::istream& in);

}  // namespace trajzone
