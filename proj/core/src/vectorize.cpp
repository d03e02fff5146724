#include "trajzone/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_map>

#include "trajzone/csv.hpp"
#include "trajzone/error.hpp"
#include "trajzone/geodesy.hpp"

namespace trajzone {
namespace {

constexpr VariableBase kStatisticBases[] = {VariableBase::Speed, VariableBase::Acceleration,
                                            VariableBase::Angles};

std::array<VariableDescriptor, kVariableCount> build_catalog() {
  std::array<VariableDescriptor, kVariableCount> catalog;
  std::size_t i = 0;
  for (auto base : kStatisticBases) {
    for (std::size_t s = 0; s < kStatisticCount; ++s) {
      const auto stat = static_cast<Statistic>(s);
      catalog[i++] = {std::string(to_string(base)) + "_" + std::string(to_string(stat)), base,
                      stat, std::nullopt};
    }
  }
  for (std::size_t k = 1; k <= kMaxSignatureParts; ++k) {
    for (std::size_t j = 1; j <= k; ++j) {
      catalog[i++] = {"distance_geometry_" + std::to_string(k) + "_" + std::to_string(j),
                      VariableBase::DistanceGeometry, std::nullopt, SignatureIndex{k, j}};
    }
  }
  return catalog;
}

std::size_t signature_slot(SignatureIndex sig) { return (sig.k - 1) * sig.k / 2 + (sig.j - 1); }

constexpr std::size_t kSignatureOffset = 3 * kStatisticCount;

}  // namespace

std::string_view to_string(VariableBase base) noexcept {
  switch (base) {
    case VariableBase::Speed: return "speed";
    case VariableBase::Acceleration: return "acceleration";
    case VariableBase::Angles: return "angles";
    case VariableBase::DistanceGeometry: return "distance_geometry";
  }
  return "speed";
}

const std::array<VariableDescriptor, kVariableCount>& variable_catalog() {
  static const auto catalog = build_catalog();
  return catalog;
}

std::optional<std::size_t> variable_index(std::string_view name) noexcept {
  static const auto index = [] {
    std::unordered_map<std::string, std::size_t> m;
    const auto& c = variable_catalog();
    for (std::size_t i = 0; i < c.size(); ++i) m.emplace(c[i].name, i);
    return m;
  }();
  auto it = index.find(std::string(name));
  if (it == index.end()) return std::nullopt;
  return it->second;
}

std::optional<PointFeature> base_series(VariableBase base) noexcept {
  switch (base) {
    case VariableBase::Speed: return PointFeature::Speed;
    case VariableBase::Acceleration: return PointFeature::Acceleration;
    case VariableBase::Angles: return PointFeature::Angle;
    case VariableBase::DistanceGeometry: return std::nullopt;
  }
  return std::nullopt;
}

PointRange signature_partition(std::size_t n, SignatureIndex sig) {
  if (!sig.valid()) {
    throw Error(ErrorCode::InvalidArgument, "invalid signature index (" + std::to_string(sig.k) +
                                                ", " + std::to_string(sig.j) + ")");
  }
  const std::size_t base = n / sig.k;
  const std::size_t rem = n % sig.k;
  const std::size_t part = sig.j - 1;
  const std::size_t begin = part * base + std::min(part, rem);
  const std::size_t size = base + (part < rem ? 1 : 0);
  return {begin, begin + size};
}

double distance_geometry(std::span<const TrajectoryPoint> points, PointRange part) {
  if (part.size() < 2) return 1.0;
  double path = 0.0;
  for (std::size_t i = part.begin + 1; i < part.end; ++i)
    path += haversine_distance(points[i - 1], points[i]);
  if (!(path > 0.0)) return 1.0;
  const double chord = haversine_distance(points[part.begin], points[part.end - 1]);
  return std::clamp(chord / path, 0.0, 1.0);
}

std::array<double, kSignatureCount> distance_geometry_signatures(const Trajectory& trajectory) {
  std::array<double, kSignatureCount> out{};
  const std::span<const TrajectoryPoint> pts = trajectory.points;
  for (std::size_t k = 1; k <= kMaxSignatureParts; ++k) {
    for (std::size_t j = 1; j <= k; ++j) {
      const SignatureIndex sig{k, j};
      out[signature_slot(sig)] = distance_geometry(pts, signature_partition(pts.size(), sig));
    }
  }
  return out;
}

FeatureVector vectorize_trajectory(const Trajectory& trajectory) {
  if (!trajectory.features) {
    throw Error(ErrorCode::InvalidTrajectory,
                "trajectory '" + trajectory.id + "' has no computed point features");
  }
  FeatureVector v;
  v.trajectory_id = trajectory.id;
  std::size_t offset = 0;
  for (auto base : kStatisticBases) {
    const auto summary = summarize_series(series(*trajectory.features, *base_series(base)));
    std::copy(summary.begin(), summary.end(), v.values.begin() + offset);
    offset += kStatisticCount;
  }
  const auto dg = distance_geometry_signatures(trajectory);
  std::copy(dg.begin(), dg.end(), v.values.begin() + kSignatureOffset);
  for (double& x : v.values)
    if (!std::isfinite(x)) x = 0.0;
  return v;
}

std::vector<FeatureVector> vectorize_dataset(const Dataset& dataset) {
  std::vector<FeatureVector> out;
  out.reserve(dataset.trajectories.size());
  for (const auto& t : dataset.trajectories) out.push_back(vectorize_trajectory(t));
  return out;
}

std::vector<std::size_t> node_subspace(TaxonomyNode node) {
  auto range = [](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> v(end - begin);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = begin + i;
    return v;
  };
  constexpr std::size_t s = kStatisticCount;
  switch (node) {
    case TaxonomyNode::Speed: return range(0, s);
    case TaxonomyNode::Acceleration: return range(s, 2 * s);
    case TaxonomyNode::Indentation: return range(2 * s, 3 * s);
    case TaxonomyNode::Curvature: return range(kSignatureOffset, kVariableCount);
    case TaxonomyNode::Kinematic: return range(0, 2 * s);
    case TaxonomyNode::Geometric: return range(2 * s, kVariableCount);
  }
  return {};
}

Matrix subspace_matrix(std::span<const FeatureVector> vectors,
                       std::span<const std::size_t> columns) {
  Matrix m(vectors.size(), columns.size());
  for (std::size_t r = 0; r < vectors.size(); ++r)
    for (std::size_t c = 0; c < columns.size(); ++c) m(r, c) = vectors[r].values[columns[c]];
  return m;
}

void write_vectors_csv(std::ostream& out, std::span<const FeatureVector> vectors) {
  csv::Row row;
  row.reserve(kVariableCount + 1);
  row.push_back("trajectory_id");
  for (const auto& d : variable_catalog()) row.push_back(d.name);
  csv::write_row(out, row);
  for (const auto& v : vectors) {
    row.clear();
    row.push_back(v.trajectory_id);
    for (double x : v.values) row.push_back(csv::format_double(x));
    csv::write_row(out, row);
  }
}

std::vector<FeatureVector> read_vectors_csv(std::istream& in) {
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header || header->size() != kVariableCount + 1 || header->front() != "trajectory_id") {
    throw Error(ErrorCode::InvalidArgument,
                "vector CSV must have a trajectory_id column followed by the 72 catalog columns");
  }
  std::array<std::size_t, kVariableCount> slot{};
  std::vector<bool> seen(kVariableCount, false);
  for (std::size_t c = 1; c < header->size(); ++c) {
    const auto idx = variable_index((*header)[c]);
    if (!idx || seen[*idx]) {
      throw Error(ErrorCode::InvalidArgument,
                  "unexpected vector CSV column '" + (*header)[c] + "'");
    }
    seen[*idx] = true;
    slot[c - 1] = *idx;
  }

  std::vector<FeatureVector> out;
  std::size_t line = 1;
  while (auto row = reader.next()) {
    ++line;
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != kVariableCount + 1) {
      throw Error(ErrorCode::InvalidArgument,
                  "vector CSV row " + std::to_string(line) + " has the wrong field count");
    }
    FeatureVector v;
    v.trajectory_id = row->front();
    for (std::size_t c = 0; c < kVariableCount; ++c) {
      const auto x = csv::parse_double((*row)[c + 1]);
      if (!x || !std::isfinite(*x)) {
        throw Error(ErrorCode::InvalidArgument,
                    "vector CSV row " + std::to_string(line) + " has a non-numeric value");
      }
      v.values[slot[c]] = *x;
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace trajzone
