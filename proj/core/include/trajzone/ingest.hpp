#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trajzone/trajectory.hpp"

namespace trajzone {

enum class InputFormat { Csv, GeoJson };

/// Throws Error(UnknownFormat) for anything other than "csv" / "geojson".
InputFormat parse_input_format(std::string_view name);
const char* to_string(InputFormat format) noexcept;

/// Inclusive numeric range filter on an extra CSV column (e.g. SEASON 2004..2024).
/// Rows outside the range are skipped and counted as filtered, not dropped.
struct RangeFilter {
  std::string column;
  double min = 0.0;
  double max = 0.0;
};

/// Column mapping for CSV input and property names for GeoJSON input.
struct Schema {
  std::string id_column = "trajectory_id";
  std::string time_column = "timestamp";
  std::string lat_column = "lat";
  std::string lon_column = "lon";
  std::vector<RangeFilter> filters;

  // GeoJSON: per-feature property holding the coordinate-aligned timestamps,
  // and the property used when a feature carries no top-level "id".
  std::string timestamps_property = "timestamps";
  std::string id_property = "id";

  /// Stable text form, hashed into the dataset provenance.
  std::string canonical() const;
};

struct IngestReport {
  std::uint64_t rows_read = 0;
  std::uint64_t rows_dropped = 0;
  std::uint64_t duplicates_collapsed = 0;
  std::uint64_t rows_filtered = 0;
  std::uint64_t trajectories_rejected = 0;  // fewer than 2 points after cleaning
  std::uint64_t trajectories = 0;
  std::uint64_t points = 0;
};

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

/// Parses, cleans and featurizes a raw dataset.
///
/// Rows with unparseable timestamps or out-of-range coordinates are dropped.
/// Within each trajectory points are sorted by time and duplicate timestamps
/// collapse to their first occurrence in input order. Trajectories with fewer
/// than two surviving points are rejected. Point features are computed for
/// every surviving trajectory.
///
/// Throws Error(NoValidRows) when nothing survives cleaning.
IngestResult parse_dataset(std::string_view source, InputFormat format,
                           const Schema& schema = {}, std::string name = {});

/// ISO-8601 (date, optional time, optional fraction and offset) or integer
/// epoch seconds. Returns UTC seconds.
std::optional<double> parse_timestamp(std::string_view text);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace trajzone
