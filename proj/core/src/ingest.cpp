#include "trajzone/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "trajzone/csv.hpp"
#include "trajzone/error.hpp"
#include "trajzone/point_features.hpp"

namespace trajzone {
namespace {

struct RawPoint {
  TrajectoryPoint point;
  std::uint64_t order = 0;  // input position, for first-occurrence collapsing
};

using RawTrajectories = std::map<std::string, std::vector<RawPoint>>;

bool valid_coordinates(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

// Reads exactly `width` digits.
bool read_digits(std::string_view& s, std::size_t width, int& out) {
  if (s.size() < width) return false;
  int value = 0;
  for (std::size_t i = 0; i < width; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    value = value * 10 + (s[i] - '0');
  }
  out = value;
  s.remove_prefix(width);
  return true;
}

bool consume(std::string_view& s, char c) {
  if (s.empty() || s.front() != c) return false;
  s.remove_prefix(1);
  return true;
}

std::size_t find_column(const csv::Row& header, std::string_view name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (trim(header[i]) == name) return i;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (iequals(trim(header[i]), name)) return i;
  throw Error(ErrorCode::InvalidArgument, "missing CSV column '" + std::string(name) + "'");
}

void parse_csv(std::string_view source, const Schema& schema, RawTrajectories& out,
               IngestReport& report) {
  std::istringstream in{std::string(source)};
  csv::Reader reader(in);
  auto header = reader.next();
  if (!header) throw Error(ErrorCode::NoValidRows, "empty CSV input");
  // Tolerate a UTF-8 byte order mark on the first header cell.
  if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF"))
    header->front().erase(0, 3);

  const std::size_t id_col = find_column(*header, schema.id_column);
  const std::size_t t_col = find_column(*header, schema.time_column);
  const std::size_t lat_col = find_column(*header, schema.lat_column);
  const std::size_t lon_col = find_column(*header, schema.lon_column);
  std::vector<std::pair<std::size_t, const RangeFilter*>> filters;
  for (const auto& f : schema.filters) filters.emplace_back(find_column(*header, f.column), &f);
  const std::size_t needed = std::max({id_col, t_col, lat_col, lon_col}) + 1;

  std::uint64_t order = 0;
  while (auto row = reader.next()) {
    if (row->size() == 1 && trim(row->front()).empty()) continue;  // blank line
    ++report.rows_read;

    bool keep = true;
    for (const auto& [col, filter] : filters) {
      const auto v = col < row->size() ? csv::parse_double(trim((*row)[col])) : std::nullopt;
      if (!v || *v < filter->min || *v > filter->max) {
        keep = false;
        break;
      }
    }
    if (!keep) {
      ++report.rows_filtered;
      continue;
    }

    if (row->size() < needed) {
      ++report.rows_dropped;
      continue;
    }
    const auto id = trim((*row)[id_col]);
    const auto t = parse_timestamp((*row)[t_col]);
    const auto lat = csv::parse_double(trim((*row)[lat_col]));
    const auto lon = csv::parse_double(trim((*row)[lon_col]));
    if (id.empty() || !t || !lat || !lon || !valid_coordinates(*lat, *lon)) {
      ++report.rows_dropped;
      continue;
    }
    out[std::string(id)].push_back({{*lon, *lat, *t}, order++});
  }
}

std::optional<double> json_timestamp(const nlohmann::json& j) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
  }
  if (j.is_string()) return parse_timestamp(j.get_ref<const std::string&>());
  return std::nullopt;
}

std::string json_id(const nlohmann::json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  if (j.is_number()) return csv::format_double(j.get<double>());
  return {};
}

void parse_geojson(std::string_view source, const Schema& schema, RawTrajectories& out,
                   IngestReport& report) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" ||
      !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorCode::InvalidArgument, "GeoJSON input must be a FeatureCollection");
  }

  std::uint64_t order = 0;
  for (const auto& feature : doc["features"]) {
    if (!feature.is_object()) continue;
    const auto& props = feature.contains("properties") && feature["properties"].is_object()
                            ? feature["properties"]
                            : nlohmann::json::object();
    std::string id;
    if (feature.contains("id")) id = json_id(feature["id"]);
    if (id.empty() && props.contains(schema.id_property)) id = json_id(props[schema.id_property]);

    const auto* geometry = feature.contains("geometry") ? &feature["geometry"] : nullptr;
    if (!geometry || !geometry->is_object() || !geometry->contains("coordinates")) continue;
    const auto type = geometry->value("type", "");
    const auto& coords = (*geometry)["coordinates"];
    if ((type != "LineString" && type != "MultiPoint") || !coords.is_array()) continue;

    const nlohmann::json* stamps = props.contains(schema.timestamps_property)
                                       ? &props[schema.timestamps_property]
                                       : nullptr;

    for (std::size_t i = 0; i < coords.size(); ++i) {
      ++report.rows_read;
      const auto& c = coords[i];
      std::optional<double> t;
      if (stamps && stamps->is_array() && i < stamps->size()) t = json_timestamp((*stamps)[i]);
      if (id.empty() || !t || !c.is_array() || c.size() < 2 || !c[0].is_number() ||
          !c[1].is_number()) {
        ++report.rows_dropped;
        continue;
      }
      const double lon = c[0].get<double>();
      const double lat = c[1].get<double>();
      if (!valid_coordinates(lat, lon)) {
        ++report.rows_dropped;
        continue;
      }
      out[id].push_back({{lon, lat, *t}, order++});
    }
  }
}

}  // namespace

InputFormat parse_input_format(std::string_view name) {
  if (iequals(name, "csv")) return InputFormat::Csv;
  if (iequals(name, "geojson") || iequals(name, "json")) return InputFormat::GeoJson;
  throw Error(ErrorCode::UnknownFormat, "unknown input format '" + std::string(name) + "'");
}

const char* to_string(InputFormat format) noexcept {
  return format == InputFormat::Csv ? "csv" : "geojson";
}

std::string Schema::canonical() const {
  std::ostringstream s;
  s << "id=" << id_column << ";t=" << time_column << ";lat=" << lat_column
    << ";lon=" << lon_column << ";ts=" << timestamps_property << ";idp=" << id_property;
  for (const auto& f : filters)
    s << ";filter=" << f.column << ':' << csv::format_double(f.min) << ':'
      << csv::format_double(f.max);
  return s.str();
}

std::optional<double> parse_timestamp(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) return std::nullopt;

  // Plain epoch seconds.
  if (s.find_first_not_of("+-0123456789.eE") == std::string_view::npos) {
    if (const auto v = csv::parse_double(s)) return std::isfinite(*v) ? v : std::nullopt;
  }

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
  if (!read_digits(s, 4, y) || !consume(s, '-') || !read_digits(s, 2, mo) || !consume(s, '-') ||
      !read_digits(s, 2, d)) {
    return std::nullopt;
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  double fraction = 0.0;
  double offset = 0.0;
  if (!s.empty()) {
    if (s.front() != 'T' && s.front() != 't' && s.front() != ' ') return std::nullopt;
    s.remove_prefix(1);
    if (!read_digits(s, 2, h) || !consume(s, ':') || !read_digits(s, 2, mi)) return std::nullopt;
    if (consume(s, ':')) {
      if (!read_digits(s, 2, sec)) return std::nullopt;
      if (!s.empty() && (s.front() == '.' || s.front() == ',')) {
        std::size_t len = 1;
        while (len < s.size() && std::isdigit(static_cast<unsigned char>(s[len]))) ++len;
        if (len == 1) return std::nullopt;
        std::string frac = "0.";
        frac.append(s.substr(1, len - 1));
        fraction = *csv::parse_double(frac);
        s.remove_prefix(len);
      }
    }
    if (h > 23 || mi > 59 || sec > 60) return std::nullopt;
    if (consume(s, 'Z') || consume(s, 'z')) {
    } else if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
      const double sign = s.front() == '-' ? -1.0 : 1.0;
      s.remove_prefix(1);
      int oh = 0, om = 0;
      if (!read_digits(s, 2, oh)) return std::nullopt;
      consume(s, ':');
      if (!s.empty() && !read_digits(s, 2, om)) return std::nullopt;
      offset = sign * (oh * 3600.0 + om * 60.0);
    }
    if (!s.empty()) return std::nullopt;
  }

  const auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec + fraction - offset;
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

IngestResult parse_dataset(std::string_view source, InputFormat format, const Schema& schema,
                           std::string name) {
  IngestResult result;
  IngestReport& report = result.report;
  RawTrajectories raw;

  if (format == InputFormat::Csv) {
    parse_csv(source, schema, raw, report);
  } else {
    parse_geojson(source, schema, raw, report);
  }

  Dataset& ds = result.dataset;
  ds.name = std::move(name);
  for (auto& [id, pts] : raw) {
    std::stable_sort(pts.begin(), pts.end(),
                     [](const RawPoint& a, const RawPoint& b) { return a.point.t < b.point.t; });
    Trajectory traj;
    traj.id = id;
    traj.points.reserve(pts.size());
    for (const auto& rp : pts) {
      if (!traj.points.empty() && traj.points.back().t == rp.point.t) {
        ++report.duplicates_collapsed;
        continue;
      }
      traj.points.push_back(rp.point);
    }
    if (traj.points.size() < 2) {
      ++report.trajectories_rejected;
      continue;
    }
    traj.features = compute_point_features(traj);
    report.points += traj.points.size();
    ds.trajectories.push_back(std::move(traj));
  }
  report.trajectories = ds.trajectories.size();
  if (ds.trajectories.empty()) {
    throw Error(ErrorCode::NoValidRows, "no valid trajectories after cleaning (" +
                                            std::to_string(report.rows_read) + " rows read, " +
                                            std::to_string(report.rows_dropped) + " dropped)");
  }

  std::string key(source);
  key += '\x1f';
  key += to_string(format);
  key += '\x1f';
  key += schema.canonical();
  ds.provenance.config_hash = content_hash(key);
  return result;
}

const Trajectory* Dataset::find(std::string_view id) const noexcept {
  auto it = std::lower_bound(trajectories.begin(), trajectories.end(), id,
                             [](const Trajectory& t, std::string_view v) { return t.id < v; });
  return it != trajectories.end() && it->id == id ? &*it : nullptr;
}

std::size_t Dataset::point_count() const noexcept {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.points.size();
  return n;
}

}  // namespace trajzone
