#include "trajzone/serialize.hpp"

#include <ostream>

#include "trajzone/csv.hpp"
#include "trajzone/error.hpp"

namespace trajzone {

using nlohmann::json;

namespace {

json features_json(const FeatureSeries& f) {
  json j = json::object();
  for (auto feature : kPointFeatures) j[to_string(feature)] = series(f, feature);
  return j;
}

json points_json(std::span<const TrajectoryPoint> points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({{"lon", p.lon}, {"lat", p.lat}, {"t", p.t}});
  return arr;
}

json column_json(const ImportanceColumn& col) {
  json vars = json::array();
  for (const auto& v : col.variables) vars.push_back({{"variable", v.name}, {"importance", v.importance}});
  return {{"node", to_string(col.node)}, {"variables", std::move(vars)}};
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidArgument, std::string("invalid value for '") + key + "'");
  }
}

}  // namespace

json to_json(const IngestReport& r) {
  return {{"rows_read", r.rows_read},
          {"rows_dropped", r.rows_dropped},
          {"duplicates_collapsed", r.duplicates_collapsed},
          {"rows_filtered", r.rows_filtered},
          {"trajectories_rejected", r.trajectories_rejected},
          {"trajectories", r.trajectories},
          {"points", r.points}};
}

json to_json(const EvalMetrics& m) {
  return {{"f1", m.f1},
          {"accuracy", m.accuracy},
          {"precision", m.precision},
          {"recall", m.recall},
          {"class_f1", m.class_f1},
          {"test_size", m.test_size}};
}

json to_json(const ForestConfig& c) {
  return {{"n_trees", c.n_trees},
          {"max_depth", c.max_depth},
          {"class_weight", c.balanced_class_weight ? "balanced" : "none"},
          {"seed", c.seed},
          {"test_fraction", c.test_fraction},
          {"features_per_split", c.features_per_split},
          {"min_samples_leaf", c.min_samples_leaf},
          {"bootstrap", c.bootstrap}};
}

json to_json(const DbosOptions& o) {
  return {{"normalize_columns", o.normalize_columns},
          {"radius_sample_pairs", o.radius_sample_pairs},
          {"seed", o.seed}};
}

json to_json(const ComparisonReport& r) {
  return {{"combination", to_string(r.combination)},
          {"x_node", to_string(r.combination.x_node)},
          {"y_node", to_string(r.combination.y_node)},
          {"zone_a", r.zone_a},
          {"zone_b", r.zone_b},
          {"members", {{"zone_a", r.members_a}, {"zone_b", r.members_b}}},
          {"train_size", r.train_size},
          {"metrics", to_json(r.metrics)},
          {"importance_flagged", r.no_splits},
          {"columns", {{"x", column_json(r.column_x)}, {"y", column_json(r.column_y)}}},
          {"config", to_json(r.config)}};
}

json to_json(const ZonedScore& s) {
  return {{"trajectory_id", s.trajectory_id},
          {"combination", to_string(s.combination)},
          {"x", s.x},
          {"y", s.y},
          {"zone", s.zone}};
}

json to_json(const FrequencyMatrix& m) {
  json rows = json::array();
  const auto& combos = valid_combinations();
  for (std::size_t r = 0; r < combos.size(); ++r) {
    rows.push_back({{"combination", to_string(combos[r])},
                    {"x_node", to_string(combos[r].x_node)},
                    {"y_node", to_string(combos[r].y_node)},
                    {"counts", m.counts[r]}});
  }
  return {{"zones", {0, 1, 2, 3}}, {"rows", std::move(rows)}};
}

json to_json(const SampleWindow& w) {
  json j = {{"trajectory_id", w.trajectory_id},
            {"variable", w.variable},
            {"kind", w.kind == SampleKind::Window ? "window" : "signature_segment"},
            {"range", {{"begin", w.range.begin}, {"end", w.range.end}}},
            {"points", points_json(w.points)},
            {"features", features_json(w.features)}};
  j["anchor"] = w.anchor ? json(*w.anchor) : json(nullptr);
  j["statistic"] = w.statistic ? json(*w.statistic) : json(nullptr);
  j["signature"] = w.signature ? json{{"k", w.signature->k}, {"j", w.signature->j}} : json(nullptr);
  return j;
}

json to_json(const PairedSamples& s) {
  json windows = json::array();
  for (const auto& w : s.windows) windows.push_back(to_json(w));
  json range = json::object();
  for (const auto& [name, r] : s.shared_range) range[name] = {{"min", r.first}, {"max", r.second}};
  return {{"windows", std::move(windows)}, {"shared_range", std::move(range)}};
}

json to_json(const Trajectory& t) {
  json j = {{"id", t.id}, {"points", points_json(t.points)}};
  j["features"] = t.features ? features_json(*t.features) : json(nullptr);
  return j;
}

json to_json(const GridSearchResult& r) {
  json cands = json::array();
  for (const auto& c : r.candidates) {
    cands.push_back({{"n_trees", c.n_trees},
                     {"max_depth", c.max_depth},
                     {"features_per_split", c.features_per_split},
                     {"features_rule", c.features_rule},
                     {"mean_f1", c.mean_f1},
                     {"mean_accuracy", c.mean_accuracy}});
  }
  json best = r.candidates.empty() ? json(nullptr) : cands[r.best];
  return {{"folds", r.folds}, {"fits", r.fits}, {"best", best}, {"candidates", std::move(cands)}};
}

ForestConfig forest_config_from_json(const json& j, ForestConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "forest config must be an object");
  read_field(j, "n_trees", c.n_trees);
  read_field(j, "max_depth", c.max_depth);
  read_field(j, "seed", c.seed);
  read_field(j, "test_fraction", c.test_fraction);
  read_field(j, "features_per_split", c.features_per_split);
  read_field(j, "min_samples_leaf", c.min_samples_leaf);
  read_field(j, "bootstrap", c.bootstrap);
  read_field(j, "threads", c.threads);
  if (j.contains("class_weight")) {
    std::string w;
    read_field(j, "class_weight", w);
    if (w != "balanced" && w != "none")
      throw Error(ErrorCode::InvalidArgument, "class_weight must be 'balanced' or 'none'");
    c.balanced_class_weight = w == "balanced";
  }
  c.validate();
  return c;
}

DbosOptions dbos_options_from_json(const json& j, DbosOptions o) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "DBOS options must be an object");
  read_field(j, "normalize_columns", o.normalize_columns);
  read_field(j, "radius_sample_pairs", o.radius_sample_pairs);
  read_field(j, "seed", o.seed);
  return o;
}

Schema schema_from_json(const json& j, Schema s) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "schema must be an object");
  read_field(j, "id_column", s.id_column);
  read_field(j, "time_column", s.time_column);
  read_field(j, "lat_column", s.lat_column);
  read_field(j, "lon_column", s.lon_column);
  read_field(j, "timestamps_property", s.timestamps_property);
  read_field(j, "id_property", s.id_property);
  if (j.contains("filters")) {
    if (!j["filters"].is_array()) throw Error(ErrorCode::InvalidArgument, "filters must be an array");
    s.filters.clear();
    for (const auto& f : j["filters"]) {
      RangeFilter rf;
      read_field(f, "column", rf.column);
      read_field(f, "min", rf.min);
      read_field(f, "max", rf.max);
      s.filters.push_back(rf);
    }
  }
  return s;
}

void write_importance_csv(std::ostream& out, const ComparisonReport& report) {
  csv::write_row(out, {"column", "node", "rank", "variable", "importance"});
  auto emit = [&out](const char* column, const ImportanceColumn& col) {
    for (std::size_t i = 0; i < col.variables.size(); ++i) {
      csv::write_row(out, {column, std::string(to_string(col.node)), std::to_string(i + 1),
                           col.variables[i].name, csv::format_double(col.variables[i].importance)});
    }
  };
  emit("x", report.column_x);
  emit("y", report.column_y);
}

}  // namespace trajzone
