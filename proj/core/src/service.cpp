#include "trajzone/service.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <regex>
#include <sstream>

#include <httplib.h>

#include "trajzone/csv.hpp"
#include "trajzone/ingest.hpp"
#include "trajzone/serialize.hpp"
#include "trajzone/vectorize.hpp"

namespace trajzone {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Write-then-rename so readers never observe a partial file.
void write_file(const fs::path& path, std::string_view bytes) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Internal, "cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  fs::rename(tmp, path);
}

std::pair<std::string, int> parse_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "listen must be host:port");
  const auto port = csv::parse_double(listen.substr(colon + 1));
  if (!port || *port < 0 || *port > 65535)
    throw Error(ErrorCode::InvalidArgument, "invalid listen port in '" + listen + "'");
  return {listen.substr(0, colon), static_cast<int>(*port)};
}

std::size_t parse_count(const std::string& name, const std::string& value) {
  const auto v = csv::parse_double(value);
  if (!v || *v < 0 || *v != std::floor(*v))
    throw Error(ErrorCode::InvalidArgument, name + " must be a non-negative integer");
  return static_cast<std::size_t>(*v);
}

json table_json(const ScoreTable& t) {
  return {{"node", to_string(t.node)}, {"trajectory_ids", t.trajectory_ids},
          {"scores", t.scores},        {"raw", t.raw},
          {"neighbor_counts", t.neighbor_counts}, {"radius", t.radius}};
}

std::shared_ptr<const ScoreTable> table_from_json(const json& j) {
  auto t = std::make_shared<ScoreTable>();
  t->node = *parse_taxonomy_node(j.at("node").get<std::string>());
  t->trajectory_ids = j.at("trajectory_ids").get<std::vector<std::string>>();
  t->scores = j.at("scores").get<std::vector<double>>();
  t->raw = j.at("raw").get<std::vector<double>>();
  t->neighbor_counts = j.at("neighbor_counts").get<std::vector<std::size_t>>();
  t->radius = j.at("radius").get<double>();
  return t;
}

int zone_field(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_number_integer())
    throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be an integer zone 0-3");
  const int z = body[key].get<int>();
  if (z < 0 || z > 3) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be in 0..3");
  return z;
}

const char* kSchemas = R"json({
  "ZonedScore": {"type": "object", "required": ["trajectory_id", "combination", "x", "y", "zone"],
    "properties": {"trajectory_id": {"type": "string"}, "combination": {"type": "string"},
      "x": {"type": "number", "minimum": 0, "maximum": 1}, "y": {"type": "number", "minimum": 0, "maximum": 1},
      "zone": {"type": "integer", "minimum": 0, "maximum": 3}}},
  "FrequencyMatrix": {"type": "object", "required": ["zones", "rows"],
    "properties": {"zones": {"type": "array", "items": {"type": "integer"}},
      "rows": {"type": "array", "minItems": 7, "maxItems": 7, "items": {"type": "object",
        "required": ["combination", "x_node", "y_node", "counts"],
        "properties": {"combination": {"type": "string"}, "x_node": {"type": "string"},
          "y_node": {"type": "string"},
          "counts": {"type": "array", "minItems": 4, "maxItems": 4, "items": {"type": "integer"}}}}}}},
  "EvalMetrics": {"type": "object", "required": ["f1", "accuracy", "precision", "recall", "test_size"],
    "properties": {"f1": {"type": "number"}, "accuracy": {"type": "number"},
      "precision": {"type": "array", "items": {"type": "number"}},
      "recall": {"type": "array", "items": {"type": "number"}},
      "class_f1": {"type": "array", "items": {"type": "number"}}, "test_size": {"type": "integer"}}},
  "ComparisonReport": {"type": "object",
    "required": ["combination", "x_node", "y_node", "zone_a", "zone_b", "metrics", "columns"],
    "properties": {"combination": {"type": "string"}, "x_node": {"type": "string"}, "y_node": {"type": "string"},
      "zone_a": {"type": "integer"}, "zone_b": {"type": "integer"}, "train_size": {"type": "integer"},
      "members": {"type": "object"}, "metrics": {"$ref": "#/EvalMetrics"},
      "importance_flagged": {"type": "boolean"}, "config": {"type": "object"},
      "columns": {"type": "object", "properties": {
        "x": {"$ref": "#/ImportanceColumn"}, "y": {"$ref": "#/ImportanceColumn"}}}}},
  "ImportanceColumn": {"type": "object", "required": ["node", "variables"],
    "properties": {"node": {"type": "string"}, "variables": {"type": "array", "items": {"type": "object",
      "properties": {"variable": {"type": "string"}, "importance": {"type": "number"}}}}}},
  "SampleWindow": {"type": "object",
    "required": ["trajectory_id", "variable", "kind", "range", "points", "features"],
    "properties": {"trajectory_id": {"type": "string"}, "variable": {"type": "string"},
      "kind": {"enum": ["window", "signature_segment"]},
      "anchor": {"type": ["integer", "null"]}, "statistic": {"type": ["number", "null"]},
      "signature": {"type": ["object", "null"]},
      "range": {"type": "object", "properties": {"begin": {"type": "integer"}, "end": {"type": "integer"}}},
      "points": {"type": "array", "items": {"$ref": "#/Point"}},
      "features": {"$ref": "#/FeatureSeries"}}},
  "PairedSamples": {"type": "object", "required": ["windows", "shared_range"],
    "properties": {"windows": {"type": "array", "items": {"$ref": "#/SampleWindow"}},
      "shared_range": {"type": "object"}}},
  "Point": {"type": "object", "properties": {"lon": {"type": "number"}, "lat": {"type": "number"}, "t": {"type": "number"}}},
  "FeatureSeries": {"type": "object", "properties": {"speed": {"type": "array"}, "acceleration": {"type": "array"},
    "angle": {"type": "array"}, "distance": {"type": "array"}, "bearing": {"type": "array"}}},
  "Trajectory": {"type": "object", "required": ["id", "points", "features"],
    "properties": {"id": {"type": "string"}, "points": {"type": "array", "items": {"$ref": "#/Point"}},
      "features": {"$ref": "#/FeatureSeries"}}},
  "IngestReport": {"type": "object", "required": ["rows_read", "rows_dropped", "duplicates_collapsed", "trajectories", "points"],
    "properties": {"rows_read": {"type": "integer"}, "rows_dropped": {"type": "integer"},
      "duplicates_collapsed": {"type": "integer"}, "rows_filtered": {"type": "integer"},
      "trajectories_rejected": {"type": "integer"}, "trajectories": {"type": "integer"}, "points": {"type": "integer"}}},
  "DatasetEntry": {"type": "object", "required": ["id", "name", "format", "schema", "config_hash", "counts"],
    "properties": {"id": {"type": "string"}, "name": {"type": "string"}, "format": {"type": "string"},
      "schema": {"type": "object"}, "config_hash": {"type": "string"}, "counts": {"type": "object"},
      "report": {"$ref": "#/IngestReport"}, "artifacts": {"type": "object"}}},
  "Error": {"type": "object", "required": ["error", "message"],
    "properties": {"error": {"type": "string"}, "message": {"type": "string"}}}
})json";

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::string ServiceConfig::analytics_hash() const {
  return content_hash(forest.canonical() + "|" + dbos.canonical());
}

ServiceConfig service_config_from_json(const json& j, ServiceConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "service config must be a JSON object");
  if (j.contains("listen")) std::tie(c.host, c.port) = parse_listen(j["listen"].get<std::string>());
  if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
  if (j.contains("ui_dir")) c.ui_dir = j["ui_dir"].get<std::string>();
  if (j.contains("workers")) c.workers = j["workers"].get<std::size_t>();
  if (j.contains("forest")) c.forest = forest_config_from_json(j["forest"], c.forest);
  if (j.contains("dbos")) c.dbos = dbos_options_from_json(j["dbos"], c.dbos);
  if (j.contains("sample_window")) {
    const auto& w = j["sample_window"];
    if (w.contains("before")) c.window.before = w["before"].get<std::size_t>();
    if (w.contains("after")) c.window.after = w["after"].get<std::size_t>();
  }
  return c;
}

ServiceConfig load_service_config(const fs::path& path) {
  try {
    return service_config_from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "invalid config file '" + path.string() + "': " + e.what());
  }
}

std::optional<std::string> process_env(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::optional<std::string>(v) : std::nullopt;
}

ServiceConfig apply_env_overrides(ServiceConfig c, const EnvLookup& env) {
  if (auto v = env("TRAJZONE_LISTEN")) std::tie(c.host, c.port) = parse_listen(*v);
  if (auto v = env("TRAJZONE_DATA_DIR")) c.data_dir = *v;
  if (auto v = env("TRAJZONE_UI_DIR")) c.ui_dir = *v;
  if (auto v = env("TRAJZONE_WORKERS")) c.workers = parse_count("TRAJZONE_WORKERS", *v);
  if (auto v = env("TRAJZONE_SEED")) c.forest.seed = c.dbos.seed = parse_count("TRAJZONE_SEED", *v);
  if (auto v = env("TRAJZONE_N_TREES")) c.forest.n_trees = parse_count("TRAJZONE_N_TREES", *v);
  if (auto v = env("TRAJZONE_MAX_DEPTH")) c.forest.max_depth = parse_count("TRAJZONE_MAX_DEPTH", *v);
  if (auto v = env("TRAJZONE_RADIUS_SAMPLE_PAIRS"))
    c.dbos.radius_sample_pairs = parse_count("TRAJZONE_RADIUS_SAMPLE_PAIRS", *v);
  if (auto v = env("TRAJZONE_NORMALIZE_COLUMNS")) c.dbos.normalize_columns = *v != "0" && *v != "false";
  if (auto v = env("TRAJZONE_WINDOW_BEFORE")) c.window.before = parse_count("TRAJZONE_WINDOW_BEFORE", *v);
  if (auto v = env("TRAJZONE_WINDOW_AFTER")) c.window.after = parse_count("TRAJZONE_WINDOW_AFTER", *v);
  c.forest.validate();
  return c;
}

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidCombination: return 409;
    case ErrorCode::IdenticalZones:
    case ErrorCode::InsufficientMembers:
    case ErrorCode::SingleClass: return 422;
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnknownFormat:
    case ErrorCode::NoValidRows:
    case ErrorCode::InvalidTrajectory: return 400;
    case ErrorCode::Internal: return 500;
  }
  return 500;
}

json error_body(ErrorCode code, const std::string& message) {
  return {{"error", std::string(to_string(code))}, {"message", message}};
}

// ---------------------------------------------------------------------------
// Service

struct Service::DatasetState {
  json entry;
  fs::path dir;
  std::mutex load_mutex;
  std::shared_ptr<const Dataset> dataset;
  std::shared_ptr<NodeScorer> scorer;
  std::mutex persist_mutex;
};

// Single-flight cache of serialized comparison reports.
struct Service::CompareCache {
  std::mutex mutex;
  std::map<std::string, std::shared_future<std::string>> entries;

  std::string get(const std::string& key, const std::function<std::string()>& compute) {
    std::promise<std::string> promise;
    std::shared_future<std::string> future;
    bool owner = false;
    {
      std::lock_guard lock(mutex);
      auto it = entries.find(key);
      if (it == entries.end()) {
        future = promise.get_future().share();
        entries.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
        // Failures are not cached so a corrected dataset state can retry.
        std::lock_guard lock(mutex);
        entries.erase(key);
      }
    }
    return future.get();
  }
};

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      analytics_hash_(config_.analytics_hash()),
      compare_cache_(std::make_unique<CompareCache>()) {
  fs::create_directories(config_.data_dir);
  load_registry();
}

Service::~Service() = default;

void Service::load_registry() {
  const fs::path path = config_.data_dir / "registry.json";
  if (fs::exists(path)) {
    const json reg = json::parse(read_file(path));
    for (const auto& entry : reg.value("datasets", json::array())) {
      auto s = std::make_shared<DatasetState>();
      s->entry = entry;
      s->dir = config_.data_dir / entry.at("id").get<std::string>();
      if (fs::exists(s->dir / entry.value("source_file", ""))) datasets_.emplace(entry["id"], s);
    }
  }
  const fs::path session_path = config_.data_dir / "session.json";
  if (fs::exists(session_path)) session_ = json::parse(read_file(session_path));
}

void Service::save_registry() const {
  json list = json::array();
  for (const auto& [id, s] : datasets_) list.push_back(s->entry);
  write_file(config_.data_dir / "registry.json", json{{"datasets", list}}.dump(2));
}

std::shared_ptr<Service::DatasetState> Service::state(const std::string& dataset_id) const {
  std::shared_lock lock(mutex_);
  auto it = datasets_.find(dataset_id);
  if (it == datasets_.end()) throw Error(ErrorCode::NotFound, "unknown dataset '" + dataset_id + "'");
  return it->second;
}

void Service::ensure_loaded(DatasetState& s) const {
  std::lock_guard lock(s.load_mutex);
  if (s.dataset) return;

  const auto format = parse_input_format(s.entry.at("format").get<std::string>());
  const Schema schema = schema_from_json(s.entry.at("schema"));
  auto result = parse_dataset(read_file(s.dir / s.entry.at("source_file").get<std::string>()),
                              format, schema, s.entry.value("name", ""));
  if (result.dataset.provenance.config_hash != s.entry.at("config_hash").get<std::string>()) {
    throw Error(ErrorCode::Internal, "stored source no longer matches its registry entry");
  }

  // Vectors are cached on disk per ingestion config; a stale file is rebuilt.
  std::vector<FeatureVector> vectors;
  const fs::path vec_path = s.dir / "vectors.csv";
  const fs::path vec_meta = s.dir / "vectors.hash";
  if (fs::exists(vec_path) && fs::exists(vec_meta) &&
      read_file(vec_meta) == result.dataset.provenance.config_hash) {
    std::istringstream in(read_file(vec_path));
    vectors = read_vectors_csv(in);
  } else {
    vectors = vectorize_dataset(result.dataset);
    std::ostringstream out;
    write_vectors_csv(out, vectors);
    write_file(vec_path, out.str());
    write_file(vec_meta, result.dataset.provenance.config_hash);
  }

  s.scorer = std::make_shared<NodeScorer>(std::move(vectors), config_.dbos);
  const fs::path score_dir = s.dir / ("scores-" + analytics_hash_);
  for (auto node : kTaxonomyNodes) {
    const fs::path p = score_dir / (std::string(to_string(node)) + ".json");
    if (!fs::exists(p)) continue;
    try {
      s.scorer->preload(table_from_json(json::parse(read_file(p))));
    } catch (const std::exception&) {
      // Unreadable cache entries are recomputed on demand.
    }
  }
  s.dataset = std::make_shared<const Dataset>(std::move(result.dataset));
}

json Service::health() const {
  return {{"status", "ok"}, {"name", "trajzone"}, {"version", TRAJZONE_VERSION},
          {"api_version", kApiVersion}, {"analytics_hash", analytics_hash_}};
}

json Service::schema() const {
  return {{"version", kApiVersion}, {"schemas", json::parse(kSchemas)}};
}

json Service::list_datasets() const {
  std::shared_lock lock(mutex_);
  json list = json::array();
  for (const auto& [id, s] : datasets_) list.push_back(s->entry);
  return {{"datasets", list}};
}

Service::Registration Service::register_dataset(const json& request, std::optional<std::string> upload) {
  if (!request.is_object()) throw Error(ErrorCode::InvalidArgument, "dataset request must be a JSON object");
  const std::string format_name = request.value("format", "csv");
  const InputFormat format = parse_input_format(format_name);
  const Schema schema = request.contains("schema") ? schema_from_json(request["schema"]) : Schema{};

  std::string bytes;
  std::string source = "upload";
  if (upload) {
    bytes = std::move(*upload);
  } else if (request.contains("content")) {
    bytes = request["content"].get<std::string>();
    source = "inline";
  } else if (request.contains("path")) {
    source = request["path"].get<std::string>();
    bytes = read_file(source);
  } else {
    throw Error(ErrorCode::InvalidArgument, "dataset request needs 'path', 'content' or a file upload");
  }

  std::string name = request.value("name", "");
  if (name.empty()) name = source == "upload" || source == "inline" ? "dataset" : fs::path(source).stem().string();

  IngestResult result = parse_dataset(bytes, format, schema, name);
  const std::string id = result.dataset.provenance.config_hash;
  result.dataset.provenance.source = source;

  {
    std::shared_lock lock(mutex_);
    if (auto it = datasets_.find(id); it != datasets_.end())
      return {{{"dataset", it->second->entry}, {"report", to_json(result.report)}}, false};
  }

  auto s = std::make_shared<DatasetState>();
  s->dir = config_.data_dir / id;
  const std::string source_file = std::string("source.") + to_string(format);
  write_file(s->dir / source_file, bytes);

  auto vectors = vectorize_dataset(result.dataset);
  std::ostringstream vec_csv;
  write_vectors_csv(vec_csv, vectors);
  write_file(s->dir / "vectors.csv", vec_csv.str());
  write_file(s->dir / "vectors.hash", id);

  json schema_json = {{"id_column", schema.id_column},     {"time_column", schema.time_column},
                      {"lat_column", schema.lat_column},   {"lon_column", schema.lon_column},
                      {"timestamps_property", schema.timestamps_property},
                      {"id_property", schema.id_property}, {"filters", json::array()}};
  for (const auto& f : schema.filters)
    schema_json["filters"].push_back({{"column", f.column}, {"min", f.min}, {"max", f.max}});

  s->entry = {{"id", id},
              {"name", name},
              {"source", source},
              {"source_file", source_file},
              {"format", to_string(format)},
              {"schema", schema_json},
              {"config_hash", id},
              {"counts", {{"trajectories", result.report.trajectories}, {"points", result.report.points}}},
              {"report", to_json(result.report)},
              {"artifacts", {{"vectors", (s->dir / "vectors.csv").string()},
                             {"scores", (s->dir / ("scores-" + analytics_hash_)).string()}}}};
  s->scorer = std::make_shared<NodeScorer>(std::move(vectors), config_.dbos);
  s->dataset = std::make_shared<const Dataset>(std::move(result.dataset));

  std::unique_lock lock(mutex_);
  auto [it, inserted] = datasets_.emplace(id, s);
  if (inserted) save_registry();
  return {{{"dataset", it->second->entry}, {"report", to_json(result.report)}}, inserted};
}

json Service::heatmap(const std::string& dataset_id) {
  auto s = state(dataset_id);
  ensure_loaded(*s);
  const auto matrix = s->scorer->frequency_heatmap();
  // Persist node tables once computed so restarts skip the O(n^2) pass.
  std::lock_guard lock(s->persist_mutex);
  for (auto node : kTaxonomyNodes) {
    const fs::path p = s->dir / ("scores-" + analytics_hash_) / (std::string(to_string(node)) + ".json");
    if (!fs::exists(p)) write_file(p, table_json(*s->scorer->node_scores(node)).dump());
  }
  return to_json(matrix);
}

json Service::scores(const std::string& dataset_id, const std::string& combo_text) {
  if (combo_text.empty()) throw Error(ErrorCode::InvalidArgument, "missing 'combo' parameter");
  const Combination combo = parse_combination(combo_text);
  auto s = state(dataset_id);
  ensure_loaded(*s);
  json out = json::array();
  for (const auto& z : s->scorer->score_combination(combo)) out.push_back(to_json(z));
  std::lock_guard lock(s->persist_mutex);
  for (auto node : {combo.x_node, combo.y_node}) {
    const fs::path p = s->dir / ("scores-" + analytics_hash_) / (std::string(to_string(node)) + ".json");
    if (!fs::exists(p)) write_file(p, table_json(*s->scorer->node_scores(node)).dump());
  }
  return {{"combination", to_string(combo)},
          {"x_node", to_string(combo.x_node)},
          {"y_node", to_string(combo.y_node)},
          {"scores", std::move(out)}};
}

std::string Service::compare(const std::string& dataset_id, const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "compare body must be a JSON object");
  if (!body.contains("combo") || !body["combo"].is_string())
    throw Error(ErrorCode::InvalidArgument, "compare body needs a 'combo' string");
  const Combination combo = parse_combination(body["combo"].get<std::string>());
  const int zone_a = zone_field(body, "zone_a");
  const int zone_b = zone_field(body, "zone_b");
  const ForestConfig forest =
      body.contains("forest") ? forest_config_from_json(body["forest"], config_.forest) : config_.forest;
  if (zone_a == zone_b) {
    throw Error(ErrorCode::IdenticalZones, "cannot compare zone " + std::to_string(zone_a) + " with itself");
  }
  auto s = state(dataset_id);

  const std::string key = dataset_id + "|" + to_string(combo) + "|" + std::to_string(zone_a) + "|" +
                          std::to_string(zone_b) + "|" + forest.canonical() + "|" + config_.dbos.canonical();
  return compare_cache_->get(key, [&] {
    ensure_loaded(*s);
    const auto zoned = s->scorer->score_combination(combo);
    const auto report = compare_zones(s->scorer->vectors(), zoned, combo, zone_a, zone_b, forest);
    return to_json(report).dump();
  });
}

json Service::trajectory(const std::string& dataset_id, const std::string& trajectory_id) {
  auto s = state(dataset_id);
  ensure_loaded(*s);
  const Trajectory* t = s->dataset->find(trajectory_id);
  if (!t) throw Error(ErrorCode::NotFound, "unknown trajectory '" + trajectory_id + "'");
  return to_json(*t);
}

json Service::sample(const std::string& dataset_id, const std::string& trajectory_id,
                     const std::string& variable, const std::optional<std::string>& second) {
  if (trajectory_id.empty() || variable.empty())
    throw Error(ErrorCode::InvalidArgument, "sample needs 'tid' and 'variable' parameters");
  auto s = state(dataset_id);
  ensure_loaded(*s);
  auto find = [&](const std::string& id) {
    const Trajectory* t = s->dataset->find(id);
    if (!t) throw Error(ErrorCode::NotFound, "unknown trajectory '" + id + "'");
    return t;
  };
  if (!second) return to_json(sample_for_variable(*find(trajectory_id), variable, config_.window));
  const Trajectory* pair[] = {find(trajectory_id), find(*second)};
  return to_json(paired_samples(pair, variable, config_.window));
}

json Service::session() const {
  std::shared_lock lock(mutex_);
  return session_;
}

json Service::update_session(const json& sel) {
  if (!sel.is_object()) throw Error(ErrorCode::InvalidArgument, "session must be a JSON object");
  json next = json::object();
  std::shared_ptr<DatasetState> ds;
  if (sel.contains("dataset") && !sel["dataset"].is_null()) {
    ds = state(sel["dataset"].get<std::string>());
    next["dataset"] = sel["dataset"];
  }
  if (sel.contains("combination") && !sel["combination"].is_null()) {
    next["combination"] = to_string(parse_combination(sel["combination"].get<std::string>()));
  }
  if (sel.contains("trajectories") && !sel["trajectories"].is_null()) {
    const auto ids = sel["trajectories"].get<std::vector<std::string>>();
    if (ids.size() > 2) throw Error(ErrorCode::InvalidArgument, "at most 2 trajectories can be selected");
    if (!ids.empty() && !ds) throw Error(ErrorCode::InvalidArgument, "trajectory selection needs a dataset");
    if (!ids.empty()) {
      ensure_loaded(*ds);
      for (const auto& id : ids)
        if (!ds->dataset->find(id)) throw Error(ErrorCode::NotFound, "unknown trajectory '" + id + "'");
    }
    next["trajectories"] = ids;
  }
  if (sel.contains("zones") && !sel["zones"].is_null()) {
    const auto zones = sel["zones"].get<std::vector<int>>();
    if (zones.size() > 2) throw Error(ErrorCode::InvalidArgument, "at most 2 zones can be selected");
    for (int z : zones)
      if (z < 0 || z > 3) throw Error(ErrorCode::InvalidArgument, "zones must be in 0..3");
    if (zones.size() == 2 && zones[0] == zones[1])
      throw Error(ErrorCode::IdenticalZones, "the two selected zones must differ");
    next["zones"] = zones;
  }
  if (sel.contains("variable") && !sel["variable"].is_null()) {
    const auto v = sel["variable"].get<std::string>();
    if (!variable_index(v)) throw Error(ErrorCode::InvalidArgument, "unknown statistical variable '" + v + "'");
    next["variable"] = v;
  }
  std::unique_lock lock(mutex_);
  session_ = next;
  write_file(config_.data_dir / "session.json", session_.dump(2));
  return session_;
}

// ---------------------------------------------------------------------------
// HTTP front end

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  explicit Impl(Service& s) : service(s) {}
};

namespace {

void send_json(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_json(res, http_status(e.code()), error_body(e.code(), e.what()).dump());
    } catch (const json::exception& e) {
      send_json(res, 400, error_body(ErrorCode::InvalidArgument, std::string("malformed JSON: ") + e.what()).dump());
    } catch (const std::exception& e) {
      send_json(res, 500, error_body(ErrorCode::Internal, e.what()).dump());
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return json::parse(req.body);
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  Service& svc = service;
  const std::size_t workers = std::max<std::size_t>(1, svc.config().workers);
  srv.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

  srv.Get("/api/health", guarded([&svc](const auto&, auto& res) { send_json(res, 200, svc.health().dump()); }));
  srv.Get("/api/schema", guarded([&svc](const auto&, auto& res) { send_json(res, 200, svc.schema().dump()); }));
  srv.Get("/api/datasets",
          guarded([&svc](const auto&, auto& res) { send_json(res, 200, svc.list_datasets().dump()); }));

  srv.Post("/api/datasets", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             Service::Registration reg;
             if (req.is_multipart_form_data()) {
               if (!req.has_file("file")) throw Error(ErrorCode::InvalidArgument, "multipart upload needs a 'file' part");
               json cfg = json::object();
               if (req.has_file("config")) cfg = json::parse(req.get_file_value("config").content);
               reg = svc.register_dataset(cfg, req.get_file_value("file").content);
             } else {
               reg = svc.register_dataset(parse_body(req));
             }
             send_json(res, reg.created ? 201 : 200, reg.body.dump());
           }));

  srv.Get(R"(/api/datasets/([^/]+)/heatmap)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, svc.heatmap(req.matches[1]).dump());
          }));
  srv.Get(R"(/api/datasets/([^/]+)/scores)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, svc.scores(req.matches[1], query(req, "combo").value_or("")).dump());
          }));
  srv.Post(R"(/api/datasets/([^/]+)/compare)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
             send_json(res, 200, svc.compare(req.matches[1], parse_body(req)));
           }));
  srv.Get(R"(/api/datasets/([^/]+)/trajectories/([^/]+))",
          guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, svc.trajectory(req.matches[1], req.matches[2]).dump());
          }));
  srv.Get(R"(/api/datasets/([^/]+)/sample)", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200,
                      svc.sample(req.matches[1], query(req, "tid").value_or(""), query(req, "variable").value_or(""),
                                 query(req, "tid2"))
                          .dump());
          }));
  srv.Get("/api/session", guarded([&svc](const auto&, auto& res) { send_json(res, 200, svc.session().dump()); }));
  srv.Put("/api/session", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, svc.update_session(parse_body(req)).dump());
          }));

  const auto& ui = svc.config().ui_dir;
  if (!ui.empty() && fs::is_directory(ui)) srv.set_mount_point("/", ui.string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::Internal, "cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

int run_server(const ServiceConfig& config) {
  Service service(config);
  HttpServer server(service);
  const int port = server.bind(config.host, config.port);
  std::cerr << json{{"event", "listening"}, {"host", config.host}, {"port", port},
                    {"data_dir", config.data_dir.string()}, {"forest", to_json(config.forest)},
                    {"dbos", to_json(config.dbos)}}
                   .dump()
            << std::endl;
  server.listen();
  return 0;
}

}  // namespace trajzone
