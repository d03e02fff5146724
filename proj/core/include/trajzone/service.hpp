#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include <nlohmann/json.hpp>

#include "trajzone/comparison.hpp"
#include "trajzone/error.hpp"
#include "trajzone/forest.hpp"
#include "trajzone/outlier.hpp"

namespace trajzone {

inline constexpr int kApiVersion = 1;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "trajzone-data";
  std::filesystem::path ui_dir;  // static workbench bundle served under "/"; empty disables
  std::size_t workers = 4;       // request worker pool size
  ForestConfig forest;
  DbosOptions dbos;
  WindowSize window;

  /// Hash of every analytics parameter; keys score and comparison caches.
  std::string analytics_hash() const;
};

/// Reads the JSON config format:
///   {"listen": "host:port", "data_dir": "...", "ui_dir": "...", "workers": 4,
///    "forest": {...}, "dbos": {...}, "sample_window": {"before": 5, "after": 4}}
ServiceConfig service_config_from_json(const nlohmann::json& j, ServiceConfig base = {});
ServiceConfig load_service_config(const std::filesystem::path& path);

/// TRAJZONE_LISTEN, TRAJZONE_DATA_DIR, TRAJZONE_UI_DIR, TRAJZONE_WORKERS,
/// TRAJZONE_SEED, TRAJZONE_N_TREES, TRAJZONE_MAX_DEPTH,
/// TRAJZONE_RADIUS_SAMPLE_PAIRS, TRAJZONE_NORMALIZE_COLUMNS,
/// TRAJZONE_WINDOW_BEFORE, TRAJZONE_WINDOW_AFTER.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
ServiceConfig apply_env_overrides(ServiceConfig config, const EnvLookup& env);
std::optional<std::string> process_env(const char* name);

/// HTTP status for a module error: 404 not found, 409 invalid combination,
/// 422 zone preconditions, 400 other input errors, 500 otherwise.
int http_status(ErrorCode code) noexcept;

nlohmann::json error_body(ErrorCode code, const std::string& message);

/// Transport-independent workflow API. Every method returns the JSON body of
/// the matching endpoint and throws Error on failure. Thread-safe.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  const ServiceConfig& config() const noexcept { return config_; }

  nlohmann::json health() const;
  nlohmann::json schema() const;

  nlohmann::json list_datasets() const;

  struct Registration {
    nlohmann::json body;
    bool created = false;
  };
  /// `request` holds {name, format, schema} plus either "path" or "content";
  /// `upload` carries multipart file bytes and takes precedence.
  Registration register_dataset(const nlohmann::json& request,
                                std::optional<std::string> upload = std::nullopt);

  nlohmann::json heatmap(const std::string& dataset_id);
  nlohmann::json scores(const std::string& dataset_id, const std::string& combo);
  /// Serialized ComparisonReport; identical requests return identical bytes.
  std::string compare(const std::string& dataset_id, const nlohmann::json& body);
  nlohmann::json trajectory(const std::string& dataset_id, const std::string& trajectory_id);
  nlohmann::json sample(const std::string& dataset_id, const std::string& trajectory_id,
                        const std::string& variable,
                        const std::optional<std::string>& second_trajectory = std::nullopt);

  nlohmann::json session() const;
  nlohmann::json update_session(const nlohmann::json& selections);

 private:
  struct DatasetState;
  std::shared_ptr<DatasetState> state(const std::string& dataset_id) const;
  void load_registry();
  void save_registry() const;
  void ensure_loaded(DatasetState& s) const;

  ServiceConfig config_;
  std::string analytics_hash_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<DatasetState>> datasets_;
  nlohmann::json session_ = nlohmann::json::object();

  struct CompareCache;
  std::unique_ptr<CompareCache> compare_cache_;
};

/// cpp-httplib front end for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds host:port (port 0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Loads data, binds, and serves until the process is stopped.
int run_server(const ServiceConfig& config);

}  // namespace trajzone
