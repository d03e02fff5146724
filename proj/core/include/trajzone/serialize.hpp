#pragma once

#include <nlohmann/json.hpp>

#include "trajzone/comparison.hpp"
#include "trajzone/forest.hpp"
#include "trajzone/ingest.hpp"
#include "trajzone/outlier.hpp"

namespace trajzone {

nlohmann::json to_json(const IngestReport& report);
nlohmann::json to_json(const EvalMetrics& metrics);
nlohmann::json to_json(const ForestConfig& config);
nlohmann::json to_json(const DbosOptions& options);
nlohmann::json to_json(const ComparisonReport& report);
nlohmann::json to_json(const ZonedScore& score);
nlohmann::json to_json(const FrequencyMatrix& matrix);
nlohmann::json to_json(const SampleWindow& window);
nlohmann::json to_json(const PairedSamples& samples);
nlohmann::json to_json(const Trajectory& trajectory);
nlohmann::json to_json(const GridSearchResult& result);

/// Reads ForestConfig fields present in `j`, keeping `base` for the rest.
ForestConfig forest_config_from_json(const nlohmann::json& j, ForestConfig base = {});
DbosOptions dbos_options_from_json(const nlohmann::json& j, DbosOptions base = {});
Schema schema_from_json(const nlohmann::json& j, Schema base = {});

/// Two-column importance table: `column,node,rank,variable,importance`.
void write_importance_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace trajzone
