// trajzone command-line entry point: batch pipeline plus the HTTP service.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "trajzone/comparison.hpp"
#include "trajzone/csv.hpp"
#include "trajzone/error.hpp"
#include "trajzone/forest.hpp"
#include "trajzone/ingest.hpp"
#include "trajzone/outlier.hpp"
#include "trajzone/serialize.hpp"
#include "trajzone/service.hpp"
#include "trajzone/vectorize.hpp"

using nlohmann::json;
using namespace trajzone;

namespace {

std::string read_input(const std::string& path) {
  std::ostringstream s;
  if (path == "-") {
    s << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot read '" + path + "'");
    s << in.rdbuf();
  }
  return s.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty() || path == "-") {
    std::cout << bytes;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  out << bytes;
}

struct IngestFlags {
  std::string input;
  std::string format = "csv";
  Schema schema;
  std::vector<std::string> filters;  // COLUMN:MIN:MAX
  std::string name;

  void add(CLI::App* cmd) {
    cmd->add_option("-i,--input", input, "Raw trajectory file ('-' for stdin)")->required();
    cmd->add_option("-f,--format", format, "Input format: csv or geojson")->capture_default_str();
    cmd->add_option("--id-col", schema.id_column, "CSV trajectory id column")->capture_default_str();
    cmd->add_option("--time-col", schema.time_column, "CSV timestamp column")->capture_default_str();
    cmd->add_option("--lat-col", schema.lat_column, "CSV latitude column")->capture_default_str();
    cmd->add_option("--lon-col", schema.lon_column, "CSV longitude column")->capture_default_str();
    cmd->add_option("--timestamps-property", schema.timestamps_property,
                    "GeoJSON per-feature timestamp array property")
        ->capture_default_str();
    cmd->add_option("--filter", filters,
                    "Keep rows whose numeric COLUMN lies in [MIN, MAX], as COLUMN:MIN:MAX (repeatable)");
    cmd->add_option("--name", name, "Dataset label");
  }

  IngestResult ingest() {
    for (const auto& f : filters) {
      const auto a = f.find(':');
      const auto b = f.rfind(':');
      const auto lo = a == b ? std::nullopt : csv::parse_double(f.substr(a + 1, b - a - 1));
      const auto hi = a == b ? std::nullopt : csv::parse_double(f.substr(b + 1));
      if (!lo || !hi) throw Error(ErrorCode::InvalidArgument, "--filter expects COLUMN:MIN:MAX, got '" + f + "'");
      schema.filters.push_back({f.substr(0, a), *lo, *hi});
    }
    return parse_dataset(read_input(input), parse_input_format(format), schema, name);
  }
};

struct DbosFlags {
  bool no_normalize = false;
  std::size_t radius_pairs = 0;

  void add(CLI::App* cmd) {
    cmd->add_flag("--no-normalize", no_normalize, "Skip per-column min-max scaling before distances");
    cmd->add_option("--radius-sample-pairs", radius_pairs,
                    "Estimate the radius from this many random pairs (0 = exact)")
        ->capture_default_str();
  }

  DbosOptions options(std::uint64_t seed) const {
    DbosOptions o;
    o.normalize_columns = !no_normalize;
    o.radius_sample_pairs = radius_pairs;
    o.seed = seed;
    return o;
  }
};

struct ForestFlags {
  ForestConfig config;

  void add(CLI::App* cmd) {
    cmd->add_option("--trees", config.n_trees, "Number of trees")->capture_default_str();
    cmd->add_option("--max-depth", config.max_depth, "Maximum tree depth")->capture_default_str();
    cmd->add_option("--test-fraction", config.test_fraction, "Held-out fraction")->capture_default_str();
    cmd->add_option("--features-per-split", config.features_per_split, "Candidates per split (0 = sqrt(m))")
        ->capture_default_str();
    cmd->add_option("--threads", config.threads, "Tree-fitting threads (0 = all cores)")->capture_default_str();
  }
};

std::vector<FeatureVector> load_vectors(const std::string& path) {
  std::istringstream in(read_input(path));
  return read_vectors_csv(in);
}

void print_effective(const char* command, const json& config) {
  std::cerr << json{{"command", command}, {"config", config}}.dump() << '\n';
}

std::pair<int, int> parse_zones(const std::string& text) {
  const auto comma = text.find(',');
  const auto a = comma == std::string::npos ? std::nullopt : csv::parse_double(text.substr(0, comma));
  const auto b = comma == std::string::npos ? std::nullopt : csv::parse_double(text.substr(comma + 1));
  if (!a || !b) throw Error(ErrorCode::InvalidArgument, "--zones expects two zones like 1,2");
  return {static_cast<int>(*a), static_cast<int>(*b)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trajzone: taxonomy-driven trajectory outlier zones and zone comparison"};
  app.require_subcommand(1);
  std::uint64_t seed = 42;

  // prep
  auto* prep = app.add_subcommand("prep", "Ingest and clean a raw dataset; print the ingestion report");
  IngestFlags prep_in;
  prep_in.add(prep);
  std::string prep_report, prep_points;
  prep->add_option("--report", prep_report, "Write the JSON report here instead of stdout");
  prep->add_option("--points-out", prep_points, "Write cleaned points with their five features as CSV");

  // vectorize
  auto* vec = app.add_subcommand("vectorize", "Emit the 72-variable vector CSV");
  IngestFlags vec_in;
  vec_in.add(vec);
  std::string vec_out;
  vec->add_option("-o,--out", vec_out, "Output CSV (default stdout)");

  // score
  auto* score = app.add_subcommand("score", "Score a combination and assign zones");
  std::string score_vectors = "-", score_combo, score_out, score_nodes_out;
  DbosFlags score_dbos;
  score->add_option("--vectors", score_vectors, "Vector CSV from 'vectorize' ('-' for stdin)")->capture_default_str();
  score->add_option("--combo", score_combo, "Combination, e.g. geometric-kinematic")->required();
  score->add_option("-o,--out", score_out, "Zoned CSV output (default stdout)");
  score->add_option("--node-scores", score_nodes_out, "Also write trajectory_id,node,score rows for both axes");
  score->add_option("--seed", seed, "Seed for the sampled radius estimator")->capture_default_str();
  score_dbos.add(score);

  // heatmap
  auto* heat = app.add_subcommand("heatmap", "7x4 zone frequency matrix over all combinations");
  std::string heat_vectors = "-", heat_out;
  bool heat_csv = false;
  DbosFlags heat_dbos;
  heat->add_option("--vectors", heat_vectors, "Vector CSV ('-' for stdin)")->capture_default_str();
  heat->add_option("-o,--out", heat_out, "Output file (default stdout)");
  heat->add_flag("--csv", heat_csv, "Emit CSV instead of JSON");
  heat->add_option("--seed", seed, "Seed for the sampled radius estimator")->capture_default_str();
  heat_dbos.add(heat);

  // compare
  auto* cmp = app.add_subcommand("compare", "One-vs-one random-forest comparison of two zones");
  std::string cmp_vectors = "-", cmp_zoned, cmp_combo, cmp_zones, cmp_out, cmp_csv;
  DbosFlags cmp_dbos;
  ForestFlags cmp_forest;
  cmp->add_option("--vectors", cmp_vectors, "Vector CSV ('-' for stdin)")->capture_default_str();
  cmp->add_option("--zoned", cmp_zoned, "Zoned CSV from 'score' (computed when omitted)");
  cmp->add_option("--combo", cmp_combo, "Combination, e.g. geometric-kinematic")->required();
  cmp->add_option("--zones", cmp_zones, "Zone pair, e.g. 1,2")->required();
  cmp->add_option("-o,--out", cmp_out, "Report JSON (default stdout)");
  cmp->add_option("--csv", cmp_csv, "Also write the two-column importance CSV here");
  cmp->add_option("--seed", seed, "Forest and split seed")->capture_default_str();
  cmp_dbos.add(cmp);
  cmp_forest.add(cmp);

  // sample
  auto* smp = app.add_subcommand("sample", "Statistic-anchored sample window(s) for a variable");
  IngestFlags smp_in;
  smp_in.add(smp);
  std::vector<std::string> smp_tids;
  std::string smp_variable, smp_out;
  WindowSize smp_window;
  smp->add_option("--tid", smp_tids, "Trajectory id (give twice for a shared colour range)")->required();
  smp->add_option("--variable", smp_variable, "Catalog variable, e.g. speed_kurt")->required();
  smp->add_option("--before", smp_window.before, "Points before the anchor")->capture_default_str();
  smp->add_option("--after", smp_window.after, "Points after the anchor")->capture_default_str();
  smp->add_option("-o,--out", smp_out, "Output JSON (default stdout)");

  // tune
  auto* tune = app.add_subcommand("tune", "Stratified 5-fold grid search over forest hyperparameters");
  std::string tune_vectors = "-", tune_combo, tune_zones, tune_out;
  std::size_t tune_folds = 5;
  DbosFlags tune_dbos;
  ForestFlags tune_forest;
  tune->add_option("--vectors", tune_vectors, "Vector CSV ('-' for stdin)")->capture_default_str();
  tune->add_option("--combo", tune_combo, "Combination")->required();
  tune->add_option("--zones", tune_zones, "Zone pair, e.g. 1,2")->required();
  tune->add_option("--folds", tune_folds, "Cross-validation folds")->capture_default_str();
  tune->add_option("-o,--out", tune_out, "Output JSON (default stdout)");
  tune->add_option("--seed", seed, "Forest and fold seed")->capture_default_str();
  tune_dbos.add(tune);
  tune_forest.add(tune);

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  std::string serve_config, serve_listen, serve_data, serve_ui;
  serve->add_option("-c,--config", serve_config, "JSON config file");
  serve->add_option("--listen", serve_listen, "host:port (default 127.0.0.1:8080)");
  serve->add_option("--data-dir", serve_data, "Registry and cache directory");
  serve->add_option("--ui-dir", serve_ui, "Static workbench bundle served under /");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*prep) {
      auto result = prep_in.ingest();
      write_output(prep_report, to_json(result.report).dump(2) + "\n");
      if (!prep_points.empty()) {
        std::ostringstream out;
        csv::write_row(out, {"trajectory_id", "timestamp", "lat", "lon", "speed", "acceleration", "angle",
                             "distance", "bearing"});
        for (const auto& t : result.dataset.trajectories) {
          const auto& f = *t.features;
          for (std::size_t i = 0; i < t.points.size(); ++i) {
            csv::write_row(out, {t.id, csv::format_double(t.points[i].t), csv::format_double(t.points[i].lat),
                                 csv::format_double(t.points[i].lon), csv::format_double(f.speed[i]),
                                 csv::format_double(f.acceleration[i]), csv::format_double(f.angle[i]),
                                 csv::format_double(f.distance[i]), csv::format_double(f.bearing[i])});
          }
        }
        write_output(prep_points, out.str());
      }
    } else if (*vec) {
      auto result = vec_in.ingest();
      std::cerr << to_json(result.report).dump() << '\n';
      std::ostringstream out;
      write_vectors_csv(out, vectorize_dataset(result.dataset));
      write_output(vec_out, out.str());
    } else if (*score) {
      const auto combo = parse_combination(score_combo);
      const auto options = score_dbos.options(seed);
      print_effective("score", {{"combination", to_string(combo)}, {"dbos", to_json(options)}});
      NodeScorer scorer(load_vectors(score_vectors), options);
      std::ostringstream out;
      write_zoned_csv(out, scorer.score_combination(combo));
      write_output(score_out, out.str());
      if (!score_nodes_out.empty()) {
        std::ostringstream nodes;
        write_scores_csv(nodes, *scorer.node_scores(combo.x_node));
        std::ostringstream y;
        write_scores_csv(y, *scorer.node_scores(combo.y_node));
        const auto ys = y.str();
        nodes << ys.substr(ys.find('\n') + 1);  // drop the repeated header
        write_output(score_nodes_out, nodes.str());
      }
    } else if (*heat) {
      const auto options = heat_dbos.options(seed);
      print_effective("heatmap", {{"dbos", to_json(options)}});
      const auto matrix = frequency_heatmap(load_vectors(heat_vectors), options);
      if (heat_csv) {
        std::ostringstream out;
        csv::write_row(out, {"combination", "zone_0", "zone_1", "zone_2", "zone_3"});
        const auto& combos = valid_combinations();
        for (std::size_t r = 0; r < combos.size(); ++r) {
          csv::write_row(out, {to_string(combos[r]), std::to_string(matrix.counts[r][0]),
                               std::to_string(matrix.counts[r][1]), std::to_string(matrix.counts[r][2]),
                               std::to_string(matrix.counts[r][3])});
        }
        write_output(heat_out, out.str());
      } else {
        write_output(heat_out, to_json(matrix).dump(2) + "\n");
      }
    } else if (*cmp) {
      const auto combo = parse_combination(cmp_combo);
      const auto [a, b] = parse_zones(cmp_zones);
      cmp_forest.config.seed = seed;
      const auto options = cmp_dbos.options(seed);
      print_effective("compare", {{"combination", to_string(combo)}, {"forest", to_json(cmp_forest.config)},
                                  {"dbos", to_json(options)}});
      auto vectors = load_vectors(cmp_vectors);
      std::vector<ZonedScore> zoned;
      if (!cmp_zoned.empty()) {
        std::istringstream in(read_input(cmp_zoned));
        zoned = read_zoned_csv(in);
      } else {
        zoned = score_combination(vectors, combo, options);
      }
      const auto report = compare_zones(vectors, zoned, combo, a, b, cmp_forest.config);
      write_output(cmp_out, to_json(report).dump());
      if (!cmp_csv.empty()) {
        std::ostringstream out;
        write_importance_csv(out, report);
        write_output(cmp_csv, out.str());
      }
    } else if (*smp) {
      if (smp_tids.size() > 2) throw Error(ErrorCode::InvalidArgument, "--tid accepts at most two ids");
      const auto result = smp_in.ingest();
      std::vector<const Trajectory*> picked;
      for (const auto& id : smp_tids) {
        const Trajectory* t = result.dataset.find(id);
        if (!t) throw Error(ErrorCode::NotFound, "unknown trajectory '" + id + "'");
        picked.push_back(t);
      }
      const json out = picked.size() == 1 ? to_json(sample_for_variable(*picked[0], smp_variable, smp_window))
                                          : to_json(paired_samples(picked, smp_variable, smp_window));
      write_output(smp_out, out.dump(2) + "\n");
    } else if (*tune) {
      const auto combo = parse_combination(tune_combo);
      const auto [a, b] = parse_zones(tune_zones);
      tune_forest.config.seed = seed;
      const auto options = tune_dbos.options(seed);
      print_effective("tune", {{"combination", to_string(combo)}, {"forest", to_json(tune_forest.config)},
                               {"dbos", to_json(options)}, {"folds", tune_folds}});
      const auto vectors = load_vectors(tune_vectors);
      const auto zoned = score_combination(vectors, combo, options);
      std::vector<FeatureVector> rows;
      std::vector<int> labels;
      for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (zoned[i].zone == a || zoned[i].zone == b) {
          rows.push_back(vectors[i]);
          labels.push_back(zoned[i].zone == a ? 0 : 1);
        }
      }
      if (a == b) throw Error(ErrorCode::IdenticalZones, "the two zones must differ");
      const auto features = combination_features(combo);
      const auto result = grid_search(subspace_matrix(rows, features), labels, tune_forest.config, tune_folds);
      write_output(tune_out, to_json(result).dump(2) + "\n");
    } else if (*serve) {
      ServiceConfig config = serve_config.empty() ? ServiceConfig{} : load_service_config(serve_config);
      config = apply_env_overrides(config, process_env);
      if (!serve_listen.empty()) config = service_config_from_json({{"listen", serve_listen}}, config);
      if (!serve_data.empty()) config.data_dir = serve_data;
      if (!serve_ui.empty()) config.ui_dir = serve_ui;
      return run_server(config);
    }
  } catch (const Error& e) {
    std::cerr << error_body(e.code(), e.what()).dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_body(ErrorCode::Internal, e.what()).dump() << '\n';
    return 3;
  }
  return 0;
}
