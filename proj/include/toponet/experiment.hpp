#pragma once

#include "toponet/network.hpp"
#include "toponet/shapes.hpp"

#include <string>
#include <vector>

namespace toponet {

struct IsomapConfig {
    bool enabled = false;
    int k_neighbors = 10;
    int target_dim = 3;
};

struct ComponentsConfig {
    bool enabled = true;
    double eps = 0.0;  // 0 = auto: 3 x median NN distance of each analysed subset
};

struct AnalysisConfig {
    bool moves = true;
    bool separation = true;
    bool witness_injection = false;
    IsomapConfig isomap;
    ComponentsConfig components;
};

/// One experiment end to end: dataset spec, architecture, optimizer
/// settings, analysis toggles, output directory.
struct ExperimentConfig {
    ShapeSpec dataset;
    NetworkSpec network;
    Hyperparams train;
    AnalysisConfig analyses;
    std::string output_dir;

    void validate() const;
};

/// Strict parse: unknown keys are rejected with their full field path, as are
/// type mismatches. The accepted schema is documented in the README and the
/// shipped configs.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

/// Canonical serialization (sorted keys); embedded in reports.
std::string config_to_json(const ExperimentConfig& config);

enum class Stage { Generate, Train, Trace, Analyze, Isomap, Report };

Stage stage_from_string(const std::string& name);
std::string to_string(Stage stage);

/// Stage artifacts inside the output directory:
///   generate -> config.json, dataset.csv
///   train    -> checkpoint.txt, loss_history.csv, training.json, witness.json (if enabled)
///   trace    -> trace/layer_XX.csv, trace/manifest.json
///   analyze  -> moves.json, separation.json, components.json
///   isomap   -> isomap/layer_XX.csv, isomap/manifest.json (if enabled)
///   report   -> report.json
/// A stage that misses an upstream artifact throws std::invalid_argument
/// naming the file and the stage that produces it.
void run_stage(const ExperimentConfig& config, const std::string& out_dir, Stage stage);

struct RunSummary {
    double final_accuracy = 0.0;
    bool separated = false;
    std::string report_path;
};

/// All stages in order (isomap skipped when disabled) plus meta.json, which
/// is the only file carrying timestamps.
RunSummary run_experiment(const ExperimentConfig& config, const std::string& out_dir);

}  // namespace toponet
