#include "toponet/experiment.hpp"

#include "toponet/embedding.hpp"
#include "toponet/moves.hpp"
#include "toponet/separator.hpp"
#include "toponet/simplex.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace toponet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& path, const std::string& key, const char* what) {
    const std::string full = path.empty() ? key : path + "." + key;
    throw std::invalid_argument("config: " + full + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed) known = known || item.key() == k;
        if (!known) bad_key(path, item.key(), "unknown key");
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& path, const char* key, double fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) bad_key(path, key, "expected a number");
    return v->get<double>();
}

long get_integer(const json& obj, const std::string& path, const char* key, long fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer() && !v->is_number_unsigned()) bad_key(path, key, "expected an integer");
    return v->get<long>();
}

std::uint64_t get_seed(const json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
        bad_key(path, key, "expected a nonnegative integer");
    return v->get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_boolean()) bad_key(path, key, "expected a boolean");
    return v->get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key, const char* fallback) {
    const json* v = find(obj, key);
    if (!v) {
        if (fallback) return fallback;
        bad_key(path, key, "required key missing");
    }
    if (!v->is_string()) bad_key(path, key, "expected a string");
    return v->get<std::string>();
}

ShapeSpec parse_dataset(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: dataset: expected an object");
    ShapeSpec spec;
    spec.kind = shape_kind_from_string(get_string(j, "dataset", "kind", nullptr));
    spec.points_per_class = get_integer(j, "dataset", "points_per_class", spec.points_per_class);
    spec.seed = get_seed(j, "dataset", "seed", spec.seed);
    spec.area_uniform = get_bool(j, "dataset", "area_uniform", spec.area_uniform);
    switch (spec.kind) {
        case ShapeKind::Annulus2D:
            reject_unknown_keys(j, "dataset",
                                {"kind", "points_per_class", "seed", "area_uniform", "inner_radius", "outer_radius",
                                 "band_gap"});
            spec.inner_radius = get_number(j, "dataset", "inner_radius", spec.inner_radius);
            spec.outer_radius = get_number(j, "dataset", "outer_radius", spec.outer_radius);
            spec.band_gap = get_number(j, "dataset", "band_gap", spec.band_gap);
            break;
        case ShapeKind::Torus3D:
            reject_unknown_keys(j, "dataset",
                                {"kind", "points_per_class", "seed", "area_uniform", "major_radius", "minor_radius",
                                 "arc_margin"});
            spec.major_radius = get_number(j, "dataset", "major_radius", spec.major_radius);
            spec.minor_radius = get_number(j, "dataset", "minor_radius", spec.minor_radius);
            spec.arc_margin = get_number(j, "dataset", "arc_margin", spec.arc_margin);
            break;
        case ShapeKind::BallShell:
            reject_unknown_keys(j, "dataset",
                                {"kind", "points_per_class", "seed", "area_uniform", "ambient_dim", "ball_radius",
                                 "shell_inner", "shell_outer"});
            spec.ambient_dim = static_cast<int>(get_integer(j, "dataset", "ambient_dim", spec.ambient_dim));
            spec.ball_radius = get_number(j, "dataset", "ball_radius", spec.ball_radius);
            spec.shell_inner = get_number(j, "dataset", "shell_inner", spec.shell_inner);
            spec.shell_outer = get_number(j, "dataset", "shell_outer", spec.shell_outer);
            break;
        case ShapeKind::LinkedTori:
            reject_unknown_keys(j, "dataset",
                                {"kind", "points_per_class", "seed", "area_uniform", "major_radius", "minor_radius"});
            spec.major_radius = get_number(j, "dataset", "major_radius", spec.major_radius);
            spec.minor_radius = get_number(j, "dataset", "minor_radius", spec.minor_radius);
            break;
    }
    return spec;
}

NetworkSpec parse_network(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: network: expected an object");
    reject_unknown_keys(j, "network", {"layers"});
    const json* layers = find(j, "layers");
    if (!layers || !layers->is_array() || layers->empty())
        throw std::invalid_argument("config: network.layers: expected a nonempty array");
    NetworkSpec spec;
    int idx = 0;
    for (const auto& entry : *layers) {
        const std::string path = "network.layers[" + std::to_string(idx) + "]";
        if (!entry.is_object()) throw std::invalid_argument("config: " + path + ": expected an object");
        reject_unknown_keys(entry, path, {"in", "out", "activation"});
        LayerSpec layer;
        layer.in_dim = static_cast<int>(get_integer(entry, path, "in", 0));
        layer.out_dim = static_cast<int>(get_integer(entry, path, "out", 0));
        layer.activation = activation_from_string(get_string(entry, path, "activation", nullptr));
        if (layer.in_dim < 1) bad_key(path, "in", "required positive integer");
        if (layer.out_dim < 1) bad_key(path, "out", "required positive integer");
        spec.layers.push_back(layer);
        ++idx;
    }
    return spec;
}

Hyperparams parse_train(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: train: expected an object");
    reject_unknown_keys(j, "train", {"seed", "epochs", "step_size", "batch_size"});
    Hyperparams hp;
    hp.seed = get_seed(j, "train", "seed", hp.seed);
    hp.epochs = get_integer(j, "train", "epochs", hp.epochs);
    hp.step_size = get_number(j, "train", "step_size", hp.step_size);
    hp.batch_size = get_integer(j, "train", "batch_size", hp.batch_size);
    return hp;
}

AnalysisConfig parse_analyses(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: analyses: expected an object");
    reject_unknown_keys(j, "analyses", {"moves", "separation", "witness_injection", "isomap", "components"});
    AnalysisConfig a;
    a.moves = get_bool(j, "analyses", "moves", a.moves);
    a.separation = get_bool(j, "analyses", "separation", a.separation);
    a.witness_injection = get_bool(j, "analyses", "witness_injection", a.witness_injection);
    if (const json* iso = find(j, "isomap")) {
        if (!iso->is_object()) throw std::invalid_argument("config: analyses.isomap: expected an object");
        reject_unknown_keys(*iso, "analyses.isomap", {"enabled", "k_neighbors", "target_dim"});
        a.isomap.enabled = get_bool(*iso, "analyses.isomap", "enabled", true);
        a.isomap.k_neighbors = static_cast<int>(get_integer(*iso, "analyses.isomap", "k_neighbors", a.isomap.k_neighbors));
        a.isomap.target_dim = static_cast<int>(get_integer(*iso, "analyses.isomap", "target_dim", a.isomap.target_dim));
    }
    if (const json* comp = find(j, "components")) {
        if (!comp->is_object()) throw std::invalid_argument("config: analyses.components: expected an object");
        reject_unknown_keys(*comp, "analyses.components", {"enabled", "eps"});
        a.components.enabled = get_bool(*comp, "analyses.components", "enabled", true);
        a.components.eps = get_number(*comp, "analyses.components", "eps", a.components.eps);
    }
    return a;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    reject_unknown_keys(j, "", {"dataset", "network", "train", "analyses", "output_dir"});
    ExperimentConfig config;
    const json* dataset = find(j, "dataset");
    const json* network = find(j, "network");
    const json* trainj = find(j, "train");
    if (!dataset) throw std::invalid_argument("config: dataset: required key missing");
    if (!network) throw std::invalid_argument("config: network: required key missing");
    if (!trainj) throw std::invalid_argument("config: train: required key missing");
    config.dataset = parse_dataset(*dataset);
    config.network = parse_network(*network);
    config.train = parse_train(*trainj);
    if (const json* analyses = find(j, "analyses")) config.analyses = parse_analyses(*analyses);
    config.output_dir = get_string(j, "", "output_dir", "");
    config.validate();
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void ExperimentConfig::validate() const {
    dataset.validate();
    network.validate();
    if (network.input_dim() != dataset.dim())
        throw std::invalid_argument("config: network.layers[0].in (" + std::to_string(network.input_dim()) +
                                    ") must equal the dataset dimension (" + std::to_string(dataset.dim()) + ")");
    if (!network.ends_in_softmax())
        throw std::invalid_argument("config: network must end in a softmax layer");
    if (network.output_dim() != dataset.num_classes())
        throw std::invalid_argument("config: network output dim (" + std::to_string(network.output_dim()) +
                                    ") must equal the number of classes (" + std::to_string(dataset.num_classes()) +
                                    ")");
    if (train.epochs < 0) throw std::invalid_argument("config: train.epochs must be >= 0");
    if (train.batch_size < 0) throw std::invalid_argument("config: train.batch_size must be >= 0");
    if (!(train.step_size > 0.0)) throw std::invalid_argument("config: train.step_size must be > 0");
    if (analyses.witness_injection) {
        const auto& first = network.layers.front();
        if (first.out_dim >= first.in_dim)
            throw std::invalid_argument(
                "config: analyses.witness_injection requires a bottleneck first layer (out < in)");
        if (dataset.kind != ShapeKind::BallShell)
            throw std::invalid_argument(
                "config: analyses.witness_injection requires the ball_shell dataset (witness labels are the "
                "ball/shell classes)");
    }
    if (analyses.isomap.enabled) {
        if (analyses.isomap.k_neighbors < 1)
            throw std::invalid_argument("config: analyses.isomap.k_neighbors must be >= 1");
        if (analyses.isomap.target_dim < 1)
            throw std::invalid_argument("config: analyses.isomap.target_dim must be >= 1");
    }
    if (analyses.components.enabled && analyses.components.eps < 0.0)
        throw std::invalid_argument("config: analyses.components.eps must be >= 0 (0 = auto)");
}

std::string config_to_json(const ExperimentConfig& config) {
    json dataset{{"kind", to_string(config.dataset.kind)},
                 {"points_per_class", config.dataset.points_per_class},
                 {"seed", config.dataset.seed}};
    switch (config.dataset.kind) {
        case ShapeKind::Annulus2D:
            dataset["inner_radius"] = config.dataset.inner_radius;
            dataset["outer_radius"] = config.dataset.outer_radius;
            dataset["band_gap"] = config.dataset.band_gap;
            break;
        case ShapeKind::Torus3D:
            dataset["major_radius"] = config.dataset.major_radius;
            dataset["minor_radius"] = config.dataset.minor_radius;
            dataset["arc_margin"] = config.dataset.arc_margin;
            break;
        case ShapeKind::BallShell:
            dataset["ambient_dim"] = config.dataset.ambient_dim;
            dataset["ball_radius"] = config.dataset.ball_radius;
            dataset["shell_inner"] = config.dataset.shell_inner;
            dataset["shell_outer"] = config.dataset.shell_outer;
            break;
        case ShapeKind::LinkedTori:
            dataset["major_radius"] = config.dataset.major_radius;
            dataset["minor_radius"] = config.dataset.minor_radius;
            break;
    }

    json layers = json::array();
    for (const auto& l : config.network.layers)
        layers.push_back({{"in", l.in_dim}, {"out", l.out_dim}, {"activation", to_string(l.activation)}});

    json j{{"dataset", dataset},
           {"network", {{"layers", layers}}},
           {"train",
            {{"seed", config.train.seed},
             {"epochs", config.train.epochs},
             {"step_size", config.train.step_size},
             {"batch_size", config.train.batch_size}}},
           {"analyses",
            {{"moves", config.analyses.moves},
             {"separation", config.analyses.separation},
             {"witness_injection", config.analyses.witness_injection},
             {"isomap",
              {{"enabled", config.analyses.isomap.enabled},
               {"k_neighbors", config.analyses.isomap.k_neighbors},
               {"target_dim", config.analyses.isomap.target_dim}}},
             {"components",
              {{"enabled", config.analyses.components.enabled}, {"eps", config.analyses.components.eps}}}}},
           {"output_dir", config.output_dir}};
    return j.dump(2) + "\n";
}

Stage stage_from_string(const std::string& name) {
    if (name == "generate") return Stage::Generate;
    if (name == "train") return Stage::Train;
    if (name == "trace") return Stage::Trace;
    if (name == "analyze") return Stage::Analyze;
    if (name == "isomap") return Stage::Isomap;
    if (name == "report") return Stage::Report;
    throw std::invalid_argument("unknown stage: " + name +
                                " (expected generate|train|trace|analyze|isomap|report)");
}

std::string to_string(Stage stage) {
    switch (stage) {
        case Stage::Generate: return "generate";
        case Stage::Train: return "train";
        case Stage::Trace: return "trace";
        case Stage::Analyze: return "analyze";
        case Stage::Isomap: return "isomap";
        case Stage::Report: return "report";
    }
    return "?";
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    return json::parse(in);
}

void require_artifact(const fs::path& path, const char* producer) {
    if (!fs::exists(path))
        throw std::invalid_argument("missing artifact " + path.string() + "; run the " + producer + " stage first");
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_to_json(m.row(i).transpose()));
    return rows;
}

Eigen::VectorXd vector_from_json(const json& arr) {
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
    return v;
}

struct WitnessFile {
    Eigen::VectorXd p1, p2, null_direction;
    double residual = 0.0;
};

std::optional<WitnessFile> load_witness(const ExperimentConfig& config, const fs::path& dir) {
    if (!config.analyses.witness_injection) return std::nullopt;
    const fs::path path = dir / "witness.json";
    require_artifact(path, "train");
    const json j = read_json(path);
    WitnessFile w;
    w.p1 = vector_from_json(j.at("p1"));
    w.p2 = vector_from_json(j.at("p2"));
    w.null_direction = vector_from_json(j.at("null_direction"));
    w.residual = j.at("residual").get<double>();
    return w;
}

// Witness pair appended for evaluation: p1 in the ball (class 0), p2 in the
// shell (class 1).
LabeledPointSet with_witness(const LabeledPointSet& data, const std::optional<WitnessFile>& witness) {
    if (!witness) return data;
    LabeledPointSet aug = data;
    aug.points.conservativeResize(data.count() + 2, data.dim());
    aug.points.row(data.count()) = witness->p1.transpose();
    aug.points.row(data.count() + 1) = witness->p2.transpose();
    aug.labels.push_back(0);
    aug.labels.push_back(1);
    aug.validate();
    return aug;
}

LabeledPointSet load_eval_dataset(const ExperimentConfig& config, const fs::path& dir) {
    require_artifact(dir / "dataset.csv", "generate");
    return with_witness(load_dataset_csv((dir / "dataset.csv").string()), load_witness(config, dir));
}

std::string layer_file_name(int layer) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "layer_%02d.csv", layer);
    return buf;
}

void stage_generate(const ExperimentConfig& config, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "config.json", config_to_json(config));
    save_dataset_csv(generate(config.dataset), (dir / "dataset.csv").string());
}

void stage_train(const ExperimentConfig& config, const fs::path& dir) {
    require_artifact(dir / "dataset.csv", "generate");
    const LabeledPointSet data = load_dataset_csv((dir / "dataset.csv").string());
    const TrainResult result = train(config.network, data, config.train);
    save_network(result.net, (dir / "checkpoint.txt").string());

    std::string history = "epoch,loss\n";
    for (std::size_t e = 0; e < result.loss_history.size(); ++e)
        history += std::to_string(e) + "," + format_double(result.loss_history[e]) + "\n";
    write_text(dir / "loss_history.csv", history);

    write_json(dir / "training.json",
               json{{"epochs", config.train.epochs},
                    {"final_loss", result.loss_history.empty() ? 0.0 : result.loss_history.back()},
                    {"final_accuracy", result.final_accuracy},
                    {"seed", config.train.seed}});

    if (config.analyses.witness_injection) {
        const KernelCollisionWitness w =
            kernel_collision_witness(result.net.layers.front().weights, config.dataset.ball_radius,
                                     config.dataset.shell_inner, config.dataset.shell_outer);
        write_json(dir / "witness.json", json{{"p1", vector_to_json(w.p1)},
                                              {"p2", vector_to_json(w.p2)},
                                              {"null_direction", vector_to_json(w.null_direction)},
                                              {"residual", w.residual},
                                              {"labels", {0, 1}}});
    }
}

ActivationTrace recompute_trace(const ExperimentConfig& config, const fs::path& dir, Network& net_out) {
    require_artifact(dir / "checkpoint.txt", "train");
    net_out = load_network((dir / "checkpoint.txt").string());
    const LabeledPointSet data = load_eval_dataset(config, dir);
    return trace_activations(net_out, data);
}

void stage_trace(const ExperimentConfig& config, const fs::path& dir) {
    Network net;
    const ActivationTrace trace = recompute_trace(config, dir, net);
    fs::create_directories(dir / "trace");

    json manifest{{"count", trace.clouds.front().rows()},
                  {"num_classes", trace.num_classes},
                  {"layers", json::array()}};
    for (std::size_t i = 0; i < trace.clouds.size(); ++i) {
        LabeledPointSet cloud;
        cloud.points = trace.clouds[i];
        cloud.labels = trace.labels;
        cloud.num_classes = trace.num_classes;
        cloud.shape_tag = "trace layer " + std::to_string(i);
        const std::string name = layer_file_name(static_cast<int>(i));
        save_dataset_csv(cloud, (dir / "trace" / name).string(),
                         {"activation cloud X^[" + std::to_string(i) + "]"});
        manifest["layers"].push_back(
            {{"index", i}, {"dim", trace.clouds[i].cols()}, {"file", "trace/" + name}});
    }
    if (config.analyses.witness_injection)
        manifest["witness_indices"] = {trace.clouds.front().rows() - 2, trace.clouds.front().rows() - 1};
    write_json(dir / "trace" / "manifest.json", manifest);
}

json relu_report_to_json(const ReluActionReport& r) {
    json pairs = json::array();
    for (const auto& [a, b] : r.witness_pairs) pairs.push_back({a, b});
    return json{{"action", to_string(r.action)},
                {"collision_pair_count", r.collision_pair_count},
                {"witness_pairs", pairs},
                {"negatives_present", r.negatives_present},
                {"orthant_census", r.orthant_census}};
}

json move_report_to_json(const MoveReport& m) {
    json j{{"layer", m.layer_index},
           {"activation", to_string(m.activation)},
           {"translation_norm", m.translation_norm},
           {"linear",
            {{"rank", m.linear.rank},
             {"is_full_rank", m.linear.is_full_rank},
             {"rank_tolerance", m.linear.rank_tolerance},
             {"singular_values", vector_to_json(m.linear.singular_values)},
             {"null_basis", matrix_to_json(m.linear.null_basis)},
             {"det_sign_u", m.linear.det_sign_u},
             {"det_sign_v", m.linear.det_sign_v},
             {"reconstruction_error", m.linear.reconstruction_error}}}};
    if (m.has_relu_report) j["relu"] = relu_report_to_json(m.relu);
    return j;
}

void stage_analyze(const ExperimentConfig& config, const fs::path& dir) {
    Network net;
    const ActivationTrace trace = recompute_trace(config, dir, net);

    if (config.analyses.moves) {
        json layers = json::array();
        for (const auto& report : move_reports(net, trace)) layers.push_back(move_report_to_json(report));
        write_json(dir / "moves.json", json{{"layers", layers}, {"evidence", "on sampled points"}});
    }

    if (config.analyses.separation) {
        const Eigen::MatrixXd& outputs = trace.clouds.back();
        const SeparationVerdict verdict =
            separation_verdict_from_outputs(outputs, trace.labels, trace.num_classes);
        json voronoi{{"separated", verdict.separated},
                     {"accuracy", verdict.accuracy},
                     {"class_contained", verdict.class_contained},
                     {"boundary_points", verdict.boundary_points},
                     {"tie_tol", 1e-9}};

        std::vector<Eigen::MatrixXd> class_images;
        for (int c = 0; c < trace.num_classes; ++c) class_images.push_back(trace.class_cloud(net.depth(), c));
        const SeparabilityVerdict disc = disc_separability_check(class_images);
        json disc_json{{"status", to_string(disc.status)}};
        if (disc.collision_witness) {
            disc_json["collision_classes"] = {disc.collision_classes.first, disc.collision_classes.second};
            disc_json["collision_witness"] = {vector_to_json(disc.collision_witness->first),
                                              vector_to_json(disc.collision_witness->second)};
        }
        json planes = json::array();
        for (const auto& p : disc.planes)
            planes.push_back({{"class_a", p.class_a},
                              {"class_b", p.class_b},
                              {"normal", vector_to_json(p.normal)},
                              {"threshold", p.threshold},
                              {"margin", p.margin}});
        disc_json["planes"] = planes;

        json out{{"voronoi", voronoi}, {"disc_check", disc_json}};
        if (config.analyses.witness_injection)
            out["witness_indices"] = {trace.clouds.front().rows() - 2, trace.clouds.front().rows() - 1};
        write_json(dir / "separation.json", out);
    }

    if (config.analyses.components.enabled) {
        const bool softmax_last = net.layers.back().activation == Activation::Softmax;
        json layers = json::array();
        for (std::size_t layer = 0; layer < trace.clouds.size(); ++layer) {
            json classes = json::array();
            for (int c = 0; c < trace.num_classes; ++c) {
                const Eigen::MatrixXd cloud = trace.class_cloud(static_cast<int>(layer), c);
                if (cloud.rows() < 2) {
                    classes.push_back({{"label", c}, {"eps", 0.0}, {"count", cloud.rows()}});
                    continue;
                }
                double eps = config.analyses.components.eps > 0.0 ? config.analyses.components.eps
                                                                  : default_component_epsilon(cloud);
                // softmax outputs live at the fixed codomain scale
                if (config.analyses.components.eps <= 0.0 && softmax_last &&
                    layer + 1 == trace.clouds.size())
                    eps = std::max(eps, kSimplexComponentFloor);
                const ComponentAssignment comp = epsilon_components(cloud, eps);
                classes.push_back({{"label", c}, {"eps", eps}, {"count", comp.count}});
            }
            layers.push_back({{"layer", layer}, {"classes", classes}});
        }
        write_json(dir / "components.json",
                   json{{"eps_mode", config.analyses.components.eps > 0.0 ? "fixed" : "auto"}, {"layers", layers}});
    }
}

void stage_isomap(const ExperimentConfig& config, const fs::path& dir) {
    if (!config.analyses.isomap.enabled) return;
    Network net;
    const ActivationTrace trace = recompute_trace(config, dir, net);
    fs::create_directories(dir / "isomap");

    json manifest{{"k_neighbors", config.analyses.isomap.k_neighbors},
                  {"target_dim", config.analyses.isomap.target_dim},
                  {"layers", json::array()}};
    for (std::size_t layer = 0; layer < trace.clouds.size(); ++layer) {
        const Eigen::MatrixXd& cloud = trace.clouds[layer];
        if (cloud.cols() <= config.analyses.isomap.target_dim) {
            manifest["layers"].push_back({{"index", layer}, {"skipped", "dim <= target_dim"}});
            continue;
        }
        const IsomapResult result = isomap(cloud, config.analyses.isomap.k_neighbors,
                                           config.analyses.isomap.target_dim);
        LabeledPointSet projected;
        projected.points = result.coords;
        projected.labels = trace.labels;
        projected.num_classes = trace.num_classes;
        projected.shape_tag = "isomap layer " + std::to_string(layer);
        const std::string name = layer_file_name(static_cast<int>(layer));
        save_dataset_csv(projected, (dir / "isomap" / name).string(),
                         {"isomap projection of activation cloud X^[" + std::to_string(layer) + "]",
                          "source_layer=" + std::to_string(layer) +
                              " k_neighbors=" + std::to_string(config.analyses.isomap.k_neighbors) +
                              " target_dim=" + std::to_string(config.analyses.isomap.target_dim) +
                              " residual_variance=" + format_double(result.residual_variance)});
        manifest["layers"].push_back({{"index", layer},
                                      {"file", "isomap/" + name},
                                      {"residual_variance", result.residual_variance},
                                      {"eigenvalues", vector_to_json(result.eigenvalues)}});
    }
    write_json(dir / "isomap" / "manifest.json", manifest);
}

void stage_report(const ExperimentConfig& config, const fs::path& dir) {
    require_artifact(dir / "config.json", "generate");
    require_artifact(dir / "dataset.csv", "generate");
    require_artifact(dir / "training.json", "train");

    const LabeledPointSet data = load_dataset_csv((dir / "dataset.csv").string());
    json dataset_summary{{"dim", data.dim()},
                         {"num_classes", data.num_classes},
                         {"count", data.count()},
                         {"shape", to_string(config.dataset.kind)},
                         {"min_interclass_distance", data.min_interclass_distance()}};

    json report{{"config", json::parse(config_to_json(config))},
                {"dataset", dataset_summary},
                {"training", read_json(dir / "training.json")}};
    if (fs::exists(dir / "witness.json")) report["witness"] = read_json(dir / "witness.json");
    if (fs::exists(dir / "moves.json")) report["moves"] = read_json(dir / "moves.json");
    if (fs::exists(dir / "separation.json")) report["separation"] = read_json(dir / "separation.json");
    if (fs::exists(dir / "components.json")) report["components"] = read_json(dir / "components.json");
    if (fs::exists(dir / "isomap/manifest.json")) report["isomap"] = read_json(dir / "isomap/manifest.json");
    if (fs::exists(dir / "trace/manifest.json")) report["trace"] = read_json(dir / "trace/manifest.json");

    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir).generic_string();
        if (rel == "report.json" || rel == "meta.json") continue;
        files.push_back(rel);
    }
    std::sort(files.begin(), files.end());
    report["files"] = files;
    write_json(dir / "report.json", report);
}

}  // namespace

void run_stage(const ExperimentConfig& config, const std::string& out_dir, Stage stage) {
    config.validate();
    const fs::path dir(out_dir);
    if (out_dir.empty()) throw std::invalid_argument("no output directory given");
    switch (stage) {
        case Stage::Generate: stage_generate(config, dir); break;
        case Stage::Train: stage_train(config, dir); break;
        case Stage::Trace: stage_trace(config, dir); break;
        case Stage::Analyze: stage_analyze(config, dir); break;
        case Stage::Isomap: stage_isomap(config, dir); break;
        case Stage::Report: stage_report(config, dir); break;
    }
}

RunSummary run_experiment(const ExperimentConfig& config, const std::string& out_dir) {
    for (Stage stage : {Stage::Generate, Stage::Train, Stage::Trace, Stage::Analyze, Stage::Isomap, Stage::Report})
        run_stage(config, out_dir, stage);

    const fs::path dir(out_dir);
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    write_json(dir / "meta.json",
               json{{"tool", "toponet"},
                    {"format_version", 1},
                    {"timestamp_ns", std::chrono::duration_cast<std::chrono::nanoseconds>(now).count()}});

    RunSummary summary;
    summary.report_path = (dir / "report.json").string();
    const json training = read_json(dir / "training.json");
    summary.final_accuracy = training.at("final_accuracy").get<double>();
    if (fs::exists(dir / "separation.json"))
        summary.separated = read_json(dir / "separation.json").at("voronoi").at("separated").get<bool>();
    return summary;
}

}  // namespace toponet
