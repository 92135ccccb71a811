#include "toponet/dataset.hpp"
#include "toponet/embedding.hpp"
#include "toponet/experiment.hpp"
#include "toponet/moves.hpp"
#include "toponet/network.hpp"
#include "toponet/separator.hpp"
#include "toponet/shapes.hpp"
#include "toponet/simplex.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace toponet;

namespace {

ShapeSpec make_shape_spec(const std::string& kind, long points_per_class, std::uint64_t seed,
                          const py::kwargs& kwargs) {
    ShapeSpec spec;
    spec.kind = shape_kind_from_string(kind);
    spec.points_per_class = points_per_class;
    spec.seed = seed;
    for (const auto& item : kwargs) {
        const std::string key = py::cast<std::string>(item.first);
        if (key == "inner_radius") spec.inner_radius = py::cast<double>(item.second);
        else if (key == "outer_radius") spec.outer_radius = py::cast<double>(item.second);
        else if (key == "band_gap") spec.band_gap = py::cast<double>(item.second);
        else if (key == "major_radius") spec.major_radius = py::cast<double>(item.second);
        else if (key == "minor_radius") spec.minor_radius = py::cast<double>(item.second);
        else if (key == "arc_margin") spec.arc_margin = py::cast<double>(item.second);
        else if (key == "ambient_dim") spec.ambient_dim = py::cast<int>(item.second);
        else if (key == "ball_radius") spec.ball_radius = py::cast<double>(item.second);
        else if (key == "shell_inner") spec.shell_inner = py::cast<double>(item.second);
        else if (key == "shell_outer") spec.shell_outer = py::cast<double>(item.second);
        else throw std::invalid_argument("unknown shape parameter: " + key);
    }
    return spec;
}

NetworkSpec spec_from_layers(const std::vector<std::tuple<int, int, std::string>>& layers) {
    NetworkSpec spec;
    for (const auto& [in_dim, out_dim, act] : layers)
        spec.layers.push_back({in_dim, out_dim, activation_from_string(act)});
    spec.validate();
    return spec;
}

}  // namespace

PYBIND11_MODULE(_toponet, m) {
    m.doc() = "topological analysis of softmax classification networks";

    py::class_<LabeledPointSet>(m, "LabeledPointSet")
        .def(py::init([](const Eigen::MatrixXd& points, const std::vector<int>& labels, int num_classes) {
                 LabeledPointSet data{points, labels, num_classes, "python"};
                 data.validate();
                 return data;
             }),
             py::arg("points"), py::arg("labels"), py::arg("num_classes"))
        .def_readonly("points", &LabeledPointSet::points)
        .def_readonly("labels", &LabeledPointSet::labels)
        .def_readonly("num_classes", &LabeledPointSet::num_classes)
        .def_readonly("shape_tag", &LabeledPointSet::shape_tag)
        .def("class_points", &LabeledPointSet::class_points, py::arg("label"))
        .def("min_interclass_distance", &LabeledPointSet::min_interclass_distance)
        .def("__len__", [](const LabeledPointSet& d) { return d.count(); });

    m.def(
        "generate",
        [](const std::string& kind, long points_per_class, std::uint64_t seed, const py::kwargs& kwargs) {
            return generate(make_shape_spec(kind, points_per_class, seed, kwargs));
        },
        py::arg("kind"), py::arg("points_per_class") = 2000, py::arg("seed") = 0,
        "Sample a labeled manifold dataset: kind is annulus|torus|ball_shell|linked_tori");

    m.def("save_dataset_csv",
          [](const LabeledPointSet& d, const std::string& path) { save_dataset_csv(d, path); });
    m.def("load_dataset_csv", &load_dataset_csv, py::arg("path"), py::arg("validate") = true);

    py::class_<ScalarField>(m, "ScalarField")
        .def("__call__", [](const ScalarField& f, const Eigen::VectorXd& x) { return f(x); })
        .def("evaluate", &ScalarField::evaluate)
        .def_property_readonly("dim", &ScalarField::dim);
    m.def("urysohn_pair", &urysohn_pair, py::arg("set_a"), py::arg("set_b"), py::arg("collision_tol") = 1e-12);
    m.def("urysohn_multiclass", &urysohn_multiclass, py::arg("classes"), py::arg("collision_tol") = 1e-12);

    py::class_<LiftedField>(m, "LiftedField")
        .def("__call__", [](const LiftedField& f, const Eigen::VectorXd& x) { return f(x); })
        .def("evaluate", &LiftedField::evaluate);
    m.def("lift_to_rk", [](const ScalarField& f, int k) { return lift_to_rk(f, k); });

    py::class_<SeparatingPlane>(m, "SeparatingPlane")
        .def_readonly("class_a", &SeparatingPlane::class_a)
        .def_readonly("class_b", &SeparatingPlane::class_b)
        .def_readonly("normal", &SeparatingPlane::normal)
        .def_readonly("threshold", &SeparatingPlane::threshold)
        .def_readonly("margin", &SeparatingPlane::margin);
    py::class_<SeparabilityVerdict>(m, "SeparabilityVerdict")
        .def_property_readonly("status", [](const SeparabilityVerdict& v) { return to_string(v.status); })
        .def_readonly("planes", &SeparabilityVerdict::planes)
        .def_property_readonly("collision_witness",
                               [](const SeparabilityVerdict& v) -> py::object {
                                   if (!v.collision_witness) return py::none();
                                   return py::make_tuple(v.collision_witness->first, v.collision_witness->second);
                               });
    m.def("disc_separability_check", &disc_separability_check, py::arg("class_images"),
          py::arg("collision_tol") = 1e-9);

    py::class_<KernelCollisionWitness>(m, "KernelCollisionWitness")
        .def_readonly("p1", &KernelCollisionWitness::p1)
        .def_readonly("p2", &KernelCollisionWitness::p2)
        .def_readonly("null_direction", &KernelCollisionWitness::null_direction)
        .def_readonly("residual", &KernelCollisionWitness::residual);
    m.def("kernel_collision_witness", &kernel_collision_witness, py::arg("w"), py::arg("inner_radius") = 0.9,
          py::arg("shell_lo") = 1.0, py::arg("shell_hi") = 2.0);

    py::class_<Network>(m, "Network")
        .def_property_readonly("depth", &Network::depth)
        .def_property_readonly("input_dim", &Network::input_dim)
        .def_property_readonly("output_dim", &Network::output_dim)
        .def("weights", [](const Network& n, int i) { return n.layers.at(i).weights; })
        .def("bias", [](const Network& n, int i) { return n.layers.at(i).bias; })
        .def("activation", [](const Network& n, int i) { return to_string(n.layers.at(i).activation); });

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("net", &TrainResult::net)
        .def_readonly("loss_history", &TrainResult::loss_history)
        .def_readonly("final_accuracy", &TrainResult::final_accuracy);

    py::class_<ActivationTrace>(m, "ActivationTrace")
        .def_readonly("clouds", &ActivationTrace::clouds)
        .def_readonly("labels", &ActivationTrace::labels)
        .def_readonly("num_classes", &ActivationTrace::num_classes)
        .def("class_cloud", &ActivationTrace::class_cloud, py::arg("layer"), py::arg("label"));

    m.def(
        "initialize_network",
        [](const std::vector<std::tuple<int, int, std::string>>& layers, std::uint64_t seed) {
            return initialize_network(spec_from_layers(layers), seed);
        },
        py::arg("layers"), py::arg("seed") = 0,
        "layers: list of (in_dim, out_dim, 'relu'|'softmax'|'identity') tuples");
    m.def(
        "train",
        [](const std::vector<std::tuple<int, int, std::string>>& layers, const LabeledPointSet& data,
           std::uint64_t seed, long epochs, double step_size, long batch_size) {
            Hyperparams hp;
            hp.seed = seed;
            hp.epochs = epochs;
            hp.step_size = step_size;
            hp.batch_size = batch_size;
            return train(spec_from_layers(layers), data, hp);
        },
        py::arg("layers"), py::arg("data"), py::arg("seed") = 0, py::arg("epochs") = 1000,
        py::arg("step_size") = 1e-3, py::arg("batch_size") = 0);
    m.def("forward", &forward, py::arg("net"), py::arg("x"));
    m.def("head", &head, py::arg("net"), py::arg("i"), py::arg("x"));
    m.def("trace_activations", &trace_activations, py::arg("net"), py::arg("data"));
    m.def("accuracy", &accuracy);
    m.def("save_network", &save_network);
    m.def("load_network", &load_network);

    py::class_<LinearMoveReport>(m, "LinearMoveReport")
        .def_readonly("rank", &LinearMoveReport::rank)
        .def_readonly("singular_values", &LinearMoveReport::singular_values)
        .def_readonly("null_basis", &LinearMoveReport::null_basis)
        .def_readonly("det_sign_u", &LinearMoveReport::det_sign_u)
        .def_readonly("det_sign_v", &LinearMoveReport::det_sign_v)
        .def_readonly("is_full_rank", &LinearMoveReport::is_full_rank)
        .def_readonly("rank_tolerance", &LinearMoveReport::rank_tolerance)
        .def_readonly("reconstruction_error", &LinearMoveReport::reconstruction_error);
    py::class_<ReluActionReport>(m, "ReluActionReport")
        .def_property_readonly("action", [](const ReluActionReport& r) { return to_string(r.action); })
        .def_readonly("collision_pair_count", &ReluActionReport::collision_pair_count)
        .def_readonly("witness_pairs", &ReluActionReport::witness_pairs)
        .def_readonly("orthant_census", &ReluActionReport::orthant_census)
        .def_readonly("negatives_present", &ReluActionReport::negatives_present);
    py::class_<MoveReport>(m, "MoveReport")
        .def_readonly("layer_index", &MoveReport::layer_index)
        .def_property_readonly("activation", [](const MoveReport& r) { return to_string(r.activation); })
        .def_readonly("linear", &MoveReport::linear)
        .def_readonly("translation_norm", &MoveReport::translation_norm)
        .def_readonly("has_relu_report", &MoveReport::has_relu_report)
        .def_readonly("relu", &MoveReport::relu);
    m.def("decompose_linear", &decompose_linear, py::arg("w"),
          py::arg("eps_scale") = std::numeric_limits<double>::epsilon());
    m.def("classify_relu_action", &classify_relu_action, py::arg("cloud"), py::arg("collision_tol") = 1e-9);
    m.def("layer_move_summary", &layer_move_summary);
    m.def("move_reports", &move_reports);

    m.def("softmax_map", [](const Eigen::VectorXd& x) { return softmax_map(x).coords; });
    m.def(
        "voronoi_cell_of",
        [](const Eigen::VectorXd& p, double tie_tol) {
            const CellAssignment cell = voronoi_cell_of(SimplexPoint{p}, tie_tol);
            return py::make_tuple(cell.index, cell.tie, cell.margin);
        },
        py::arg("p"), py::arg("tie_tol") = 1e-9, "returns (cell index, tie flag, margin)");
    py::class_<SeparationVerdict>(m, "SeparationVerdict")
        .def_readonly("class_contained", &SeparationVerdict::class_contained)
        .def_readonly("separated", &SeparationVerdict::separated)
        .def_readonly("accuracy", &SeparationVerdict::accuracy)
        .def_readonly("boundary_points", &SeparationVerdict::boundary_points);
    m.def("separation_verdict", &separation_verdict, py::arg("net"), py::arg("data"), py::arg("tie_tol") = 1e-9);

    py::class_<IsomapResult>(m, "IsomapResult")
        .def_readonly("coords", &IsomapResult::coords)
        .def_readonly("eigenvalues", &IsomapResult::eigenvalues)
        .def_readonly("residual_variance", &IsomapResult::residual_variance);
    m.def("isomap", &isomap, py::arg("cloud"), py::arg("k_neighbors"), py::arg("target_dim"));
    m.def("classical_mds", &classical_mds, py::arg("dist"), py::arg("target_dim"));
    py::class_<ComponentAssignment>(m, "ComponentAssignment")
        .def_readonly("component_of", &ComponentAssignment::component_of)
        .def_readonly("count", &ComponentAssignment::count)
        .def_readonly("eps", &ComponentAssignment::eps);
    m.def("epsilon_components", &epsilon_components, py::arg("cloud"), py::arg("eps"));
    m.def("default_component_epsilon", &default_component_epsilon, py::arg("cloud"));

    py::class_<RunSummary>(m, "RunSummary")
        .def_readonly("final_accuracy", &RunSummary::final_accuracy)
        .def_readonly("separated", &RunSummary::separated)
        .def_readonly("report_path", &RunSummary::report_path);
    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::string& out_dir) {
            return run_experiment(parse_config(config_json), out_dir);
        },
        py::arg("config_json"), py::arg("out_dir"),
        "Run the full pipeline for a JSON config string into out_dir");
    m.def(
        "run_experiment_file",
        [](const std::string& config_path, const std::string& out_dir) {
            return run_experiment(load_config(config_path), out_dir);
        },
        py::arg("config_path"), py::arg("out_dir"));
}
