// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion prints its runtime; budgets are asserted by eye
// against the printed numbers, correctness is asserted in code.

#include "toponet/dataset.hpp"
#include "toponet/embedding.hpp"
#include "toponet/experiment.hpp"
#include "toponet/moves.hpp"
#include "toponet/network.hpp"
#include "toponet/rng.hpp"
#include "toponet/separator.hpp"
#include "toponet/shapes.hpp"
#include "toponet/simplex.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace toponet;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string name;
    std::function<void(std::string&)> body;  // throws on failure, may append detail
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ACCEPT(cond)                                                                               \
    do {                                                                                           \
        if (!(cond)) throw Failure(std::string(__FILE__) + ":" + std::to_string(__LINE__) + ": " #cond); \
    } while (0)

fs::path scratch_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir = fs::temp_directory_path() /
                         ("toponet_accept_" + tag + "_" + std::to_string(::getpid()) + "_" +
                          std::to_string(counter++));
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

LabeledPointSet random_blob_dataset(Rng& rng, int n_classes, int dim, long per_class) {
    // classes live in unit balls around well-separated lattice centers
    LabeledPointSet data;
    data.num_classes = n_classes;
    data.points.resize(per_class * n_classes, dim);
    long row = 0;
    for (int c = 0; c < n_classes; ++c) {
        Eigen::VectorXd center = Eigen::VectorXd::Zero(dim);
        center[0] = 10.0 * c;
        for (int j = 1; j < dim; ++j) center[j] = 10.0 * static_cast<double>(rng.index(3));
        for (long i = 0; i < per_class; ++i) {
            Eigen::VectorXd offset(dim);
            for (int j = 0; j < dim; ++j) offset[j] = rng.uniform(-0.8, 0.8);
            data.points.row(row) = (center + offset).transpose();
            data.labels.push_back(c);
            ++row;
        }
    }
    return data;
}

std::string experiment_json(const std::string& dataset_kind, const std::string& dataset_extra, long ppc,
                            std::uint64_t seed, const std::vector<std::vector<int>>& dims, long epochs,
                            double step, const std::string& analyses) {
    std::ostringstream out;
    out << "{\n  \"dataset\": {\"kind\": \"" << dataset_kind << "\", \"points_per_class\": " << ppc
        << ", \"seed\": " << seed << dataset_extra << "},\n  \"network\": {\"layers\": [";
    for (std::size_t i = 0; i < dims.size(); ++i) {
        const bool last = i + 1 == dims.size();
        out << (i ? ",\n    " : "\n    ") << "{\"in\": " << dims[i][0] << ", \"out\": " << dims[i][1]
            << ", \"activation\": \"" << (last ? "softmax" : "relu") << "\"}";
    }
    out << "]},\n  \"train\": {\"seed\": " << seed << ", \"epochs\": " << epochs << ", \"step_size\": " << step
        << "},\n  \"analyses\": " << analyses << "\n}";
    return out.str();
}

const std::vector<std::vector<int>> kAnnulusArch{{2, 5}, {5, 5}, {5, 2}, {2, 2}, {2, 2}, {2, 2}};
const std::vector<std::vector<int>> kTorusArch{{3, 3}, {3, 3}, {3, 3}, {3, 3}, {3, 3}, {3, 3}};
const std::vector<std::vector<int>> kLinkedArch{{3, 7}, {7, 7}, {7, 7}, {7, 3}, {3, 2}};
const std::vector<std::vector<int>> kBottleneckArch{{3, 2}, {2, 2}, {2, 2}};

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

void criterion_urysohn_exactness(std::string& detail) {
    Rng rng(1001);
    long points_checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const int n_classes = 2 + static_cast<int>(rng.index(4));
        const int dim = 1 + static_cast<int>(rng.index(5));
        const long per_class = 30 + static_cast<long>(rng.index(50));
        const LabeledPointSet data = random_blob_dataset(rng, n_classes, dim, per_class);
        data.validate();
        std::vector<Eigen::MatrixXd> classes;
        for (int c = 0; c < n_classes; ++c) classes.push_back(data.class_points(c));
        const ScalarField f = urysohn_multiclass(classes);
        for (int c = 0; c < n_classes; ++c) {
            const Eigen::VectorXd values = f.evaluate(classes[static_cast<std::size_t>(c)]);
            for (Eigen::Index i = 0; i < values.size(); ++i) {
                ACCEPT(std::abs(values[i] - static_cast<double>(c + 1)) <= 1e-12);
                ++points_checked;
            }
        }
    }
    detail = std::to_string(points_checked) + " sample points exact";
}

void criterion_theorem5(std::string& detail) {
    Rng rng(1002);
    for (int trial = 0; trial < 100; ++trial) {
        const bool small = trial < 50;
        const int n = small ? 3 : 5;
        const int k = small ? 2 : 3;
        Eigen::MatrixXd w(k, n);
        for (int r = 0; r < k; ++r)
            for (int c = 0; c < n; ++c) w(r, c) = rng.normal();

        NetworkSpec spec;
        spec.layers.push_back({n, k, Activation::Relu});
        spec.layers.push_back({k, 4, Activation::Relu});
        spec.layers.push_back({4, 2, Activation::Softmax});
        Network net = initialize_network(spec, rng.next_u64());
        net.layers[0].weights = w;
        for (Eigen::Index i = 0; i < k; ++i) net.layers[0].bias[i] = rng.uniform(-0.5, 0.5);

        const KernelCollisionWitness witness = kernel_collision_witness(w);
        ACCEPT(witness.p1.norm() <= 0.9);
        ACCEPT(witness.p2.norm() >= 1.0);
        ACCEPT(witness.p2.norm() <= 2.0);
        // "equal outputs": equal within the witness residual contract (1e-9)
        // plus the exact discrete consequence: the pair shares a cell or sits
        // on a boundary, so no two disjoint cell interiors can take them.
        const Eigen::VectorXd out1 = forward(net, witness.p1);
        const Eigen::VectorXd out2 = forward(net, witness.p2);
        ACCEPT((out1 - out2).norm() <= 1e-9);
        const CellAssignment cell1 = voronoi_cell_of(SimplexPoint{out1});
        const CellAssignment cell2 = voronoi_cell_of(SimplexPoint{out2});
        ACCEPT(cell1.index == cell2.index || (cell1.tie && cell2.tie));
    }

    // E3: bottleneck + witness injection -> never separated
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const fs::path dir = scratch_dir("e3_seed" + std::to_string(seed));
        const ExperimentConfig config = parse_config(experiment_json(
            "ball_shell", "", 150, seed, kBottleneckArch, 250, 0.02,
            R"({"witness_injection": true, "isomap": {"enabled": false}, "components": {"enabled": false}})"));
        const RunSummary summary = run_experiment(config, dir.string());
        ACCEPT(summary.separated == false);
        fs::remove_all(dir);
    }
    detail = "100 witnesses verified; E3 verdict false on seeds 1-5";
}

void criterion_voronoi_argmax(std::string& detail) {
    Rng rng(1003);
    long checked = 0, ties = 0;
    for (long trial = 0; trial < 1000000; ++trial) {
        const int n = 2 + static_cast<int>(rng.index(5));
        Eigen::VectorXd raw(n);
        for (int i = 0; i < n; ++i) raw[i] = -std::log(1.0 - rng.uniform());
        const SimplexPoint p{raw / raw.sum()};
        const CellAssignment cell = voronoi_cell_of(p);
        if (cell.tie) {
            ++ties;
            continue;
        }
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int v = 0; v < n; ++v) {
            Eigen::VectorXd vertex = Eigen::VectorXd::Zero(n);
            vertex[v] = 1.0;
            const double d = (p.coords - vertex).norm();
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        ACCEPT(cell.index == best);
        ++checked;
    }
    detail = std::to_string(checked) + " no-tie points agree (" + std::to_string(ties) + " ties skipped)";
}

void criterion_relu_taxonomy(std::string& detail) {
    Eigen::MatrixXd positive(3, 2);
    positive << 0.5, 1.0, 2.0, 0.1, 1.5, 2.5;
    ACCEPT(classify_relu_action(positive).action == ReluAction::IdentityAction);

    // fourth-quadrant collision: same x, negative ys collapse onto (x, 0)
    Eigen::MatrixXd fourth(3, 2);
    fourth << 1.0, 1.0, 1.0, -0.5, 1.0, -1.5;
    const ReluActionReport quotient = classify_relu_action(fourth);
    ACCEPT(quotient.action == ReluAction::Quotienting);
    ACCEPT(quotient.collision_pair_count == 1);

    // second-quadrant bend: negatives present, images stay distinct
    Eigen::MatrixXd second(3, 2);
    second << 1.0, 1.0, -0.5, 1.0, -1.5, 0.5;
    const ReluActionReport bend = classify_relu_action(second);
    ACCEPT(bend.action == ReluAction::Bending);
    ACCEPT(bend.negatives_present);
    ACCEPT(bend.collision_pair_count == 0);

    const int side = 101;
    Eigen::MatrixXd grid(side * side, 2);
    for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
            grid(i * side + j, 0) = -1.0 + 2.0 * i / (side - 1);
            grid(i * side + j, 1) = -1.0 + 2.0 * j / (side - 1);
        }
    const ReluActionReport dense = classify_relu_action(grid);
    ACCEPT(dense.action == ReluAction::Quotienting);
    const long negatives = (side - 1) / 2;
    ACCEPT(dense.collision_pair_count >= negatives * negatives * (negatives * negatives - 1) / 2);
    ACCEPT(!dense.witness_pairs.empty());
    const auto [wi, wj] = dense.witness_pairs.front();
    ACCEPT(grid.row(wi).cwiseMax(0.0).norm() == 0.0);  // collapses to the origin
    ACCEPT(grid.row(wj).cwiseMax(0.0).norm() == 0.0);
    detail = "canonical clouds + dense grid with " + std::to_string(dense.collision_pair_count) + " collapses";
}

void criterion_e1_annulus(std::string& detail) {
    int successes = 0;
    std::ostringstream accs;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ShapeSpec shape;
        shape.kind = ShapeKind::Annulus2D;
        shape.points_per_class = 500;
        shape.seed = seed;
        const LabeledPointSet data = generate(shape);

        NetworkSpec spec;
        for (std::size_t i = 0; i < kAnnulusArch.size(); ++i)
            spec.layers.push_back({kAnnulusArch[i][0], kAnnulusArch[i][1],
                                   i + 1 == kAnnulusArch.size() ? Activation::Softmax : Activation::Relu});
        Hyperparams hp;
        hp.seed = seed;
        hp.epochs = 2000;
        hp.step_size = 0.008;
        hp.batch_size = 25;
        const TrainResult result = train(spec, data, hp);
        accs << " " << result.final_accuracy;
        if (result.final_accuracy < 0.95) continue;

        const ActivationTrace trace = trace_activations(result.net, data);
        bool quotient_evidence = false;
        for (const MoveReport& report : move_reports(result.net, trace)) {
            if (report.linear.null_basis.cols() > 0) quotient_evidence = true;  // rank-deficient linear map
            if (report.has_relu_report && report.relu.collision_pair_count > 0) quotient_evidence = true;
        }
        if (quotient_evidence) ++successes;
    }
    ACCEPT(successes >= 3);
    detail = std::to_string(successes) + "/5 seeds at >=95% with quotient evidence; accuracies:" + accs.str();
}

void criterion_e2_torus(std::string& detail) {
    int successes = 0;
    std::ostringstream log;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ShapeSpec shape;
        shape.kind = ShapeKind::Torus3D;
        shape.points_per_class = 600;
        shape.seed = seed;
        shape.arc_margin = 0.25;
        const LabeledPointSet data = generate(shape);

        NetworkSpec spec;
        for (std::size_t i = 0; i < kTorusArch.size(); ++i)
            spec.layers.push_back({kTorusArch[i][0], kTorusArch[i][1],
                                   i + 1 == kTorusArch.size() ? Activation::Softmax : Activation::Relu});
        Hyperparams hp;
        hp.seed = seed;
        hp.epochs = 4000;
        hp.step_size = 0.008;
        hp.batch_size = 25;
        const TrainResult result = train(spec, data, hp);

        const ActivationTrace trace = trace_activations(result.net, data);
        const Eigen::MatrixXd yellow_in = trace.class_cloud(0, 0);
        const Eigen::MatrixXd yellow_out = trace.class_cloud(trace.depth(), 0);
        const int comp_in = epsilon_components(yellow_in, default_component_epsilon(yellow_in)).count;
        // final cloud lives on the simplex: the documented codomain floor applies
        const double eps_out = std::max(default_component_epsilon(yellow_out), kSimplexComponentFloor);
        const int comp_out = epsilon_components(yellow_out, eps_out).count;
        log << " [acc " << result.final_accuracy << " comps " << comp_in << "->" << comp_out << "]";
        if (result.final_accuracy >= 0.90 && comp_in == 2 && comp_out == 1) ++successes;
    }
    ACCEPT(successes >= 3);
    detail = std::to_string(successes) + "/5 seeds merged the yellow rings;" + log.str();
}

void criterion_e4_linked_tori(std::string& detail) {
    int successes = 0;
    std::ostringstream log;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ShapeSpec shape;
        shape.kind = ShapeKind::LinkedTori;
        shape.points_per_class = 600;
        shape.seed = seed;
        const LabeledPointSet data = generate(shape);

        NetworkSpec spec;
        for (std::size_t i = 0; i < kLinkedArch.size(); ++i)
            spec.layers.push_back({kLinkedArch[i][0], kLinkedArch[i][1],
                                   i + 1 == kLinkedArch.size() ? Activation::Softmax : Activation::Relu});
        Hyperparams hp;
        hp.seed = seed;
        hp.epochs = 1500;
        hp.step_size = 0.01;
        const TrainResult result = train(spec, data, hp);
        const SeparationVerdict verdict = separation_verdict(result.net, data);
        log << " [acc " << result.final_accuracy << (verdict.separated ? " separated" : " not-separated") << "]";
        if (result.final_accuracy >= 0.95 && verdict.separated) ++successes;
    }
    ACCEPT(successes >= 3);
    detail = std::to_string(successes) + "/5 seeds separated;" + log.str();
}

void criterion_gradient_integrity(std::string& detail) {
    Rng rng(1008);
    long checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int in_dim = 2 + static_cast<int>(rng.index(3));
        const int hidden = 2 + static_cast<int>(rng.index(4));
        const int classes = 2 + static_cast<int>(rng.index(2));
        NetworkSpec spec;
        spec.layers.push_back({in_dim, hidden, Activation::Relu});
        spec.layers.push_back({hidden, classes, Activation::Softmax});
        Network net = initialize_network(spec, rng.next_u64());

        Eigen::MatrixXd points(8, in_dim);
        std::vector<int> labels;
        for (int i = 0; i < 8; ++i) {
            for (int j = 0; j < in_dim; ++j) points(i, j) = rng.uniform(-1.5, 1.5);
            labels.push_back(static_cast<int>(rng.index(classes)));
        }

        const LossGradients analytic = loss_and_gradients(net, points, labels);
        const double h = 1e-5;
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            for (Eigen::Index r = 0; r < net.layers[l].weights.rows(); ++r)
                for (Eigen::Index c = 0; c < net.layers[l].weights.cols(); ++c) {
                    const double saved = net.layers[l].weights(r, c);
                    net.layers[l].weights(r, c) = saved + h;
                    const double up = cross_entropy_loss(net, points, labels);
                    net.layers[l].weights(r, c) = saved - h;
                    const double down = cross_entropy_loss(net, points, labels);
                    net.layers[l].weights(r, c) = saved;
                    const double numeric = (up - down) / (2.0 * h);
                    const double denom = std::max({std::abs(numeric), std::abs(analytic.d_weights[l](r, c)), 1e-8});
                    ACCEPT(std::abs(numeric - analytic.d_weights[l](r, c)) / denom <= 1e-4);
                    ++checked;
                }
            for (Eigen::Index r = 0; r < net.layers[l].bias.size(); ++r) {
                const double saved = net.layers[l].bias[r];
                net.layers[l].bias[r] = saved + h;
                const double up = cross_entropy_loss(net, points, labels);
                net.layers[l].bias[r] = saved - h;
                const double down = cross_entropy_loss(net, points, labels);
                net.layers[l].bias[r] = saved;
                const double numeric = (up - down) / (2.0 * h);
                const double denom = std::max({std::abs(numeric), std::abs(analytic.d_bias[l][r]), 1e-8});
                ACCEPT(std::abs(numeric - analytic.d_bias[l][r]) / denom <= 1e-4);
                ++checked;
            }
        }
    }
    detail = std::to_string(checked) + " parameters within 1e-4 of central differences";
}

void criterion_isomap_oracle(std::string& detail) {
    // planar circle in R^3
    const int n = 240;
    Eigen::MatrixXd plane(n, 2);
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * 3.14159265358979323846 * i / n;
        plane.row(i) = Eigen::RowVector2d(std::cos(t), std::sin(t));
    }
    Eigen::MatrixXd embed(2, 3);
    embed << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0,
        -1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), 2.0 / std::sqrt(6.0);
    const IsomapResult circle = isomap(plane * embed, 10, 2);
    ACCEPT(circle.residual_variance <= 0.05);

    // complete graph == classical MDS (independent full eigendecomposition)
    Rng rng(1009);
    Eigen::MatrixXd cloud(50, 3);
    for (Eigen::Index i = 0; i < cloud.rows(); ++i)
        for (Eigen::Index j = 0; j < 3; ++j) cloud(i, j) = rng.uniform(-1.0, 1.0);
    const IsomapResult via_isomap = isomap(cloud, static_cast<int>(cloud.rows()) - 1, 2);

    Eigen::MatrixXd dist(cloud.rows(), cloud.rows());
    for (Eigen::Index i = 0; i < cloud.rows(); ++i)
        for (Eigen::Index j = 0; j < cloud.rows(); ++j) dist(i, j) = (cloud.row(i) - cloud.row(j)).norm();
    const Eigen::MatrixXd d2 = dist.array().square();
    const Eigen::VectorXd row_mean = d2.rowwise().mean();
    const Eigen::MatrixXd b =
        -0.5 * (((d2.colwise() - row_mean).rowwise() - row_mean.transpose()).array() + d2.mean()).matrix();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
    Eigen::MatrixXd oracle(cloud.rows(), 2);
    for (int k = 0; k < 2; ++k)
        oracle.col(k) = solver.eigenvectors().col(cloud.rows() - 1 - k) *
                        std::sqrt(std::max(solver.eigenvalues()[cloud.rows() - 1 - k], 0.0));
    double worst = 0.0;
    for (Eigen::Index i = 0; i < cloud.rows(); ++i)
        for (Eigen::Index j = 0; j < cloud.rows(); ++j) {
            const double a = (via_isomap.coords.row(i) - via_isomap.coords.row(j)).norm();
            const double o = (oracle.row(i) - oracle.row(j)).norm();
            worst = std::max(worst, std::abs(a - o));
        }
    ACCEPT(worst <= 1e-8);
    detail = "circle residual " + format_double(circle.residual_variance) + "; MDS distance gap " +
             format_double(worst);
}

void criterion_determinism(std::string& detail) {
    const std::string config_text = experiment_json(
        "annulus", "", 150, 7,
        kAnnulusArch, 300, 0.01,
        R"({"isomap": {"enabled": true, "k_neighbors": 10, "target_dim": 2}, "components": {"enabled": true}})");
    const ExperimentConfig config = parse_config(config_text);
    const fs::path dir_a = scratch_dir("det_a");
    const fs::path dir_b = scratch_dir("det_b");
    run_experiment(config, dir_a.string());
    run_experiment(config, dir_b.string());

    std::map<std::string, fs::path> files_a;
    for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
        if (!entry.is_regular_file()) continue;
        const std::string rel = fs::relative(entry.path(), dir_a).generic_string();
        if (rel == "meta.json") continue;  // the only timestamped file
        files_a[rel] = entry.path();
    }
    long compared = 0;
    for (const auto& [rel, path_a] : files_a) {
        const fs::path path_b = dir_b / rel;
        ACCEPT(fs::exists(path_b));
        std::ifstream ia(path_a, std::ios::binary), ib(path_b, std::ios::binary);
        std::stringstream sa, sb;
        sa << ia.rdbuf();
        sb << ib.rdbuf();
        ACCEPT(sa.str() == sb.str());
        ++compared;
    }
    ACCEPT(compared >= 10);
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    detail = std::to_string(compared) + " files byte-identical (meta.json excluded)";
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "urysohn-exactness", criterion_urysohn_exactness},
        {2, "theorem5-kernel-collision", criterion_theorem5},
        {3, "voronoi-argmax-equivalence", criterion_voronoi_argmax},
        {4, "relu-move-taxonomy", criterion_relu_taxonomy},
        {5, "e1-annulus-quotienting", criterion_e1_annulus},
        {6, "e2-torus-component-merge", criterion_e2_torus},
        {7, "e4-linked-tori-separation", criterion_e4_linked_tori},
        {8, "gradient-integrity", criterion_gradient_integrity},
        {9, "isomap-oracle", criterion_isomap_oracle},
        {10, "run-determinism", criterion_determinism},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = true;
        std::string error;
        try {
            criterion.body(detail);
        } catch (const std::exception& e) {
            ok = false;
            error = e.what();
        }
        const double seconds =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start)
                .count() /
            1000.0;
        std::printf("[%s] C%-2d %-28s (%.1f s)%s%s\n", ok ? "PASS" : "FAIL", criterion.id, criterion.name.c_str(),
                    seconds, detail.empty() && error.empty() ? "" : " ",
                    ok ? detail.c_str() : error.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
