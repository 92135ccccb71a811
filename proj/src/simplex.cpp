#include "toponet/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace toponet {

void SimplexPoint::validate() const {
    if (coords.size() < 2) throw std::invalid_argument("SimplexPoint: need n >= 2");
    if (!coords.allFinite()) throw std::invalid_argument("SimplexPoint: non-finite coordinates");
    if (coords.minCoeff() < -1e-12) throw std::invalid_argument("SimplexPoint: negative coordinate");
    if (std::abs(coords.sum() - 1.0) > 1e-9) throw std::invalid_argument("SimplexPoint: coordinates do not sum to 1");
}

SimplexPoint softmax_map(const Eigen::VectorXd& x) {
    SimplexPoint p{softmax(x)};
    p.validate();
    return p;
}

CellAssignment voronoi_cell_of(const SimplexPoint& p, double tie_tol) {
    p.validate();
    CellAssignment cell;
    Eigen::Index arg = 0;
    const double top = p.coords.maxCoeff(&arg);
    double runner_up = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < p.coords.size(); ++i)
        if (i != arg) runner_up = std::max(runner_up, p.coords[i]);
    cell.index = static_cast<int>(arg);
    cell.margin = top - runner_up;
    cell.tie = cell.margin < tie_tol;
    return cell;
}

SeparationVerdict separation_verdict_from_outputs(const Eigen::MatrixXd& outputs, const std::vector<int>& labels,
                                                  int num_classes, double tie_tol) {
    if (outputs.cols() != num_classes)
        throw std::invalid_argument("separation_verdict: output dim != num_classes");
    if (static_cast<std::size_t>(outputs.rows()) != labels.size())
        throw std::invalid_argument("separation_verdict: labels/outputs length mismatch");

    SeparationVerdict verdict;
    verdict.class_contained.assign(static_cast<std::size_t>(num_classes), true);
    long hits = 0;
    for (Eigen::Index i = 0; i < outputs.rows(); ++i) {
        const SimplexPoint p{outputs.row(i).transpose()};
        const CellAssignment cell = voronoi_cell_of(p, tie_tol);
        const int label = labels[static_cast<std::size_t>(i)];
        if (cell.tie) verdict.boundary_points.push_back(i);
        // strict interior containment: right cell and not on a boundary
        if (cell.tie || cell.index != label) verdict.class_contained[static_cast<std::size_t>(label)] = false;
        if (cell.index == label) ++hits;  // accuracy stays total; ties break to lowest index
    }
    verdict.separated = true;
    for (bool c : verdict.class_contained) verdict.separated = verdict.separated && c;
    verdict.accuracy = static_cast<double>(hits) / static_cast<double>(outputs.rows());
    return verdict;
}

SeparationVerdict separation_verdict(const Network& net, const LabeledPointSet& data, double tie_tol) {
    if (net.layers.back().activation != Activation::Softmax)
        throw std::invalid_argument("separation_verdict: network must end in softmax");
    if (net.output_dim() != data.num_classes)
        throw std::invalid_argument("separation_verdict: output dim != num_classes");
    if (net.input_dim() != data.dim()) throw std::invalid_argument("separation_verdict: input dim mismatch");

    Eigen::MatrixXd outputs(data.count(), net.output_dim());
    Eigen::MatrixXd cur = data.points;
    for (const auto& layer : net.layers) cur = apply_layer(layer, cur);
    outputs = cur;
    return separation_verdict_from_outputs(outputs, data.labels, data.num_classes, tie_tol);
}

}  // namespace toponet
