#include "toponet/moves.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace toponet {

namespace {

int det_sign(const Eigen::MatrixXd& q) {
    // q is orthogonal up to rounding; the determinant is +-1
    return q.determinant() < 0.0 ? -1 : 1;
}

}  // namespace

LinearMoveReport decompose_linear(const Eigen::MatrixXd& w, double eps_scale) {
    if (!w.allFinite()) throw std::invalid_argument("decompose_linear: non-finite matrix");
    LinearMoveReport report;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullU | Eigen::ComputeFullV);
    report.singular_values = svd.singularValues();
    const double sigma_max = report.singular_values.size() > 0 ? report.singular_values[0] : 0.0;
    report.rank_tolerance = static_cast<double>(std::max(w.rows(), w.cols())) * sigma_max * eps_scale;
    report.rank = 0;
    for (Eigen::Index i = 0; i < report.singular_values.size(); ++i)
        if (report.singular_values[i] > report.rank_tolerance) ++report.rank;
    report.is_full_rank = report.rank == std::min(w.rows(), w.cols());
    report.null_basis = svd.matrixV().rightCols(w.cols() - report.rank);
    report.det_sign_u = det_sign(svd.matrixU());
    report.det_sign_v = det_sign(svd.matrixV());

    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < report.singular_values.size(); ++i) sigma(i, i) = report.singular_values[i];
    const double denom = std::max(w.norm(), 1e-300);
    report.reconstruction_error = (svd.matrixU() * sigma * svd.matrixV().transpose() - w).norm() / denom;
    return report;
}

std::string to_string(ReluAction a) {
    switch (a) {
        case ReluAction::IdentityAction: return "identity";
        case ReluAction::Bending: return "bending";
        case ReluAction::Quotienting: return "quotienting";
    }
    return "?";
}

ReluActionReport classify_relu_action(const Eigen::MatrixXd& cloud, double collision_tol) {
    if (cloud.rows() == 0) throw std::invalid_argument("classify_relu_action: empty cloud");
    ReluActionReport report;

    report.orthant_census.reserve(static_cast<std::size_t>(cloud.rows()));
    for (Eigen::Index i = 0; i < cloud.rows(); ++i) {
        const int negatives = static_cast<int>((cloud.row(i).array() < 0.0).count());
        report.orthant_census.push_back(negatives);
        if (negatives > 0) report.negatives_present = true;
    }

    const Eigen::MatrixXd clamped = cloud.cwiseMax(0.0);
    for (Eigen::Index i = 0; i < cloud.rows(); ++i)
        for (Eigen::Index j = i + 1; j < cloud.rows(); ++j) {
            if ((clamped.row(i) - clamped.row(j)).norm() > collision_tol) continue;
            if ((cloud.row(i) - cloud.row(j)).norm() <= collision_tol) continue;  // duplicates, not a collapse
            ++report.collision_pair_count;
            if (report.witness_pairs.size() < 10) report.witness_pairs.emplace_back(i, j);
        }

    if (report.collision_pair_count > 0)
        report.action = ReluAction::Quotienting;
    else if (report.negatives_present)
        report.action = ReluAction::Bending;
    else
        report.action = ReluAction::IdentityAction;
    return report;
}

MoveReport layer_move_summary(const Network& net, int layer_index, const ActivationTrace& trace) {
    if (layer_index < 0 || layer_index >= net.depth())
        throw std::invalid_argument("layer_move_summary: layer index out of range");
    if (trace.depth() != net.depth())
        throw std::invalid_argument("layer_move_summary: trace depth does not match network");
    const auto& layer = net.layers[static_cast<std::size_t>(layer_index)];
    const auto& input_cloud = trace.clouds[static_cast<std::size_t>(layer_index)];
    if (input_cloud.cols() != layer.weights.cols())
        throw std::invalid_argument("layer_move_summary: trace/net dimension mismatch");

    MoveReport report;
    report.layer_index = layer_index;
    report.activation = layer.activation;
    report.linear = decompose_linear(layer.weights);
    report.translation_norm = layer.bias.norm();
    if (layer.activation == Activation::Relu) {
        report.has_relu_report = true;
        report.relu = classify_relu_action(trace.preactivations[static_cast<std::size_t>(layer_index)]);
    }
    return report;
}

std::vector<MoveReport> move_reports(const Network& net, const ActivationTrace& trace) {
    std::vector<MoveReport> reports;
    reports.reserve(static_cast<std::size_t>(net.depth()));
    for (int l = 0; l < net.depth(); ++l) reports.push_back(layer_move_summary(net, l, trace));
    return reports;
}

}  // namespace toponet
