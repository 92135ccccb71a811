#pragma once

#include "toponet/network.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace toponet {

/// SVD-based reading of a layer matrix: rank/scaling from the singular
/// values, reflection evidence from the determinant signs of the orthogonal
/// factors, quotienting evidence from the kernel basis.
struct LinearMoveReport {
    int rank = 0;
    Eigen::VectorXd singular_values;      // nonincreasing
    Eigen::MatrixXd null_basis;           // in_dim x (in_dim - rank), orthonormal columns
    int det_sign_u = 1;                   // sign of det of the left orthogonal factor
    int det_sign_v = 1;                   // sign of det of the right orthogonal factor
    bool is_full_rank = false;            // rank == min(rows, cols)
    double rank_tolerance = 0.0;          // max_dim * sigma_max * machine eps
    double reconstruction_error = 0.0;    // Frobenius-relative ||U S V^T - W||
};

/// Rank tolerance rule: max(rows, cols) * sigma_max * eps_scale.
LinearMoveReport decompose_linear(const Eigen::MatrixXd& w,
                                  double eps_scale = std::numeric_limits<double>::epsilon());

enum class ReluAction { IdentityAction, Bending, Quotienting };

std::string to_string(ReluAction a);

/// What clamping negatives to zero does to a finite cloud. Labels are
/// evidence on the sampled points only, with precedence
/// Quotienting > Bending > IdentityAction when behaviours co-occur.
struct ReluActionReport {
    ReluAction action = ReluAction::IdentityAction;
    std::int64_t collision_pair_count = 0;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> witness_pairs;  // at most 10 kept
    std::vector<int> orthant_census;  // per point: count of negative coordinates
    bool negatives_present = false;
};

ReluActionReport classify_relu_action(const Eigen::MatrixXd& cloud, double collision_tol = 1e-9);

/// Per-layer composite: linear part, translation norm, and (for Relu layers)
/// the clamping action on the affine image of that layer's input cloud.
struct MoveReport {
    int layer_index = 0;
    Activation activation = Activation::Relu;
    LinearMoveReport linear;
    double translation_norm = 0.0;
    bool has_relu_report = false;
    ReluActionReport relu;
};

MoveReport layer_move_summary(const Network& net, int layer_index, const ActivationTrace& trace);

/// All layers of a trace in order.
std::vector<MoveReport> move_reports(const Network& net, const ActivationTrace& trace);

}  // namespace toponet
