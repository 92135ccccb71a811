#pragma once

#include "toponet/dataset.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace toponet {

/// Closed-form separating function built from stored reference point sets.
///
/// Pair form (Urysohn): f(x) = d(x,A) / (d(x,A) + d(x,B)), valued 0 on A and
/// 1 on B, total on R^d because A and B are disjoint finite sets.
/// Multiclass form (sum of pair terms): f = 1 + sum_{i=2..n} f_i with
/// f_i = pair(A_1 u ... u A_{i-1}, A_i u ... u A_n), so f(A_j) = j exactly.
class ScalarField {
public:
    enum class Kind { Pair, Multiclass };

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::vector<Eigen::MatrixXd>& class_sets() const { return sets_; }

    double operator()(const Eigen::VectorXd& x) const;

    /// Row-wise evaluation, one value per point.
    Eigen::VectorXd evaluate(const Eigen::MatrixXd& points) const;

private:
    friend ScalarField urysohn_pair(const Eigen::MatrixXd&, const Eigen::MatrixXd&, double);
    friend ScalarField urysohn_multiclass(const std::vector<Eigen::MatrixXd>&, double);
    ScalarField(Kind kind, int dim, std::vector<Eigen::MatrixXd> sets)
        : kind_(kind), dim_(dim), sets_(std::move(sets)) {}

    Kind kind_;
    int dim_;
    std::vector<Eigen::MatrixXd> sets_;
};

/// Urysohn separator for two disjoint point sets (rows = points).
/// Throws std::invalid_argument naming a colliding pair if the sets touch
/// within collision_tol.
ScalarField urysohn_pair(const Eigen::MatrixXd& set_a, const Eigen::MatrixXd& set_b,
                         double collision_tol = 1e-12);

/// n-class separator valued exactly j on the j-th class (1-based, per the
/// construction above). Classes must be pairwise disjoint.
ScalarField urysohn_multiclass(const std::vector<Eigen::MatrixXd>& classes, double collision_tol = 1e-12);

/// F(x) = (f(x), 0, ..., 0) in R^k; class images land at distinct integer
/// offsets on the first axis, hence in disjoint axis-aligned boxes.
class LiftedField {
public:
    LiftedField(ScalarField field, int k);
    int codomain_dim() const { return k_; }
    const ScalarField& scalar() const { return field_; }
    Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd evaluate(const Eigen::MatrixXd& points) const;

private:
    ScalarField field_;
    int k_;
};

inline LiftedField lift_to_rk(ScalarField field, int k) { return LiftedField(std::move(field), k); }

enum class SeparabilityStatus { SeparableByConvexDiscs, Collision, Inconclusive };

std::string to_string(SeparabilityStatus s);

/// One verified separating hyperplane between a pair of class hulls.
struct SeparatingPlane {
    int class_a = 0, class_b = 0;
    Eigen::VectorXd normal;  // max_a <n,a> < min_b <n,b> was checked explicitly
    double threshold = 0.0;  // midpoint value of <n,.>
    double margin = 0.0;     // (min_b - max_a) / ||n||
};

/// Axis-aligned bound of one class image (the convex surrogate reported for
/// a separable verdict).
struct ClassHullBox {
    Eigen::VectorXd lower, upper;
};

struct SeparabilityVerdict {
    SeparabilityStatus status = SeparabilityStatus::Inconclusive;
    // Collision: the offending cross-class pair.
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> collision_witness;
    std::pair<int, int> collision_classes{-1, -1};
    // SeparableByConvexDiscs: certified planes for every class pair + boxes.
    std::vector<SeparatingPlane> planes;
    std::vector<ClassHullBox> hulls;
};

/// Sufficient-certificate check of Definition-1 style separability on finite
/// class images: SeparableByConvexDiscs only when every pair of convex hulls
/// is strictly separated by an explicitly verified hyperplane, Collision when
/// two points of different classes coincide within collision_tol,
/// Inconclusive otherwise.
SeparabilityVerdict disc_separability_check(const std::vector<Eigen::MatrixXd>& class_images,
                                            double collision_tol = 1e-9);

/// Theorem-5 witness: a unit kernel vector v of W (k < n) scaled to
/// p1 = 0.5 v (inside the ball of radius inner_radius) and p2 = 1.5 v
/// (inside the shell), so W p1 = W p2 up to SVD residual.
struct KernelCollisionWitness {
    Eigen::VectorXd p1, p2;
    Eigen::VectorXd null_direction;
    double residual = 0.0;  // ||W (p1 - p2)||
};

KernelCollisionWitness kernel_collision_witness(const Eigen::MatrixXd& w, double inner_radius = 0.9,
                                                double shell_lo = 1.0, double shell_hi = 2.0);

/// min over rows of ||x - row||.
double distance_to_set(const Eigen::VectorXd& x, const Eigen::MatrixXd& set);

}  // namespace toponet
