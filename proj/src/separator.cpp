#include "toponet/separator.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace toponet {

double distance_to_set(const Eigen::VectorXd& x, const Eigen::MatrixXd& set) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < set.rows(); ++i)
        best = std::min(best, (set.row(i).transpose() - x).norm());
    return best;
}

namespace {

struct CrossPair {
    Eigen::Index i = -1, j = -1;
    double dist = std::numeric_limits<double>::infinity();
};

CrossPair closest_cross_pair(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    CrossPair best;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j) {
            const double d = (a.row(i) - b.row(j)).norm();
            if (d < best.dist) best = {i, j, d};
        }
    return best;
}

void require_nonempty_same_dim(const std::vector<Eigen::MatrixXd>& sets, const char* who) {
    if (sets.empty()) throw std::invalid_argument(std::string(who) + ": no point sets given");
    const Eigen::Index dim = sets.front().cols();
    for (const auto& s : sets) {
        if (s.rows() == 0) throw std::invalid_argument(std::string(who) + ": empty point set");
        if (s.cols() != dim) throw std::invalid_argument(std::string(who) + ": dimension mismatch");
    }
    if (dim < 1) throw std::invalid_argument(std::string(who) + ": dimension must be >= 1");
}

void require_disjoint(const std::vector<Eigen::MatrixXd>& sets, double tol, const char* who) {
    for (std::size_t a = 0; a < sets.size(); ++a)
        for (std::size_t b = a + 1; b < sets.size(); ++b) {
            const CrossPair p = closest_cross_pair(sets[a], sets[b]);
            if (p.dist <= tol)
                throw std::invalid_argument(std::string(who) + ": sets " + std::to_string(a) + " and " +
                                            std::to_string(b) + " collide at rows " + std::to_string(p.i) + "/" +
                                            std::to_string(p.j) + " (distance " + format_double(p.dist) + ")");
        }
}

}  // namespace

double ScalarField::operator()(const Eigen::VectorXd& x) const {
    if (x.size() != dim_) throw std::invalid_argument("ScalarField: input dimension mismatch");
    if (kind_ == Kind::Pair) {
        const double da = distance_to_set(x, sets_[0]);
        const double db = distance_to_set(x, sets_[1]);
        return da / (da + db);
    }
    const std::size_t n = sets_.size();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = distance_to_set(x, sets_[j]);
    // prefix[i] = min d over classes 1..i (1-based), suffix[i] = min over i..n
    std::vector<double> suffix(n + 1, std::numeric_limits<double>::infinity());
    for (std::size_t j = n; j-- > 0;) suffix[j] = std::min(suffix[j + 1], d[j]);
    double value = 1.0;
    double prefix = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < n; ++i) {  // term f_{i+1} in 1-based terms
        prefix = std::min(prefix, d[i - 1]);
        value += prefix / (prefix + suffix[i]);
    }
    return value;
}

Eigen::VectorXd ScalarField::evaluate(const Eigen::MatrixXd& points) const {
    Eigen::VectorXd out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = (*this)(points.row(i).transpose());
    return out;
}

ScalarField urysohn_pair(const Eigen::MatrixXd& set_a, const Eigen::MatrixXd& set_b, double collision_tol) {
    std::vector<Eigen::MatrixXd> sets{set_a, set_b};
    require_nonempty_same_dim(sets, "urysohn_pair");
    require_disjoint(sets, collision_tol, "urysohn_pair");
    return ScalarField(ScalarField::Kind::Pair, static_cast<int>(set_a.cols()), std::move(sets));
}

ScalarField urysohn_multiclass(const std::vector<Eigen::MatrixXd>& classes, double collision_tol) {
    require_nonempty_same_dim(classes, "urysohn_multiclass");
    require_disjoint(classes, collision_tol, "urysohn_multiclass");
    return ScalarField(ScalarField::Kind::Multiclass, static_cast<int>(classes.front().cols()), classes);
}

LiftedField::LiftedField(ScalarField field, int k) : field_(std::move(field)), k_(k) {
    if (k < 1) throw std::invalid_argument("lift_to_rk: k must be >= 1");
}

Eigen::VectorXd LiftedField::operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(k_);
    out[0] = field_(x);
    return out;
}

Eigen::MatrixXd LiftedField::evaluate(const Eigen::MatrixXd& points) const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.rows(), k_);
    out.col(0) = field_.evaluate(points);
    return out;
}

std::string to_string(SeparabilityStatus s) {
    switch (s) {
        case SeparabilityStatus::SeparableByConvexDiscs: return "separable_by_convex_discs";
        case SeparabilityStatus::Collision: return "collision";
        case SeparabilityStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

// Gilbert/Frank-Wolfe search for the minimum-norm point of conv(A - B),
// returning a candidate separating direction. The caller must verify the
// strict separation itself; the search result alone certifies nothing.
Eigen::VectorXd min_norm_direction(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int max_iters) {
    Eigen::VectorXd x = (a.row(0) - b.row(0)).transpose();
    double scale2 = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) scale2 = std::max(scale2, a.row(i).squaredNorm());
    for (Eigen::Index i = 0; i < b.rows(); ++i) scale2 = std::max(scale2, b.row(i).squaredNorm());
    const double gap_tol = 4.0 * scale2 * 1e-14 + 1e-300;

    for (int iter = 0; iter < max_iters; ++iter) {
        Eigen::Index ia = 0, ib = 0;
        (a * (-x)).maxCoeff(&ia);
        (b * x).maxCoeff(&ib);
        const Eigen::VectorXd s = (a.row(ia) - b.row(ib)).transpose();
        const double gap = x.dot(x - s);
        if (gap <= gap_tol) break;
        const Eigen::VectorXd d = s - x;
        const double dd = d.squaredNorm();
        if (dd <= 0.0) break;
        const double t = std::clamp(-x.dot(d) / dd, 0.0, 1.0);
        if (t <= 0.0) break;
        x += t * d;
    }
    return x;
}

// Strict verification: every point of a lands strictly below every point of
// b along the candidate normal.
bool verify_plane(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::VectorXd& normal,
                  SeparatingPlane& plane) {
    const double nn = normal.norm();
    if (!(nn > 0.0)) return false;
    const double hi_a = (a * normal).maxCoeff();
    const double lo_b = (b * normal).minCoeff();
    if (!(lo_b > hi_a)) return false;
    plane.normal = normal;
    plane.threshold = 0.5 * (hi_a + lo_b);
    plane.margin = (lo_b - hi_a) / nn;
    return true;
}

}  // namespace

SeparabilityVerdict disc_separability_check(const std::vector<Eigen::MatrixXd>& class_images, double collision_tol) {
    require_nonempty_same_dim(class_images, "disc_separability_check");
    SeparabilityVerdict verdict;

    for (std::size_t a = 0; a < class_images.size(); ++a)
        for (std::size_t b = a + 1; b < class_images.size(); ++b) {
            const CrossPair p = closest_cross_pair(class_images[a], class_images[b]);
            if (p.dist <= collision_tol) {
                verdict.status = SeparabilityStatus::Collision;
                verdict.collision_witness = {class_images[a].row(p.i).transpose(),
                                             class_images[b].row(p.j).transpose()};
                verdict.collision_classes = {static_cast<int>(a), static_cast<int>(b)};
                return verdict;
            }
        }

    bool all_separated = true;
    for (std::size_t a = 0; a < class_images.size() && all_separated; ++a)
        for (std::size_t b = a + 1; b < class_images.size() && all_separated; ++b) {
            // The search direction is the (approximate) shortest vector from
            // hull(b) to hull(a); points of a sit low along it.
            const Eigen::VectorXd dir = min_norm_direction(class_images[a], class_images[b], 2000);
            SeparatingPlane plane;
            plane.class_a = static_cast<int>(a);
            plane.class_b = static_cast<int>(b);
            if (verify_plane(class_images[a], class_images[b], -dir, plane))
                verdict.planes.push_back(plane);
            else
                all_separated = false;
        }

    if (all_separated) {
        verdict.status = SeparabilityStatus::SeparableByConvexDiscs;
        for (const auto& img : class_images)
            verdict.hulls.push_back({img.colwise().minCoeff().transpose(), img.colwise().maxCoeff().transpose()});
    } else {
        verdict.status = SeparabilityStatus::Inconclusive;
        verdict.planes.clear();
    }
    return verdict;
}

KernelCollisionWitness kernel_collision_witness(const Eigen::MatrixXd& w, double inner_radius, double shell_lo,
                                                double shell_hi) {
    if (w.rows() >= w.cols())
        throw std::invalid_argument("kernel_collision_witness: need a bottleneck matrix (rows < cols)");
    if (!w.allFinite()) throw std::invalid_argument("kernel_collision_witness: non-finite matrix");
    if (!(inner_radius > 0.0) || !(shell_lo > inner_radius) || !(shell_hi >= shell_lo))
        throw std::invalid_argument("kernel_collision_witness: need 0 < inner_radius < shell_lo <= shell_hi");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullV);
    Eigen::VectorXd v = svd.matrixV().col(w.cols() - 1);
    v /= v.norm();

    // 0.5 and 1.5 at the default ball/shell radii.
    const double s1 = inner_radius * (5.0 / 9.0);
    const double s2 = 0.5 * (shell_lo + shell_hi);
    KernelCollisionWitness out;
    out.null_direction = v;
    out.p1 = s1 * v;
    out.p2 = s2 * v;
    out.residual = (w * out.p1 - w * out.p2).norm();
    return out;
}

}  // namespace toponet
