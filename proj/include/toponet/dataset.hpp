#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace toponet {

/// Finite labeled sample: points in R^d (one per row) with class labels.
struct LabeledPointSet {
    Eigen::MatrixXd points;   // count x dim
    std::vector<int> labels;  // size == count, values in [0, num_classes)
    int num_classes = 0;
    std::string shape_tag;

    Eigen::Index count() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }

    /// Row indices of one class, in point order.
    std::vector<Eigen::Index> class_indices(int label) const;

    /// Points of one class as a dense block.
    Eigen::MatrixXd class_points(int label) const;

    /// Smallest distance between two points with different labels.
    double min_interclass_distance() const;

    /// Throws std::invalid_argument if any structural invariant is broken:
    /// label range, every class nonempty, dim >= 1, classes disjoint.
    void validate() const;
};

/// Columnar text format. Header line: dim,n_classes,count. Then one row per
/// point: x_1,...,x_d,label. Lines starting with '#' are ignored on read and
/// used for provenance on some exports. Doubles are written round-trip exact.
void save_dataset_csv(const LabeledPointSet& data, const std::string& path,
                      const std::vector<std::string>& provenance = {});

/// validate=false skips the structural checks; trace exports reuse this
/// format but a quotiented cloud may legitimately have colliding classes.
LabeledPointSet load_dataset_csv(const std::string& path, bool validate = true);

/// Round-trip exact formatting used by all text exports.
std::string format_double(double v);

}  // namespace toponet
