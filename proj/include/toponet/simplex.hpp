#pragma once

#include "toponet/dataset.hpp"
#include "toponet/network.hpp"

#include <Eigen/Dense>

#include <vector>

namespace toponet {

/// Point of the standard simplex: nonnegative coordinates summing to 1
/// (sum tolerance 1e-9, coordinate floor -1e-12).
struct SimplexPoint {
    Eigen::VectorXd coords;

    int n() const { return static_cast<int>(coords.size()); }
    void validate() const;  // throws std::invalid_argument
};

/// softmax as D o Exp, max-shifted; lands strictly inside the simplex.
SimplexPoint softmax_map(const Eigen::VectorXd& x);

/// Vertex Voronoi cell assignment. On the simplex the Euclidean-nearest
/// vertex is the coordinate argmax (||p - v_i||^2 = ||p||^2 - 2 p_i + 1),
/// so the cell index is the argmax; a tie is flagged when the top two
/// coordinates are within tie_tol.
struct CellAssignment {
    int index = 0;  // argmax coordinate (lowest index on exact ties)
    bool tie = false;
    double margin = 0.0;  // top coordinate minus runner-up
};

CellAssignment voronoi_cell_of(const SimplexPoint& p, double tie_tol = 1e-9);

/// Containment check of the final separation theorem: class i must land
/// strictly inside the Voronoi cell of vertex v_i.
struct SeparationVerdict {
    std::vector<bool> class_contained;   // per class
    bool separated = false;              // conjunction
    double accuracy = 0.0;               // argmax vs label, ties to lowest index
    std::vector<Eigen::Index> boundary_points;  // points within tie_tol of a cell boundary
};

SeparationVerdict separation_verdict(const Network& net, const LabeledPointSet& data, double tie_tol = 1e-9);

/// Same verdict computed from an already-traced final cloud (rows on the
/// simplex, one label per row).
SeparationVerdict separation_verdict_from_outputs(const Eigen::MatrixXd& outputs, const std::vector<int>& labels,
                                                  int num_classes, double tie_tol = 1e-9);

}  // namespace toponet
