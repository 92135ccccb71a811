#pragma once

#include <Eigen/Dense>

#include <vector>

namespace toponet {

/// Shortest-path lengths over the symmetrized k-NN graph of a cloud.
struct GeodesicDistances {
    Eigen::MatrixXd dist;  // symmetric, zero diagonal
    bool connected = true;
};

/// Throws std::runtime_error naming the component sizes if the k-NN graph is
/// disconnected (no silent largest-component fallback).
GeodesicDistances geodesic_distances(const Eigen::MatrixXd& cloud, int k_neighbors);

struct IsomapResult {
    Eigen::MatrixXd coords;       // n x target_dim, column-centered
    Eigen::VectorXd eigenvalues;  // top target_dim of the centered Gram matrix,
                                  // nonincreasing, negatives reported raw
    double residual_variance = 0.0;  // 1 - corr^2(geodesic, embedded) over pairs
};

/// Isomap: symmetrized k-NN graph -> all-pairs shortest paths -> classical
/// MDS. The MDS eigenpairs come from shifted power iteration with deflation
/// (tolerance 1e-10), so only the top target_dim pairs of the n x n Gram
/// matrix are ever formed.
IsomapResult isomap(const Eigen::MatrixXd& cloud, int k_neighbors, int target_dim);

/// Classical MDS of an explicit distance matrix (same eigensolver).
IsomapResult classical_mds(const Eigen::MatrixXd& dist, int target_dim);

/// Single-link components of the graph joining points at distance <= eps.
struct ComponentAssignment {
    std::vector<int> component_of;  // per point, ids contiguous from 0 in first-seen order
    int count = 0;
    double eps = 0.0;
};

ComponentAssignment epsilon_components(const Eigen::MatrixXd& cloud, double eps);

/// Documented default scale for component tracking: 1.5 x the largest
/// nearest-neighbour distance of the cloud, so every point reaches its
/// nearest neighbour with margin while gaps well beyond the sampling
/// resolution stay split.
double default_component_epsilon(const Eigen::MatrixXd& cloud);

/// Resolution floor applied to softmax-output clouds when counting
/// components: 1% of the simplex diameter. A saturated net collapses each
/// class toward its vertex, and sub-resolution dust below this scale is
/// treated as identified.
inline constexpr double kSimplexComponentFloor = 0.014142135623730951;

}  // namespace toponet
