#pragma once

#include "toponet/dataset.hpp"

#include <cstdint>
#include <string>

namespace toponet {

enum class ShapeKind { Annulus2D, Torus3D, BallShell, LinkedTori };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

/// Parameterized sampler for one labeled manifold family.
///
/// Annulus2D: two classes in R^2. The radial range [inner_radius,
///   outer_radius] splits into three equal bands separated by band_gap;
///   inner and outer bands are class 0, the middle band is class 1
///   (two class-0 rings sandwiching a class-1 ring).
/// Torus3D: three classes on the torus (sqrt(x^2+y^2)-R)^2 + z^2 = r^2.
///   The major angle splits into four quarter arcs, each shrunk by
///   arc_margin radians on both ends; arcs carry labels 0,1,0,2 (class 0
///   appears in two arcs).
/// BallShell: class 0 is the solid ball ||x|| <= ball_radius in
///   R^ambient_dim, class 1 the shell shell_inner <= ||x|| <= shell_outer.
/// LinkedTori: two Hopf-linked torus surfaces in R^3; torus 0 around the
///   z-axis at the origin, torus 1 around the y-axis centered at
///   (major_radius, 0, 0). Core circles are exactly major_radius apart,
///   so the surfaces are disjoint iff 2*minor_radius < major_radius.
///
/// Sampling is uniform in parameter space (angles/radii), not surface-area
/// uniform; area_uniform is reserved for a future area-weighted mode and
/// must currently stay false.
struct ShapeSpec {
    ShapeKind kind = ShapeKind::Annulus2D;
    long points_per_class = 2000;
    std::uint64_t seed = 0;

    // Annulus2D
    double inner_radius = 0.5;
    double outer_radius = 2.0;
    double band_gap = 0.05;

    // Torus3D / LinkedTori
    double major_radius = 2.0;
    double minor_radius = 0.5;
    double arc_margin = 0.05;  // radians

    // BallShell
    int ambient_dim = 3;
    double ball_radius = 0.9;
    double shell_inner = 1.0;
    double shell_outer = 2.0;

    bool area_uniform = false;

    int num_classes() const { return kind == ShapeKind::Torus3D ? 3 : 2; }
    int dim() const { return kind == ShapeKind::Annulus2D ? 2 : (kind == ShapeKind::BallShell ? ambient_dim : 3); }

    /// Throws std::invalid_argument with a diagnostic if the parameters are
    /// degenerate or would make class regions overlap.
    void validate() const;
};

/// Deterministic sample of the spec'd shape: points_per_class points per
/// class, every point inside its class region, classes disjoint.
LabeledPointSet generate(const ShapeSpec& spec);

/// Region predicate for one class of the spec, with tolerance 1e-9 on the
/// defining equations. Every generated point satisfies its own predicate.
bool in_region(const ShapeSpec& spec, int label, const Eigen::VectorXd& x);

}  // namespace toponet
