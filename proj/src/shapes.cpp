#include "toponet/shapes.hpp"

#include "toponet/rng.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace toponet {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kRegionTol = 1e-9;
// Sampled radii/angles are pulled this far inside their band so that the
// reconstructed norm can never cross the band edge after rounding.
constexpr double kEdgeShrink = 1e-12;

struct Band {
    double lo, hi;
};

// Three radial bands of equal width separated by band_gap; labels 0,1,0.
std::array<Band, 3> annulus_bands(const ShapeSpec& s) {
    const double w = (s.outer_radius - s.inner_radius - 2.0 * s.band_gap) / 3.0;
    return {Band{s.inner_radius, s.inner_radius + w},
            Band{s.inner_radius + w + s.band_gap, s.inner_radius + 2.0 * w + s.band_gap},
            Band{s.inner_radius + 2.0 * w + 2.0 * s.band_gap, s.outer_radius}};
}

// Four quarter arcs of the major angle shrunk by arc_margin; labels 0,1,0,2.
std::array<Band, 4> torus_arcs(const ShapeSpec& s) {
    std::array<Band, 4> arcs{};
    for (int i = 0; i < 4; ++i)
        arcs[static_cast<std::size_t>(i)] = {i * kPi / 2.0 + s.arc_margin, (i + 1) * kPi / 2.0 - s.arc_margin};
    return arcs;
}

constexpr std::array<int, 4> kTorusArcLabels = {0, 1, 0, 2};

Eigen::VectorXd unit_direction(Rng& rng, int dim) {
    Eigen::VectorXd v(dim);
    double n = 0.0;
    do {
        for (int i = 0; i < dim; ++i) v[i] = rng.normal();
        n = v.norm();
    } while (n < 1e-12);
    return v / n;
}

Eigen::Vector3d torus_point(double major, double minor, double phi, double psi) {
    const double ring = major + minor * std::cos(psi);
    return {ring * std::cos(phi), ring * std::sin(phi), minor * std::sin(psi)};
}

// Torus 1 of the linked pair: axis y, centered at (major, 0, 0).
Eigen::Vector3d linked_second_point(double major, double minor, double phi, double psi) {
    const double ring = major + minor * std::cos(psi);
    return {major + ring * std::cos(phi), minor * std::sin(psi), ring * std::sin(phi)};
}

double torus_residual(double major, double minor, const Eigen::Vector3d& p) {
    const double d = std::sqrt(p.x() * p.x() + p.y() * p.y()) - major;
    return std::abs(d * d + p.z() * p.z() - minor * minor);
}

double sample_in(Rng& rng, const Band& b) {
    const double pad = kEdgeShrink * std::max(1.0, std::max(std::abs(b.lo), std::abs(b.hi)));
    return rng.uniform(b.lo + pad, b.hi - pad);
}

double wrap_angle(double a) { return a < 0.0 ? a + kTwoPi : a; }

bool in_band(double v, const Band& b, double tol) { return v >= b.lo - tol && v <= b.hi + tol; }

}  // namespace

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Annulus2D: return "annulus";
        case ShapeKind::Torus3D: return "torus";
        case ShapeKind::BallShell: return "ball_shell";
        case ShapeKind::LinkedTori: return "linked_tori";
    }
    return "?";
}

ShapeKind shape_kind_from_string(const std::string& name) {
    if (name == "annulus") return ShapeKind::Annulus2D;
    if (name == "torus") return ShapeKind::Torus3D;
    if (name == "ball_shell") return ShapeKind::BallShell;
    if (name == "linked_tori") return ShapeKind::LinkedTori;
    throw std::invalid_argument("unknown shape kind: " + name);
}

void ShapeSpec::validate() const {
    if (points_per_class < 1) throw std::invalid_argument("ShapeSpec: points_per_class must be >= 1");
    if (area_uniform) throw std::invalid_argument("ShapeSpec: area_uniform sampling is not implemented yet");
    switch (kind) {
        case ShapeKind::Annulus2D: {
            if (inner_radius <= 0.0 || outer_radius <= inner_radius)
                throw std::invalid_argument("ShapeSpec(annulus): need 0 < inner_radius < outer_radius");
            if (band_gap <= 0.0)
                throw std::invalid_argument("ShapeSpec(annulus): band_gap must be > 0 or class regions overlap");
            if (annulus_bands(*this)[0].hi <= annulus_bands(*this)[0].lo)
                throw std::invalid_argument("ShapeSpec(annulus): band_gap too large, bands are empty");
            break;
        }
        case ShapeKind::Torus3D: {
            if (minor_radius <= 0.0 || major_radius <= minor_radius)
                throw std::invalid_argument("ShapeSpec(torus): need 0 < minor_radius < major_radius");
            if (arc_margin <= 0.0)
                throw std::invalid_argument("ShapeSpec(torus): arc_margin must be > 0 or class regions overlap");
            if (kPi / 2.0 - 2.0 * arc_margin <= 0.0)
                throw std::invalid_argument("ShapeSpec(torus): arc_margin too large, arcs are empty");
            break;
        }
        case ShapeKind::BallShell: {
            if (ambient_dim < 1) throw std::invalid_argument("ShapeSpec(ball_shell): ambient_dim must be >= 1");
            if (ball_radius <= 0.0) throw std::invalid_argument("ShapeSpec(ball_shell): ball_radius must be > 0");
            if (ball_radius >= shell_inner)
                throw std::invalid_argument("ShapeSpec(ball_shell): ball_radius must be < shell_inner, got " +
                                            format_double(ball_radius) + " >= " + format_double(shell_inner));
            if (shell_inner > shell_outer)
                throw std::invalid_argument("ShapeSpec(ball_shell): shell_inner must be <= shell_outer");
            break;
        }
        case ShapeKind::LinkedTori: {
            if (minor_radius <= 0.0) throw std::invalid_argument("ShapeSpec(linked_tori): minor_radius must be > 0");
            if (2.0 * minor_radius >= major_radius)
                throw std::invalid_argument(
                    "ShapeSpec(linked_tori): tori overlap; core circles are major_radius apart, need "
                    "2*minor_radius < major_radius");
            break;
        }
    }
}

bool in_region(const ShapeSpec& spec, int label, const Eigen::VectorXd& x) {
    if (label < 0 || label >= spec.num_classes()) return false;
    if (x.size() != spec.dim()) return false;
    switch (spec.kind) {
        case ShapeKind::Annulus2D: {
            const auto bands = annulus_bands(spec);
            const double r = x.norm();
            if (label == 0) return in_band(r, bands[0], kRegionTol) || in_band(r, bands[2], kRegionTol);
            return in_band(r, bands[1], kRegionTol);
        }
        case ShapeKind::Torus3D: {
            const Eigen::Vector3d p = x.head<3>();
            if (torus_residual(spec.major_radius, spec.minor_radius, p) > kRegionTol) return false;
            const double phi = wrap_angle(std::atan2(p.y(), p.x()));
            const auto arcs = torus_arcs(spec);
            for (int i = 0; i < 4; ++i)
                if (kTorusArcLabels[static_cast<std::size_t>(i)] == label &&
                    in_band(phi, arcs[static_cast<std::size_t>(i)], kRegionTol))
                    return true;
            return false;
        }
        case ShapeKind::BallShell: {
            const double r = x.norm();
            if (label == 0) return r <= spec.ball_radius + kRegionTol;
            return r >= spec.shell_inner - kRegionTol && r <= spec.shell_outer + kRegionTol;
        }
        case ShapeKind::LinkedTori: {
            Eigen::Vector3d p = x.head<3>();
            if (label == 1) {
                p.x() -= spec.major_radius;
                p = Eigen::Vector3d(p.x(), p.z(), p.y());  // back to the z-axis frame
            }
            return torus_residual(spec.major_radius, spec.minor_radius, p) <= kRegionTol;
        }
    }
    return false;
}

LabeledPointSet generate(const ShapeSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    const int n_classes = spec.num_classes();
    const long ppc = spec.points_per_class;
    LabeledPointSet data;
    data.num_classes = n_classes;
    data.shape_tag = to_string(spec.kind) + "/seed=" + std::to_string(spec.seed);
    data.points.resize(ppc * n_classes, spec.dim());
    data.labels.assign(static_cast<std::size_t>(ppc * n_classes), 0);

    long row = 0;
    auto emit = [&](int label, const Eigen::VectorXd& p) {
        data.points.row(row) = p;
        data.labels[static_cast<std::size_t>(row)] = label;
        ++row;
    };

    switch (spec.kind) {
        case ShapeKind::Annulus2D: {
            const auto bands = annulus_bands(spec);
            // class 0 splits between the inner and outer ring
            const std::array<std::array<Band, 2>, 2> rings_of = {{{bands[0], bands[2]}, {bands[1], bands[1]}}};
            for (int c = 0; c < 2; ++c)
                for (long i = 0; i < ppc; ++i) {
                    const Band& band = rings_of[static_cast<std::size_t>(c)][(c == 0 && i >= (ppc + 1) / 2) ? 1 : 0];
                    const double r = sample_in(rng, band);
                    const double theta = rng.uniform(0.0, kTwoPi);
                    emit(c, Eigen::Vector2d(r * std::cos(theta), r * std::sin(theta)));
                }
            break;
        }
        case ShapeKind::Torus3D: {
            const auto arcs = torus_arcs(spec);
            for (int c = 0; c < 3; ++c) {
                std::vector<Band> class_arcs;
                for (int i = 0; i < 4; ++i)
                    if (kTorusArcLabels[static_cast<std::size_t>(i)] == c)
                        class_arcs.push_back(arcs[static_cast<std::size_t>(i)]);
                for (long i = 0; i < ppc; ++i) {
                    const Band& arc =
                        class_arcs[(class_arcs.size() == 2 && i >= (ppc + 1) / 2) ? 1 : 0];
                    const double phi = sample_in(rng, arc);
                    const double psi = rng.uniform(0.0, kTwoPi);
                    emit(c, torus_point(spec.major_radius, spec.minor_radius, phi, psi));
                }
            }
            break;
        }
        case ShapeKind::BallShell: {
            for (int c = 0; c < 2; ++c)
                for (long i = 0; i < ppc; ++i) {
                    const Band band = c == 0 ? Band{0.0, spec.ball_radius} : Band{spec.shell_inner, spec.shell_outer};
                    const double r = sample_in(rng, band);
                    emit(c, r * unit_direction(rng, spec.ambient_dim));
                }
            break;
        }
        case ShapeKind::LinkedTori: {
            for (int c = 0; c < 2; ++c)
                for (long i = 0; i < ppc; ++i) {
                    const double phi = rng.uniform(0.0, kTwoPi);
                    const double psi = rng.uniform(0.0, kTwoPi);
                    emit(c, c == 0 ? torus_point(spec.major_radius, spec.minor_radius, phi, psi)
                                   : linked_second_point(spec.major_radius, spec.minor_radius, phi, psi));
                }
            break;
        }
    }

    for (Eigen::Index i = 0; i < data.count(); ++i)
        if (!in_region(spec, data.labels[static_cast<std::size_t>(i)], data.points.row(i).transpose()))
            throw std::logic_error("generate: sampled point escaped its region (internal bug)");
    data.validate();
    return data;
}

}  // namespace toponet
