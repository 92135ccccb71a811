#include "toponet/dataset.hpp"
#include "toponet/embedding.hpp"
#include "toponet/shapes.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace toponet;

namespace {

ShapeSpec spec_of(ShapeKind kind, long ppc, std::uint64_t seed) {
    ShapeSpec spec;
    spec.kind = kind;
    spec.points_per_class = ppc;
    spec.seed = seed;
    return spec;
}

void check_membership_and_counts(const ShapeSpec& spec, const LabeledPointSet& data) {
    data.validate();
    REQUIRE(data.count() == spec.points_per_class * spec.num_classes());
    std::vector<long> per_class(static_cast<std::size_t>(spec.num_classes()), 0);
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        const int label = data.labels[static_cast<std::size_t>(i)];
        ++per_class[static_cast<std::size_t>(label)];
        CHECK(in_region(spec, label, data.points.row(i).transpose()));
    }
    for (long c : per_class) CHECK(c == spec.points_per_class);
}

}  // namespace

TEST_CASE("generate is deterministic for a fixed seed") {
    for (ShapeKind kind :
         {ShapeKind::Annulus2D, ShapeKind::Torus3D, ShapeKind::BallShell, ShapeKind::LinkedTori}) {
        const ShapeSpec spec = spec_of(kind, 40, 77);
        const LabeledPointSet a = generate(spec);
        const LabeledPointSet b = generate(spec);
        CHECK(test_support::bitwise_equal(a.points, b.points));
        CHECK(a.labels == b.labels);
        const LabeledPointSet c = generate(spec_of(kind, 40, 78));
        CHECK(!test_support::bitwise_equal(a.points, c.points));
    }
}

TEST_CASE("ball/shell norms match the counterexample regions") {
    const LabeledPointSet data = generate(spec_of(ShapeKind::BallShell, 500, 3));
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        const double r = data.points.row(i).norm();
        if (data.labels[static_cast<std::size_t>(i)] == 0)
            CHECK(r <= 0.9);
        else {
            CHECK(r >= 1.0);
            CHECK(r <= 2.0);
        }
    }
}

TEST_CASE("torus points satisfy the torus equation") {
    const ShapeSpec spec = spec_of(ShapeKind::Torus3D, 300, 11);
    const LabeledPointSet data = generate(spec);
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        const auto p = data.points.row(i);
        const double d = std::sqrt(p[0] * p[0] + p[1] * p[1]) - spec.major_radius;
        CHECK(std::abs(d * d + p[2] * p[2] - spec.minor_radius * spec.minor_radius) < 1e-9);
    }
}

TEST_CASE("torus class 0 occupies two angular bands separated from the others") {
    const ShapeSpec spec = spec_of(ShapeKind::Torus3D, 400, 5);
    const LabeledPointSet data = generate(spec);
    check_membership_and_counts(spec, data);
    CHECK(data.min_interclass_distance() > 0.0);

    // class 0 splits into two arcs of the major angle
    std::vector<double> angles;
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        if (data.labels[static_cast<std::size_t>(i)] != 0) continue;
        double phi = std::atan2(data.points(i, 1), data.points(i, 0));
        if (phi < 0) phi += 2.0 * 3.14159265358979323846;
        angles.push_back(phi);
    }
    long low_arc = 0, high_arc = 0;
    for (double phi : angles) {
        if (phi < 3.14159265358979323846 / 2.0) ++low_arc;
        if (phi > 3.14159265358979323846) ++high_arc;
    }
    CHECK(low_arc + high_arc == static_cast<long>(angles.size()));
    CHECK(low_arc == 200);
    CHECK(high_arc == 200);
}

TEST_CASE("linked tori: positive class gap and one epsilon-component per class") {
    // default sample density (2000/class): the documented epsilon bridges the
    // whole tube surface
    const ShapeSpec spec = spec_of(ShapeKind::LinkedTori, 2000, 21);
    const LabeledPointSet data = generate(spec);
    check_membership_and_counts(spec, data);

    // defaults: core circles are major_radius apart, tubes eat 2*minor
    CHECK(data.min_interclass_distance() > spec.major_radius - 2.0 * spec.minor_radius - 0.2);
    CHECK(data.min_interclass_distance() > 0.0);

    for (int c = 0; c < 2; ++c) {
        const Eigen::MatrixXd cloud = data.class_points(c);
        const double eps = default_component_epsilon(cloud);
        CHECK(epsilon_components(cloud, eps).count == 1);
    }
}

TEST_CASE("every kind satisfies the dataset invariants across random specs") {
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        ShapeSpec spec;
        const int pick = static_cast<int>(rng.index(4));
        spec.kind = static_cast<ShapeKind>(pick);
        spec.points_per_class = 10 + static_cast<long>(rng.index(40));
        spec.seed = rng.next_u64();
        spec.inner_radius = rng.uniform(0.2, 1.0);
        spec.outer_radius = spec.inner_radius + rng.uniform(0.5, 2.0);
        spec.band_gap = rng.uniform(0.01, 0.1);
        spec.minor_radius = rng.uniform(0.2, 0.6);
        spec.major_radius = 2.0 * spec.minor_radius + rng.uniform(0.5, 2.0);
        spec.arc_margin = rng.uniform(0.02, 0.3);
        spec.ambient_dim = 2 + static_cast<int>(rng.index(4));
        check_membership_and_counts(spec, generate(spec));
    }
}

TEST_CASE("degenerate specs are rejected with diagnostics") {
    ShapeSpec spec = spec_of(ShapeKind::Annulus2D, 0, 1);
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);

    spec = spec_of(ShapeKind::Annulus2D, 10, 1);
    spec.band_gap = 0.0;  // touching bands: class regions not disjoint
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);

    spec = spec_of(ShapeKind::BallShell, 10, 1);
    spec.ball_radius = 1.5;  // overlaps the shell
    CHECK_THROWS_WITH_AS(generate(spec), doctest::Contains("ball_radius"), std::invalid_argument);

    spec = spec_of(ShapeKind::LinkedTori, 10, 1);
    spec.minor_radius = 1.2;  // 2r >= R: tubes intersect
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);

    spec = spec_of(ShapeKind::Torus3D, 10, 1);
    spec.arc_margin = 1.0;  // arcs vanish
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("csv round trip is exact") {
    test_support::TempDir dir("dataset_csv");
    const LabeledPointSet data = generate(spec_of(ShapeKind::Annulus2D, 25, 123));
    const std::string path = (dir.path / "points.csv").string();
    save_dataset_csv(data, path, {"round trip check"});
    const LabeledPointSet loaded = load_dataset_csv(path);
    CHECK(test_support::bitwise_equal(loaded.points, data.points));
    CHECK(loaded.labels == data.labels);
    CHECK(loaded.num_classes == data.num_classes);
}

TEST_CASE("csv loader rejects malformed files") {
    test_support::TempDir dir("dataset_bad");
    const std::string path = (dir.path / "bad.csv").string();
    {
        std::ofstream out(path);
        out << "2,2,3\n0,0,0\n1,1,1\n";  // truncated
    }
    CHECK_THROWS_AS(load_dataset_csv(path), std::runtime_error);
    CHECK_THROWS_AS(load_dataset_csv((dir.path / "missing.csv").string()), std::runtime_error);
}
