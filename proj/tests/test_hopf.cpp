#include <doctest.h>

#include "cousinlab/hopf.hpp"
#include "test_surfaces.hpp"

using namespace cousinlab;

namespace {

// Circumcircle axis of three well-separated samples; oracle for the
// foreign-circle law, independent of the projection formulas.
Eigen::Vector3d circle_axis(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                            const Eigen::Vector3d& c) {
    const Eigen::Vector3d n = (b - a).cross(c - a);
    REQUIRE(n.norm() > 1e-12);
    return n.normalized();
}

} // namespace

TEST_CASE("projection by the identity fixes the direction") {
    const SpherePoint k(Eigen::Vector3d(0, 0, 1));
    const SpherePoint img = hopf_project(k, UnitQuaternion::one());
    CHECK((img.vec() - Eigen::Vector3d(0, 0, 1)).norm() <= 1e-15);
}

TEST_CASE("projection rejects non-unit input") {
    const SpherePoint k(Eigen::Vector3d(0, 0, 1));
    CHECK_THROWS_AS(UnitQuaternion(Quaterniond(1.0 + 1e-6, 0, 0, 0)), Error);
    // Raw constructor guard is the only path to a bad projection input.
    CHECK_NOTHROW(hopf_project(k, UnitQuaternion(Quaterniond(1, 0, 0, 0))));
}

TEST_CASE("flow along the fiber leaves the projection fixed") {
    cltest::Rng rng(21);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SpherePoint u(rng.unit_vec3());
        const UnitQuaternion p(rng.unit_quat());
        const double t = rng.uniform(-10.0, 10.0);
        const SpherePoint a = hopf_project(u, p);
        const SpherePoint b = hopf_project(u, hopf_flow(u, p, t));
        worst = std::max(worst, (a.vec() - b.vec()).norm());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("flow basics: identity at t = 0, quarter turn, period") {
    const SpherePoint k(Eigen::Vector3d(0, 0, 1));
    const UnitQuaternion one = UnitQuaternion::one();
    CHECK(norm(hopf_flow(k, one, 0.0).value() - one.value()) <= 1e-15);
    CHECK(norm(hopf_flow(k, one, M_PI / 2.0).value() - Quaterniond(0, 0, 0, 1)) <= 1e-15);
    cltest::Rng rng(22);
    const UnitQuaternion p(rng.unit_quat());
    CHECK(norm(hopf_flow(k, p, 2.0 * M_PI).value() - (-1.0) * p.value()) >= 1.0);
    CHECK(norm(hopf_flow(k, p, 2.0 * M_PI).value() - p.value()) <= 1e-12);
}

TEST_CASE("projection is equivariant under conjugation rotations") {
    // Rotating S^3 by conjugation with a (which fixes 1 and preserves S^2)
    // rotates the projection: Pi_{a u a^-1}(a p a^-1) = a Pi_u(p) a^-1.
    cltest::Rng rng(23);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Quaterniond a = rng.unit_quat();
        const SpherePoint u(rng.unit_vec3());
        const UnitQuaternion p(rng.unit_quat());
        const SpherePoint rotated_u(rotate_by(a, u.value()).v);
        const UnitQuaternion rotated_p(rotate_by(a, p.value()));
        const Quaterniond lhs = hopf_project(rotated_u, rotated_p).value();
        const Quaterniond rhs = rotate_by(a, hopf_project(u, p).value());
        worst = std::max(worst, norm(lhs - rhs));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("projection intertwines left translation with rotation") {
    // Pi_u(a p) = a Pi_u(p) a^-1: a gauge change of the cousin rotates the
    // classifying points.
    cltest::Rng rng(27);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Quaterniond a = rng.unit_quat();
        const SpherePoint u(rng.unit_vec3());
        const UnitQuaternion p(rng.unit_quat());
        const Quaterniond lhs = hopf_project(u, UnitQuaternion(a * p.value())).value();
        const Quaterniond rhs = rotate_by(a, hopf_project(u, p).value());
        worst = std::max(worst, norm(lhs - rhs));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("projecting the fiber's own circle gives a single point") {
    cltest::Rng rng(24);
    const SpherePoint u(rng.unit_vec3());
    const UnitQuaternion p(rng.unit_quat());
    const auto pts = project_foreign_circle(u, u, p, 64);
    const Eigen::Vector3d ref = pts[0].vec();
    for (const auto& q : pts) CHECK((q.vec() - ref).norm() <= 1e-12);
}

TEST_CASE("foreign circle law: radius theta, speed 2 sin theta, double cover") {
    cltest::Rng rng(25);
    for (int trial = 0; trial < 50; ++trial) {
        const SpherePoint u(rng.unit_vec3());
        SpherePoint v(rng.unit_vec3());
        double theta = sphere_distance(u, v);
        if (theta < 0.15 || theta > M_PI - 0.15) {
            continue; // radius oracle needs a nondegenerate circumcircle
        }
        const UnitQuaternion p(rng.unit_quat());

        const int m = 64;
        const auto pts = project_foreign_circle(u, v, p, m);

        // Radius: every sample at the same distance from the circumcircle
        // axis of three spread-out samples.
        const Eigen::Vector3d axis =
            circle_axis(pts[0].vec(), pts[m / 5].vec(), pts[2 * m / 5].vec());
        const double d0 = sphere_distance(axis, pts[0].vec());
        double worst_radius = 0.0;
        for (const auto& q : pts)
            worst_radius = std::max(worst_radius,
                                    std::abs(sphere_distance(axis, q.vec()) - d0));
        CHECK(worst_radius <= 1e-10);
        const bool radius_matches = std::abs(d0 - theta) <= 1e-10 ||
                                    std::abs((M_PI - d0) - theta) <= 1e-10;
        CHECK(radius_matches);

        // Speed via a fourth-order stencil in the flow parameter.
        const auto gamma = [&](double t) {
            return hopf_project(u, hopf_flow(v, p, t)).vec();
        };
        const double t0 = rng.uniform(0.0, 2.0 * M_PI), d = 1e-3;
        const Eigen::Vector3d der =
            (gamma(t0 - 2 * d) - 8.0 * gamma(t0 - d) + 8.0 * gamma(t0 + d) -
             gamma(t0 + 2 * d)) /
            (12.0 * d);
        CHECK(std::abs(der.norm() - 2.0 * std::sin(theta)) <= 1e-10);

        // Double cover: t and t + pi land on the same point.
        const double t1 = rng.uniform(0.0, M_PI);
        CHECK((gamma(t1) - gamma(t1 + M_PI)).norm() <= 1e-12);
    }
}

TEST_CASE("orthogonal directions project to a great circle at speed 2") {
    const SpherePoint u(Eigen::Vector3d(0, 0, 1));
    const SpherePoint v(Eigen::Vector3d(1, 0, 0));
    cltest::Rng rng(26);
    const UnitQuaternion p(rng.unit_quat());
    const auto pts = project_foreign_circle(u, v, p, 128);
    const Eigen::Vector3d axis =
        circle_axis(pts[0].vec(), pts[25].vec(), pts[51].vec());
    for (const auto& q : pts)
        CHECK(std::abs(sphere_distance(axis, q.vec()) - M_PI / 2.0) <= 1e-10);
}
