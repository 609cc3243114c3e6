#include <doctest.h>

#include "cousinlab/quaternion.hpp"
#include "test_surfaces.hpp"

using namespace cousinlab;

namespace {
const Quaterniond qi(0, 1, 0, 0), qj(0, 0, 1, 0), qk(0, 0, 0, 1);
}

TEST_CASE("defining relations of the quaternion algebra") {
    CHECK(norm(qi * qj - qk) == doctest::Approx(0.0));
    CHECK(norm(qj * qk - qi) == doctest::Approx(0.0));
    CHECK(norm(qk * qi - qj) == doctest::Approx(0.0));

    // For imaginary p = q = i the real part is -<i, i> = -1, cross part 0.
    const Quaterniond ii = qi * qi;
    CHECK(ii.w == doctest::Approx(-1.0));
    CHECK(ii.v.norm() == doctest::Approx(0.0));
}

TEST_CASE("product of unit quaternions stays unit") {
    cltest::Rng rng(11);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
        const Quaterniond p = rng.unit_quat(), q = rng.unit_quat();
        worst = std::max(worst, std::abs(norm(p * q) - 1.0));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("imaginary product splits into inner and cross product") {
    cltest::Rng rng(12);
    for (int k = 0; k < 1000; ++k) {
        const Quaterniond p = rng.imaginary_quat(), q = rng.imaginary_quat();
        const Quaterniond pq = p * q;
        CHECK(std::abs(pq.w + p.v.dot(q.v)) <= 1e-12 * (1.0 + p.v.norm() * q.v.norm()));
        CHECK((pq.v - p.v.cross(q.v)).norm() <= 1e-12 * (1.0 + p.v.norm() * q.v.norm()));
    }
}

TEST_CASE("associativity and distributivity") {
    cltest::Rng rng(13);
    for (int k = 0; k < 200; ++k) {
        const Quaterniond a = rng.unit_quat(), b = rng.unit_quat(), c = rng.unit_quat();
        CHECK(norm((a * b) * c - a * (b * c)) <= 1e-14);
        CHECK(norm(a * (b + c) - (a * b + a * c)) <= 1e-14);
    }
}

TEST_CASE("exp and log are mutually inverse on short arcs") {
    cltest::Rng rng(14);
    for (int k = 0; k < 500; ++k) {
        const Eigen::Vector3d v = rng.unit_vec3() * rng.uniform(1e-8, 3.0);
        const Quaterniond q = exp_imaginary<double>(v);
        CHECK(std::abs(norm(q) - 1.0) <= 1e-14);
        CHECK((log_unit(q).v - v).norm() <= 1e-12 * (1.0 + v.norm()));
    }
    CHECK(norm(exp_imaginary<double>(Eigen::Vector3d::Zero()) -
               Quaterniond::identity()) == doctest::Approx(0.0));
}

TEST_CASE("commutator of imaginary quaternions is twice the cross product") {
    cltest::Rng rng(15);
    for (int k = 0; k < 200; ++k) {
        const Quaterniond p = rng.imaginary_quat(), q = rng.imaginary_quat();
        const Quaterniond direct = p * q - q * p;
        CHECK(norm(commutator(p, q) - direct) <= 1e-13);
    }
}

TEST_CASE("unit validation rejects off-sphere values") {
    CHECK_THROWS_AS(UnitQuaternion(Quaterniond(1.0 + 1e-6, 0, 0, 0)), Error);
    CHECK_NOTHROW(UnitQuaternion(Quaterniond(1.0, 0, 0, 0)));
    CHECK_THROWS_AS(SpherePoint(Quaterniond(1e-6, 1, 0, 0)), Error);
    CHECK_THROWS_AS(SpherePoint(Eigen::Vector3d(0.5, 0, 0)), Error);
}

TEST_CASE("sphere distance stays accurate near 0 and pi") {
    const Eigen::Vector3d u(0, 0, 1);
    const double eps = 1e-9;
    const Eigen::Vector3d near_u(std::sin(eps), 0, std::cos(eps));
    CHECK(sphere_distance(u, near_u) == doctest::Approx(eps).epsilon(1e-6));
    const Eigen::Vector3d near_anti(std::sin(eps), 0, -std::cos(eps));
    CHECK(sphere_distance(u, near_anti) == doctest::Approx(M_PI - eps).epsilon(1e-12));
}
