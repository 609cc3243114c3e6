#include <doctest.h>

#include "cousinlab/delaunay.hpp"
#include "test_surfaces.hpp"

using namespace cousinlab;

TEST_CASE("helicoid axes and rulings") {
    const double n = 0.9;
    cltest::Rng rng(61);
    for (int k = 0; k < 20; ++k) {
        const double y = rng.uniform(-0.25, 0.25);
        // First axis: h(0, y) = p(y) along the (-i)-Hopf circle through 1.
        const Quaterniond p(std::cos(n * y), -std::sin(n * y), 0, 0);
        CHECK(norm(helicoid_point(n, 0.0, y) - p) <= 1e-14);

        // Polar axis h(pi/2, y) = p(y) u(y), parametrized at speed 2 pi - n.
        const Quaterniond u(0, 0, std::cos(2 * M_PI * y), std::sin(2 * M_PI * y));
        CHECK(norm(helicoid_point(n, M_PI / 2.0, y) - p * u) <= 1e-14);
        const double d = 1e-6;
        const Quaterniond vel = (helicoid_point(n, M_PI / 2.0, y + d) -
                                 helicoid_point(n, M_PI / 2.0, y - d)) /
                                (2.0 * d);
        CHECK(norm(vel) == doctest::Approx(2.0 * M_PI - n).epsilon(1e-8));

        // The ruling tangent at the first axis is the position on the polar
        // axis: dh/dx(0, y) = h(pi/2, y).
        CHECK(norm(helicoid_dx(n, 0.0, y) - helicoid_point(n, M_PI / 2.0, y)) <= 1e-14);
        const Quaterniond fd = (helicoid_point(n, d, y) - helicoid_point(n, -d, y)) /
                               (2.0 * d);
        CHECK(norm(fd - helicoid_point(n, M_PI / 2.0, y)) <= 1e-10);
    }
}

TEST_CASE("helicoid grids are unit and carry clip metadata") {
    HelicoidParams p;
    p.n = M_PI / 3.0;
    p.nx = 33;
    p.ny = 17;
    const ImmersionGrid g = spherical_helicoid(p);
    CHECK_NOTHROW(g.validate_ambient());
    CHECK(g.edge(GridSide::YMin).symmetry_curve);
    CHECK(g.edge(GridSide::YMin).clip_offset == doctest::Approx(g.hy / 2.0));
    CHECK(g.edge(GridSide::YMax).clip_offset == doctest::Approx(g.hy / 2.0));

    CHECK_THROWS_AS(spherical_helicoid(HelicoidParams{0.0}), Error);
    HelicoidParams bad;
    bad.n = 2.0 * M_PI;
    CHECK_THROWS_AS(spherical_helicoid(bad), Error);
}

TEST_CASE("conformal helicoid chart is isothermal") {
    const ImmersionGrid g = helicoid_conformal_chart(M_PI / 2.0, 0.02);
    Eigen::ArrayXXd r1, r2;
    conformality_residual(g, r1, r2);
    const MetricField m = metric(g);
    double worst = 0.0;
    for (int i = 2; i + 2 < g.nx; ++i)
        for (int j = 2; j + 2 < g.ny; ++j)
            worst = std::max(worst, std::abs(r1(i, j)) / m.E(i, j));
    CHECK(worst <= 1e-3);
    CHECK(interior_max(r2) <= 1e-3);
    // Conformal factor normalized to at most 1.
    CHECK(m.E.maxCoeff() <= 1.0 + 1e-6);
}

TEST_CASE("profile oracle: cylinder, radii, force conservation, bulge position") {
    const UnduloidProfile cyl = unduloid_profile_oracle(M_PI, 257);
    for (const double r : cyl.r) CHECK(std::abs(r - 0.5) <= 1e-10);

    const double n = M_PI / 2.0;
    const UnduloidProfile p = unduloid_profile_oracle(n, 1025);
    CHECK(p.neck_radius == doctest::Approx(0.25));
    CHECK(p.bulge_radius == doctest::Approx(0.75));
    CHECK(p.r.front() == doctest::Approx(0.25).epsilon(1e-12));

    // The axial force is a first integral with value n (1 - n / 2 pi).
    const double expected = n * (1.0 - n / (2.0 * M_PI));
    double worst = 0.0;
    for (size_t k = 0; k < p.s.size(); ++k)
        worst = std::max(worst,
                         std::abs(UnduloidProfile::force(p.r[k], p.phi[k]) - expected));
    CHECK(worst <= 1e-8);

    // Meridian arclength from neck to bulge is pi/2: the radius peaks there.
    const size_t mid = p.s.size() / 2;
    CHECK(p.s[mid] == doctest::Approx(M_PI / 2.0));
    CHECK(p.r[mid] == doctest::Approx(p.bulge_radius).epsilon(1e-6));
    CHECK(std::abs(std::cos(p.phi[mid])) <= 1e-6); // r'(pi/2) = 0
    // Periodicity: back at the neck radius after a full period.
    CHECK(p.r.back() == doctest::Approx(p.neck_radius).epsilon(1e-8));

    CHECK_THROWS_AS(unduloid_profile_oracle(0.0), Error);
    CHECK_THROWS_AS(unduloid_profile_oracle(3.5), Error);
}

TEST_CASE("generated unduloid: circumferences, cylinder case, oracle match") {
    const double n = M_PI / 2.0;
    const CousinPair pair = generate_unduloid(n, 401, 201);
    const ParallelExtrema ext = measure_parallel_extrema(pair.f);
    CHECK(std::abs(ext.neck - n) <= 1e-3);
    CHECK(std::abs(ext.bulge - (2.0 * M_PI - n)) <= 1e-3);
    CHECK(measure_necksize(pair.f) == doctest::Approx(ext.neck));

    // Necksize pi: a half-cylinder of radius 1/2 around the i-axis.
    const CousinPair cyl = generate_unduloid(M_PI, 201, 101);
    double worst_r = 0.0;
    for (const auto& q : cyl.f.values) {
        const double r = std::hypot(q.y(), q.z());
        worst_r = std::max(worst_r, std::abs(r - 0.5));
    }
    CHECK(worst_r <= 1e-4);
    CHECK(measure_necksize(cyl.f) == doctest::Approx(M_PI).epsilon(1e-3));

    // Meridian through y = 0 lies in the ik-plane and matches the oracle
    // profile pointwise (x is the shared arclength parameter).  The profile
    // sample count puts its nodes exactly on the grid's x values.
    const int half_period = (pair.f.nx - 1) / 2;
    const UnduloidProfile prof = unduloid_profile_oracle(n, half_period + 1);
    const int j_mid = (pair.f.ny - 1) / 2;
    double worst = 0.0;
    for (int i = 0; i < pair.f.nx; ++i) {
        const size_t k = static_cast<size_t>(i % half_period);
        const double zz =
            prof.z[k] + prof.z.back() * static_cast<double>(i / half_period);
        const Quaterniond& q = pair.f.at(i, j_mid);
        worst = std::max(worst, std::abs(q.y()));
        worst = std::max(worst, std::abs(q.x() - zz));
        worst = std::max(worst, std::abs(q.z() - prof.r[k]));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("boundary Hopf points: lemma formula and distance = necksize") {
    const double n = M_PI / 2.0;
    const CousinPair pair = generate_unduloid(n, 401, 201);
    const auto pts = boundary_hopf_points(pair);
    CHECK(std::abs(sphere_distance(pts.first, pts.second) - n) <= 1e-4);

    // The bounding rulings project to k cos(n/2) -+ j sin(n/2).
    const Eigen::Vector3d plus(0.0, -std::sin(n / 2.0), std::cos(n / 2.0));
    const Eigen::Vector3d minus(0.0, std::sin(n / 2.0), std::cos(n / 2.0));
    const double d1 = std::min((pts.first.vec() - plus).norm(),
                               (pts.first.vec() - minus).norm());
    const double d2 = std::min((pts.second.vec() - plus).norm(),
                               (pts.second.vec() - minus).norm());
    CHECK(d1 <= 1e-4);
    CHECK(d2 <= 1e-4);
    CHECK((pts.first.vec() - pts.second.vec()).norm() > 0.1);

    cltest::Rng rng(62);
    for (int trial = 0; trial < 3; ++trial) {
        const double nn = rng.uniform(0.15 * M_PI, M_PI);
        const CousinPair pr = generate_unduloid(nn, 401, 201);
        const auto pp = boundary_hopf_points(pr);
        CHECK(std::abs(sphere_distance(pp.first, pp.second) - nn) <= 1e-4);
    }
}

TEST_CASE("necksize measurement requires an interior minimum") {
    const ImmersionGrid cone = cltest::cone_chart(41, 33);
    CHECK_THROWS_WITH_AS(measure_necksize(cone), doctest::Contains("interior minimum"),
                         Error);
}

TEST_CASE("necksize guard rejects the nodoid branch and the sphere limit") {
    CHECK_THROWS_AS(generate_unduloid(-0.5, 201, 101), Error);
    CHECK_THROWS_AS(generate_unduloid(0.0, 201, 101), Error);
    CHECK_THROWS_AS(generate_unduloid(M_PI + 0.2, 201, 101), Error);
}

TEST_CASE("cousin necksize equals the parameter across the family") {
    cltest::Rng rng(63);
    for (int trial = 0; trial < 3; ++trial) {
        const double n = rng.uniform(0.2 * M_PI, M_PI);
        const CousinPair pair = generate_unduloid(n, 401, 201);
        CHECK(std::abs(measure_necksize(pair.f) - n) <= 1e-3);
    }
}
