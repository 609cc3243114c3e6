// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails.  Every tolerance is pinned here in code.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cousinlab/cousin.hpp"
#include "cousinlab/delaunay.hpp"
#include "cousinlab/devmap.hpp"
#include "cousinlab/moduli.hpp"
#include "test_surfaces.hpp"

using namespace cousinlab;

namespace {

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
    return buf;
}

double elapsed_s(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1
bool helicoid_minimality(std::string& detail) {
    bool ok = true;
    for (const double n : {M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 4.0, M_PI}) {
        const auto t0 = std::chrono::steady_clock::now();
        Tolerances lax;
        lax.tau_conf = 0.1; // the coarse refinement grids carry h^2 metric noise
        std::vector<double> hs, errs;
        for (const double h : {0.02, 0.01, 0.005}) {
            const ImmersionGrid g = helicoid_conformal_chart(n, h);
            hs.push_back(h);
            errs.push_back(interior_max(minimal_residual_s3(g, lax)));
        }
        const double slope = cltest::loglog_slope(hs, errs);
        const double secs = elapsed_s(t0);
        detail += fmt("  n=%.4f: residual %.3e (<=1e-4), slope %.2f (>=1.9)", n, errs.back(),
                      slope);
        detail += fmt(", %.1f s (<10)\n", secs);
        ok = ok && errs.back() <= 1e-4 && slope >= 1.9 && secs < 10.0;
    }
    return ok;
}

// ---------------------------------------------------------------- 2
bool cousin_round_trip(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto round_trip = [](const ImmersionGrid& f) {
        const CousinPair fwd = integrate_to_s3(f);
        const CousinPair back = integrate_to_r3(fwd.ftilde);
        const Quaterniond off = back.f.at(0, 0) - f.at(0, 0);
        double worst = 0.0;
        for (size_t k = 0; k < f.values.size(); ++k)
            worst = std::max(worst, norm(back.f.values[k] - f.values[k] - off));
        return worst;
    };
    const double dev_sphere = round_trip(cltest::sphere_chart(0.005, 0.5));
    const double dev_unduloid = round_trip(unduloid_chart(M_PI / 2.0, 0.005, 0.005, 1.25));
    const double secs = elapsed_s(t0);
    detail += fmt("  sphere %.3e, oracle unduloid %.3e (<=1e-6)", dev_sphere, dev_unduloid);
    detail += fmt(", %.1f s (<30)\n", secs);
    return dev_sphere <= 1e-6 && dev_unduloid <= 1e-6 && secs < 30.0;
}

// ---------------------------------------------------------------- 3
bool unduloid_necksize_distance(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    double worst = 0.0;
    for (int k = 1; k <= 10; ++k) {
        const double n = M_PI * k / 10.0;
        const CousinPair pair = generate_unduloid(n);
        const auto pts = boundary_hopf_points(pair);
        const double dev = std::abs(sphere_distance(pts.first, pts.second) - n);
        worst = std::max(worst, dev);
        ok = ok && dev <= 1e-4;
    }
    const double secs = elapsed_s(t0);
    detail += fmt("  worst |hopf distance - n| = %.3e (<=1e-4) over 10 necksizes", worst);
    detail += fmt(", %.0f s (<300)\n", secs);
    return ok && secs < 300.0;
}

// ---------------------------------------------------------------- 4
bool unduloid_geometry(std::string& detail) {
    bool ok = true;
    for (const double n : {M_PI / 2.0, 0.8 * M_PI, M_PI}) {
        const CousinPair pair = generate_unduloid(n);
        const ParallelExtrema ext = measure_parallel_extrema(pair.f);
        const double dev_neck = std::abs(ext.neck - n);
        const double dev_bulge = std::abs(ext.bulge - (2.0 * M_PI - n));

        // Meridian arclength from the neck ruling to the bulge ruling.
        const int i_neck = 0, i_bulge = (pair.f.nx - 1) / 4;
        const int j_mid = (pair.f.ny - 1) / 2;
        double arc = 0.0;
        for (int i = i_neck; i < i_bulge; ++i)
            arc += norm(pair.f.at(i + 1, j_mid) - pair.f.at(i, j_mid));
        const double dev_meridian = std::abs(arc - M_PI / 2.0);

        // Hausdorff-type distance between the generated meridian and the
        // profile oracle, matched by the shared arclength parameter.
        const int half_period = (pair.f.nx - 1) / 2;
        const UnduloidProfile prof = unduloid_profile_oracle(n, half_period + 1);
        double dev_prof = 0.0;
        for (int i = 0; i <= half_period; ++i) {
            const Quaterniond& q = pair.f.at(i, j_mid);
            const Eigen::Vector2d chart(q.x(), q.z());
            const Eigen::Vector2d oracle(prof.z[static_cast<size_t>(i)],
                                         prof.r[static_cast<size_t>(i)]);
            dev_prof = std::max(dev_prof, (chart - oracle).norm());
        }
        detail += fmt("  n=%.4f: neck %.2e bulge %.2e (<=1e-3)", n, dev_neck, dev_bulge);
        detail += fmt(", meridian %.2e (<=1e-3), oracle %.2e (<=1e-3)\n", dev_meridian,
                      dev_prof);
        ok = ok && dev_neck <= 1e-3 && dev_bulge <= 1e-3 && dev_meridian <= 1e-3 &&
             dev_prof <= 1e-3;
    }
    return ok;
}

// ---------------------------------------------------------------- 5
bool cousin_structure_relations(std::string& detail) {
    // Helicoid/unduloid pair with spacing 0.005 in both directions.
    const CousinPair pair = generate_unduloid(M_PI / 2.0, 1257, 100);
    const double dev_normal = deep_interior_max(verify_normal_relation(pair), 1);
    const double dev_shape = deep_interior_max(verify_shape_relation(pair), 2);

    const ImmersionGrid f = cltest::sphere_chart(0.005, 0.5);
    const CousinPair sp = integrate_to_s3(f);
    const Quaterniond a = inverse(f.at(0, 0));
    double dev_sphere = 0.0;
    for (size_t k = 0; k < f.values.size(); ++k)
        dev_sphere = std::max(dev_sphere, norm(sp.ftilde.values[k] - a * f.values[k]));

    detail += fmt("  |nu~ - f~ nu| %.3e (<=1e-3), |J S~ - S + Id| %.3e (<=5e-3)\n",
                  dev_normal, dev_shape);
    detail += fmt("  sphere self-cousin deviation %.3e (<=1e-6)\n", dev_sphere);
    return dev_normal <= 1e-3 && dev_shape <= 5e-3 && dev_sphere <= 1e-6;
}

// ---------------------------------------------------------------- 6
bool force_formula(std::string& detail) {
    const bool exact = end_weight(M_PI, 1.0) == M_PI / 2.0;

    double worst_force = 0.0;
    for (const double n : {0.4, M_PI / 2.0, 2.5, M_PI}) {
        const UnduloidProfile p = unduloid_profile_oracle(n, 513);
        const double expected = n * (1.0 - n / (2.0 * M_PI));
        for (size_t k = 0; k < p.s.size(); ++k)
            worst_force = std::max(
                worst_force, std::abs(UnduloidProfile::force(p.r[k], p.phi[k]) - expected));
    }

    std::mt19937_64 gen(606);
    std::uniform_real_distribution<double> uni(0.02, 1.0);
    double worst_closure = 0.0;
    int count = 0;
    while (count < 100) {
        const NecksizeVector n{uni(gen) * M_PI, uni(gen) * M_PI, uni(gen) * M_PI};
        if (!check_necksize_inequalities(n).admissible) continue;
        ++count;
        const ForceBalance fb = axis_angles_from_necksizes(n);
        worst_closure = std::max(worst_closure, fb.system.net().norm());
    }
    detail += fmt("  end_weight(pi,1) exact: %.0f, force conservation %.3e (<=1e-8)\n",
                  exact ? 1.0 : 0.0, worst_force);
    detail += fmt("  closure residual %.3e (<=1e-10) over 100 admissible vectors\n",
                  worst_closure);
    return exact && worst_force <= 1e-8 && worst_closure <= 1e-10;
}

// ---------------------------------------------------------------- 7
bool moduli_round_trip(std::string& detail) {
    std::mt19937_64 gen(707);
    std::uniform_real_distribution<double> uni(0.02, 1.0);
    double worst = 0.0;
    int count = 0;
    while (count < 100) {
        const NecksizeVector n{uni(gen) * M_PI, uni(gen) * M_PI, uni(gen) * M_PI};
        if (check_necksize_inequalities(n).margin <= 1e-6) continue;
        const Chirality ch = (count % 2) ? Chirality::Left : Chirality::Right;
        ++count;
        const SphericalTriple t = triple_from_necksizes(n, ch);
        const NecksizeVector back = triple_distances(t);
        worst = std::max({worst, std::abs(back.n1 - n.n1), std::abs(back.n2 - n.n2),
                          std::abs(back.n3 - n.n3)});
    }
    const SphericalTriple fig = triple_from_necksizes(
        {M_PI / 2.0, 2.0 * M_PI / 3.0, 5.0 * M_PI / 6.0}, Chirality::Right);
    const double lat = std::abs(canonicalize_triple(fig).latitude);
    detail += fmt("  distance round trip %.3e (<=1e-10), boundary-case latitude %.3e "
                  "(<=1e-10)\n",
                  worst, lat);
    return worst <= 1e-10 && lat <= 1e-10;
}

// ---------------------------------------------------------------- 8
bool corollary_inequalities(std::string& detail) {
    bool rejected_all = true;
    for (double x = 0.001; x <= M_PI; x += 0.05) {
        const AdmissibilityVerdict v = check_necksize_inequalities({M_PI, M_PI, x});
        rejected_all = rejected_all && !v.admissible;
    }
    const AdmissibilityVerdict boundary = check_necksize_inequalities(
        {M_PI / 2.0, 2.0 * M_PI / 3.0, 5.0 * M_PI / 6.0});
    detail += fmt("  (pi, pi, x) rejected for all x: %.0f; boundary margin %.1e, "
                  "admissible %.0f\n",
                  rejected_all ? 1.0 : 0.0, boundary.margin,
                  boundary.admissible ? 1.0 : 0.0);
    return rejected_all && boundary.admissible && std::abs(boundary.margin) <= 1e-12;
}

// ---------------------------------------------------------------- 9
bool hopf_properties(std::string& detail) {
    const auto t0 = std::chrono::steady_clock::now();
    cltest::Rng rng(909);
    double worst_fiber = 0.0, worst_equiv = 0.0, worst_radius = 0.0, worst_speed = 0.0,
           worst_cover = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const SpherePoint u(rng.unit_vec3());
        const UnitQuaternion p(rng.unit_quat());
        const double t = rng.uniform(-8.0, 8.0);
        worst_fiber = std::max(
            worst_fiber, (hopf_project(u, hopf_flow(u, p, t)).vec() -
                          hopf_project(u, p).vec())
                             .norm());

        const Quaterniond a = rng.unit_quat();
        const SpherePoint au(rotate_by(a, u.value()).v);
        const UnitQuaternion ap(rotate_by(a, p.value()));
        worst_equiv = std::max(worst_equiv,
                               norm(hopf_project(au, ap).value() -
                                    rotate_by(a, hopf_project(u, p).value())));

        SpherePoint v(rng.unit_vec3());
        const double theta = sphere_distance(u, v);
        if (theta > 0.15 && theta < M_PI - 0.15) {
            const auto gamma = [&](double s) {
                return hopf_project(u, hopf_flow(v, p, s)).vec();
            };
            const Eigen::Vector3d g0 = gamma(0.0), g1 = gamma(2.0 * M_PI / 5.0),
                                  g2 = gamma(4.0 * M_PI / 5.0);
            const Eigen::Vector3d axis = (g1 - g0).cross(g2 - g0).normalized();
            const double r0 = sphere_distance(axis, g0);
            const double radius_dev = std::min(std::abs(r0 - theta),
                                               std::abs(M_PI - r0 - theta));
            double spread = 0.0;
            for (const double s : {1.1, 2.7, 4.9})
                spread = std::max(spread, std::abs(sphere_distance(axis, gamma(s)) - r0));
            worst_radius = std::max({worst_radius, radius_dev, spread});

            const double s0 = rng.uniform(0.0, 2.0 * M_PI), d = 1e-3;
            const Eigen::Vector3d der = (gamma(s0 - 2 * d) - 8.0 * gamma(s0 - d) +
                                         8.0 * gamma(s0 + d) - gamma(s0 + 2 * d)) /
                                        (12.0 * d);
            worst_speed = std::max(worst_speed,
                                   std::abs(der.norm() - 2.0 * std::sin(theta)));
            const double s1 = rng.uniform(0.0, M_PI);
            worst_cover = std::max(worst_cover, (gamma(s1) - gamma(s1 + M_PI)).norm());
        }
    }
    const double secs = elapsed_s(t0);
    detail += fmt("  fiber %.2e, equivariance %.2e (<=1e-10)\n", worst_fiber, worst_equiv);
    detail += fmt("  radius %.2e, speed %.2e, double cover %.2e (<=1e-10), %.1f s (<5)\n",
                  worst_radius, worst_speed, worst_cover, secs);
    return worst_fiber <= 1e-10 && worst_equiv <= 1e-10 && worst_radius <= 1e-10 &&
           worst_speed <= 1e-10 && worst_cover <= 1e-10 && secs < 5.0;
}

// ---------------------------------------------------------------- 10
bool developing_maps(std::string& detail) {
    cltest::Rng rng(1010);
    bool degrees_ok = true;
    for (int k = 1; k <= 6; ++k) {
        const SheetedMetric chain = truncated_ray(M_PI / 2.0, k);
        for (int t = 0; t < 1000; ++t) {
            SpherePoint q(rng.unit_vec3());
            bool generic = true;
            for (const Cell& c : chain.cells)
                if (c.boundary_distance(q.vec()) < 1e-6) generic = false;
            if (!generic) continue;
            if (developing_degree(chain, q) != k) degrees_ok = false;
        }
    }
    const SphericalTriple octant(SpherePoint(Eigen::Vector3d(1, 0, 0)),
                                 SpherePoint(Eigen::Vector3d(0, 1, 0)),
                                 SpherePoint(Eigen::Vector3d(0, 0, 1)));
    const double octant_dev = std::abs(triangle_area(octant) - M_PI / 2.0);
    const SphericalTriple anti(SpherePoint(Eigen::Vector3d(1, 0, 0)),
                               SpherePoint(Eigen::Vector3d(-1, 0, 0)),
                               SpherePoint(Eigen::Vector3d(0, 1, 0)));
    const bool anti_exact = triangle_area(anti) == 2.0 * M_PI;
    detail += fmt("  chain degrees k=1..6 at 1000 points: %.0f; octant area dev %.1e "
                  "(<=1e-12); antipodal exact: %.0f\n",
                  degrees_ok ? 1.0 : 0.0, octant_dev, anti_exact ? 1.0 : 0.0);
    return degrees_ok && octant_dev <= 1e-12 && anti_exact;
}

// ---------------------------------------------------------------- 11
bool period_identity(std::string& detail) {
    const ImmersionGrid f = unduloid_chart(M_PI / 2.0, 0.01, 0.01, 1.2);
    const CousinPair pair = integrate_to_s3(f);
    const SpherePoint k_dir(Eigen::Vector3d(0, 0, 1));

    // Twenty random boundary-to-boundary staircases; period() itself
    // enforces the agreement of the two integral forms within 1e-4.
    cltest::Rng rng(1111);
    bool forms_agree = true;
    double worst_mirror = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::pair<int, int>> path;
        int i = 5 + static_cast<int>(rng.uniform(0, f.nx - 10));
        path.emplace_back(i, 0);
        for (int j = 0; j < f.ny - 1; ++j) {
            if (rng.uniform(0, 1) < 0.25 && i + 1 < f.nx - 2) path.emplace_back(++i, j);
            path.emplace_back(i, j + 1);
        }
        try {
            const SpherePoint dir(rng.unit_vec3());
            (void)period(pair, path, dir);
            worst_mirror = std::max(worst_mirror,
                                    std::abs(period(pair, path, k_dir)));
        } catch (const Error&) {
            forms_agree = false;
        }
    }
    detail += fmt("  20 random paths: forms agree within 1e-4: %.0f; mirror period %.2e "
                  "(<=1e-6)\n",
                  forms_agree ? 1.0 : 0.0, worst_mirror);
    return forms_agree && worst_mirror <= 1e-6;
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "helicoid minimality (residual <= 1e-4 at h = 0.005, slope >= 1.9)",
         helicoid_minimality},
        {2, "cousin round trip (deviation <= 1e-6)", cousin_round_trip},
        {3, "unduloid necksizes equal boundary hopf distances (within 1e-4)",
         unduloid_necksize_distance},
        {4, "unduloid geometry (circumferences, meridian length, oracle match)",
         unduloid_geometry},
        {5, "cousin structure relations (normal and shape operator)",
         cousin_structure_relations},
        {6, "force formula (weight, conservation, closure)", force_formula},
        {7, "moduli round trip (distances and canonical latitude)", moduli_round_trip},
        {8, "necksize inequalities (cylinder bound and boundary case)",
         corollary_inequalities},
        {9, "hopf projection properties (fiber, equivariance, foreign circle)",
         hopf_properties},
        {10, "developing maps (chain degree, triangle areas)", developing_maps},
        {11, "period identity (two integral forms, mirror direction)", period_identity},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail += std::string("  exception: ") + e.what() + "\n";
        }
        std::printf("[%s] %2d. %s\n%s", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
        if (!ok) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
