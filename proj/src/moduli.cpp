#include "cousinlab/moduli.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cousinlab/delaunay.hpp"

namespace cousinlab {

SphericalTriple::SphericalTriple(const SpherePoint& a, const SpherePoint& b,
                                 const SpherePoint& c, const Tolerances& tol)
    : p1(a), p2(b), p3(c) {
    const double d12 = sphere_distance(p1, p2);
    const double d23 = sphere_distance(p2, p3);
    const double d31 = sphere_distance(p3, p1);
    if (d12 < tol.eps_distinct || d23 < tol.eps_distinct || d31 < tol.eps_distinct)
        throw Error("SphericalTriple: points are not pairwise distinct");
}

NecksizeVector triple_distances(const SphericalTriple& t) {
    return {sphere_distance(t.p1, t.p2), sphere_distance(t.p2, t.p3),
            sphere_distance(t.p3, t.p1)};
}

AdmissibilityVerdict check_necksize_inequalities(const NecksizeVector& n,
                                                 const Tolerances& tol) {
    for (int i = 0; i < 3; ++i) {
        if (!(n[i] > 0.0) || !(n[i] <= M_PI))
            throw Error("necksize component " + std::to_string(i + 1) + " = " +
                        std::to_string(n[i]) + " is outside (0, pi]");
    }
    AdmissibilityVerdict v;
    v.slacks[0] = n.n2 + n.n3 - n.n1;
    v.slacks[1] = n.n3 + n.n1 - n.n2;
    v.slacks[2] = n.n1 + n.n2 - n.n3;
    v.slacks[3] = 2.0 * M_PI - (n.n1 + n.n2 + n.n3);
    v.margin = *std::min_element(v.slacks.begin(), v.slacks.end());
    v.admissible = v.margin >= -tol.eps_inequality;
    return v;
}

namespace {

Eigen::Vector3d winding_axis(const Eigen::Vector3d& p1, const Eigen::Vector3d& p2,
                             const Eigen::Vector3d& p3) {
    const Eigen::Vector3d a = (p2 - p1).cross(p3 - p1);
    const double len = a.norm();
    if (len < 1e-300) throw Error("triple is numerically collinear in R^3");
    return a / len;
}

double wrap_2pi(double t) {
    t = std::fmod(t, 2.0 * M_PI);
    if (t < 0.0) t += 2.0 * M_PI;
    return t;
}

} // namespace

CanonicalTripleCoords canonicalize_triple(const SphericalTriple& t) {
    const Eigen::Vector3d p1 = t.p1.vec(), p2 = t.p2.vec(), p3 = t.p3.vec();
    const Eigen::Vector3d axis = winding_axis(p1, p2, p3);

    // Rotate the winding axis onto k about axis x k, which fixes p1's
    // longitude relative to the circle.
    const Eigen::Vector3d k(0.0, 0.0, 1.0);
    Eigen::Matrix3d R;
    const double c = axis.dot(k);
    if (c > 1.0 - 1e-14) {
        R.setIdentity();
    } else if (c < -1.0 + 1e-14) {
        R = Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitX()).toRotationMatrix();
    } else {
        const Eigen::Vector3d u = axis.cross(k).normalized();
        R = Eigen::AngleAxisd(std::acos(std::clamp(c, -1.0, 1.0)), u).toRotationMatrix();
    }

    const Eigen::Vector3d q1 = R * p1, q2 = R * p2, q3 = R * p3;
    CanonicalTripleCoords out;
    out.latitude = std::asin(std::clamp(q1[2], -1.0, 1.0));
    const double lon1 = std::atan2(q1[1], q1[0]);
    out.lon2 = wrap_2pi(std::atan2(q2[1], q2[0]) - lon1);
    out.lon3 = wrap_2pi(std::atan2(q3[1], q3[0]) - lon1);
    return out;
}

SphericalTriple triple_from_canonical(const CanonicalTripleCoords& c, const Tolerances& tol) {
    const double cl = std::cos(c.latitude), sl = std::sin(c.latitude);
    const auto at = [&](double lon) {
        return SpherePoint(Eigen::Vector3d(cl * std::cos(lon), cl * std::sin(lon), sl), tol);
    };
    return SphericalTriple(at(0.0), at(c.lon2), at(c.lon3), tol);
}

SphericalTriple triple_from_necksizes(const NecksizeVector& n, Chirality chirality,
                                      const Tolerances& tol) {
    const AdmissibilityVerdict v = check_necksize_inequalities(n, tol);
    if (!v.admissible)
        throw Error("triple_from_necksizes: inadmissible necksizes (margin " +
                    std::to_string(v.margin) + ")");

    const Eigen::Vector3d k(0.0, 0.0, 1.0), i_hat(1.0, 0.0, 0.0);
    const Eigen::Vector3d p1 = k;
    const Eigen::Vector3d p2 = std::cos(n.n1) * k + std::sin(n.n1) * i_hat;

    Eigen::Vector3d p3;
    const double s1 = std::sin(n.n1);
    if (std::abs(s1) < 1e-12) {
        // Antipodal p1, p2 (n1 = pi): every point at distance n3 from p1 is
        // at distance pi - n3 from p2, and admissibility forces n2 + n3 = pi.
        p3 = std::cos(n.n3) * k + std::sin(n.n3) * i_hat;
    } else {
        const double c1 = std::cos(n.n1);
        const double A = (std::cos(n.n3) - c1 * std::cos(n.n2)) / (s1 * s1);
        const double B = (std::cos(n.n2) - c1 * std::cos(n.n3)) / (s1 * s1);
        // The out-of-plane coefficient does not enter the distances to p1 and
        // p2, so radicands at roundoff scale are truncated to the exactly
        // equatorial solution instead of injecting sqrt(eps) of latitude.
        const double c2 = std::max(0.0, 1.0 - A * A - B * B - 2.0 * A * B * c1);
        const double C = (c2 < 1e-13) ? 0.0 : std::sqrt(c2);
        const Eigen::Vector3d u = p1.cross(p2).normalized();
        p3 = (A * p1 + B * p2 + C * u).normalized();
        if (C > 1e-12) {
            const SphericalTriple plus(SpherePoint(p1, tol), SpherePoint(p2, tol),
                                       SpherePoint(p3, tol), tol);
            const bool plus_is_right = canonicalize_triple(plus).latitude >= 0.0;
            if (plus_is_right != (chirality == Chirality::Right))
                p3 = (A * p1 + B * p2 - C * u).normalized();
        }
    }
    return SphericalTriple(SpherePoint(p1, tol), SpherePoint(p2, tol), SpherePoint(p3, tol),
                           tol);
}

double end_weight(double n, double H) {
    if (!(n > 0.0)) throw Error("end_weight: necksize must be positive");
    return n * (1.0 - H * n / (2.0 * M_PI));
}

ForceBalance axis_angles_from_necksizes(const NecksizeVector& n, const Tolerances& tol) {
    const AdmissibilityVerdict v = check_necksize_inequalities(n, tol);
    if (!v.admissible) throw Error("axis_angles_from_necksizes: inadmissible necksizes");

    ForceBalance out;
    auto& w = out.system.weights;
    for (int i = 0; i < 3; ++i) w[static_cast<size_t>(i)] = end_weight(n[i], 1.0);
    for (int i = 0; i < 3; ++i) {
        const double wi = w[static_cast<size_t>(i)];
        const double wj = w[static_cast<size_t>((i + 1) % 3)];
        const double wk = w[static_cast<size_t>((i + 2) % 3)];
        if (wi > wj + wk + tol.eps_inequality)
            throw Error("axis_angles_from_necksizes: weights violate closure (w" +
                        std::to_string(i + 1) +
                        " exceeds the sum of the others); these necksizes cannot balance");
    }

    // Planar closure: a1 along x, a2 at the prescribed angle, a3 forced by
    // the zero sum, which makes the balance residual exact.
    const double c12 =
        std::clamp((w[2] * w[2] - w[0] * w[0] - w[1] * w[1]) / (2.0 * w[0] * w[1]), -1.0, 1.0);
    const double phi = std::acos(c12);
    out.system.axes[0] = Eigen::Vector3d(1.0, 0.0, 0.0);
    out.system.axes[1] = Eigen::Vector3d(std::cos(phi), std::sin(phi), 0.0);
    const Eigen::Vector3d a3 = -(w[0] * out.system.axes[0] + w[1] * out.system.axes[1]);
    const double a3_len = a3.norm();
    if (a3_len < 1e-300) throw Error("axis_angles_from_necksizes: degenerate closure");
    out.system.axes[2] = a3 / w[2];
    if (std::abs(a3_len - w[2]) > 1e-9 * (1.0 + w[2]))
        out.system.axes[2] = a3 / a3_len;
    out.angles[0] = sphere_distance(out.system.axes[0], out.system.axes[1]);
    out.angles[1] = sphere_distance(out.system.axes[1], out.system.axes[2]);
    out.angles[2] = sphere_distance(out.system.axes[2], out.system.axes[0]);
    return out;
}

SpherePoint classify_fiber_curve(const std::vector<Quaterniond>& fiber, double radius_limit,
                                 const char* context) {
    return hopf_cluster_point(fiber, radius_limit, context);
}

BoundaryClassification classify_boundary(const ImmersionGrid& ftilde, const Tolerances& tol) {
    if (ftilde.ambient != Ambient::S3)
        throw Error("classify_boundary expects an S3 cousin grid");
    ftilde.validate_ambient(tol);

    static constexpr std::array<GridSide, 4> order = {GridSide::YMin, GridSide::XMax,
                                                      GridSide::YMax, GridSide::XMin};
    std::vector<GridSide> marked;
    for (GridSide s : order)
        if (ftilde.edge(s).symmetry_curve) marked.push_back(s);
    if (marked.size() != 2 && marked.size() != 3)
        throw Error("classify_boundary: grid has " + std::to_string(marked.size()) +
                    " marked boundary components, need 2 or 3");

    BoundaryClassification out;
    for (size_t idx = 0; idx < marked.size(); ++idx) {
        const auto fiber = boundary_fiber_samples(ftilde, marked[idx]);
        const std::string ctx = "classify_boundary: component " + std::to_string(idx + 1);
        out.points.push_back(classify_fiber_curve(fiber, tol.rho_cluster, ctx.c_str()));
    }
    if (out.points.size() == 3)
        out.triple.emplace(out.points[0], out.points[1], out.points[2], tol);
    return out;
}

} // namespace cousinlab
