#pragma once

#include <vector>

#include "cousinlab/quaternion.hpp"

namespace cousinlab {

/**
 * Hopf fields, circles and projections on S^3.
 *
 * Left-translating a unit imaginary u gives the left-invariant field
 * p -> pu; its integral curves are great circles ("u-Hopf circles"), and
 * the fibration Pi_u(p) = p u conj(p) projects S^3 onto S^2 with those
 * circles as fibers.
 */

/// Pi_u(p) = p u conj(p); the result lies on S^2.
inline SpherePoint hopf_project(const SpherePoint& u, const UnitQuaternion& p) {
    const Quaterniond& q = p.value();
    return SpherePoint(q * u.value() * conj(q));
}

/// Raw variant for inner loops; caller guarantees unit inputs.
inline Quaterniond hopf_project_raw(const Quaterniond& u, const Quaterniond& p) {
    return p * u * conj(p);
}

/// Point at parameter t along the u-Hopf circle through p:
/// p e^{tu} = p (cos t + u sin t).  Period 2 pi.
inline UnitQuaternion hopf_flow(const SpherePoint& u, const UnitQuaternion& p, double t) {
    const Quaterniond step(std::cos(t), Eigen::Vector3d(u.vec() * std::sin(t)));
    return UnitQuaternion(p.value() * step);
}

/// Pi_u sampled along the v-Hopf circle through p, at `samples` uniform
/// parameters over one full circle [0, 2 pi).  With theta = angle(u, v),
/// the samples trace a round circle of spherical radius theta, covered
/// twice at constant speed 2 sin(theta).
inline std::vector<SpherePoint> project_foreign_circle(const SpherePoint& u,
                                                       const SpherePoint& v,
                                                       const UnitQuaternion& p,
                                                       int samples) {
    if (samples < 1) throw Error("project_foreign_circle: need at least one sample");
    std::vector<SpherePoint> out;
    out.reserve(static_cast<size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        const double t = 2.0 * M_PI * static_cast<double>(s) / static_cast<double>(samples);
        const UnitQuaternion q = hopf_flow(v, p, t);
        out.push_back(hopf_project(u, q));
    }
    return out;
}

/// Conjugation action x -> a x conj(a).  For unit a this is the rotation
/// of R^3 = Im H realized by a; it fixes 1 and preserves S^2 in S^3.
inline Quaterniond rotate_by(const Quaterniond& a, const Quaterniond& x) {
    return a * x * conj(a);
}

} // namespace cousinlab
