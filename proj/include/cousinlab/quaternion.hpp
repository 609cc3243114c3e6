#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>

#include "cousinlab/error.hpp"
#include "cousinlab/tolerances.hpp"

namespace cousinlab {

/**
 * Quaternion with scalar part `w` and imaginary part `v` along (i, j, k).
 *
 * Unit quaternions model the three-sphere S^3; imaginary quaternions
 * (w = 0) model R^3.  Unlike rotation-quaternion classes, this type keeps
 * the full linear structure of the algebra H: addition, scalar multiples
 * and the Hamilton product, which is what finite differences of
 * quaternion-valued grids need.
 */
template <typename Scalar>
struct Quaternion {
    using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
    using Vec4 = Eigen::Matrix<Scalar, 4, 1>;

    Scalar w;
    Vec3 v;

    Quaternion() : w(0), v(Vec3::Zero()) {}
    Quaternion(Scalar w_, Scalar x, Scalar y, Scalar z) : w(w_), v(x, y, z) {}
    Quaternion(Scalar w_, const Vec3& v_) : w(w_), v(v_) {}

    static Quaternion identity() { return Quaternion(Scalar(1), Vec3::Zero()); }
    /// Element of Im H = R^3.
    static Quaternion imaginary(const Vec3& u) { return Quaternion(Scalar(0), u); }

    Scalar x() const { return v[0]; }
    Scalar y() const { return v[1]; }
    Scalar z() const { return v[2]; }

    Vec4 coeffs() const { return Vec4(w, v[0], v[1], v[2]); }

    Quaternion operator+(const Quaternion& o) const { return {w + o.w, Vec3(v + o.v)}; }
    Quaternion operator-(const Quaternion& o) const { return {w - o.w, Vec3(v - o.v)}; }
    Quaternion operator-() const { return {-w, Vec3(-v)}; }

    Quaternion& operator+=(const Quaternion& o) { w += o.w; v += o.v; return *this; }
    Quaternion& operator-=(const Quaternion& o) { w -= o.w; v -= o.v; return *this; }

    /// Hamilton product.
    Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - v.dot(o.v), Vec3(w * o.v + o.w * v + v.cross(o.v))};
    }

    Quaternion operator*(Scalar s) const { return {w * s, Vec3(v * s)}; }
    Quaternion operator/(Scalar s) const { return {w / s, Vec3(v / s)}; }

    friend Quaternion operator*(Scalar s, const Quaternion& q) { return q * s; }
};

using Quaterniond = Quaternion<double>;

template <typename S>
inline Quaternion<S> conj(const Quaternion<S>& q) {
    return {q.w, typename Quaternion<S>::Vec3(-q.v)};
}

template <typename S>
inline S squared_norm(const Quaternion<S>& q) {
    return q.w * q.w + q.v.squaredNorm();
}

template <typename S>
inline S norm(const Quaternion<S>& q) {
    return std::sqrt(squared_norm(q));
}

/// Euclidean inner product of H = R^4.
template <typename S>
inline S dot(const Quaternion<S>& p, const Quaternion<S>& q) {
    return p.w * q.w + p.v.dot(q.v);
}

template <typename S>
inline Quaternion<S> inverse(const Quaternion<S>& q) {
    const S n2 = squared_norm(q);
    if (n2 == S(0)) throw Error("quaternion inverse of zero");
    return conj(q) / n2;
}

template <typename S>
inline Quaternion<S> normalized(const Quaternion<S>& q) {
    const S n = norm(q);
    if (n == S(0)) throw Error("cannot normalize zero quaternion");
    return q / n;
}

/// Commutator pq - qp = 2 (Im p x Im q); always imaginary.
template <typename S>
inline Quaternion<S> commutator(const Quaternion<S>& p, const Quaternion<S>& q) {
    return Quaternion<S>::imaginary(typename Quaternion<S>::Vec3(S(2) * p.v.cross(q.v)));
}

/// exp of an imaginary quaternion: cos|v| + unit(v) sin|v|, a point of S^3.
template <typename S>
inline Quaternion<S> exp_imaginary(const typename Quaternion<S>::Vec3& u) {
    const S t = u.norm();
    if (t < S(1e-300)) return Quaternion<S>::identity();
    const S c = std::cos(t), s = std::sin(t);
    return Quaternion<S>(c, typename Quaternion<S>::Vec3(u * (s / t)));
}

inline Quaterniond exp_imaginary(const Quaterniond& q) {
    return exp_imaginary<double>(q.v);
}

/// Principal logarithm of a unit quaternion; result is imaginary.
/// Requires the argument to stay away from -1 (true for the short group
/// steps taken by the integrators).
template <typename S>
inline Quaternion<S> log_unit(const Quaternion<S>& q) {
    const S s = q.v.norm();
    if (s < S(1e-300)) {
        if (q.w < S(0)) throw Error("log of unit quaternion at -1 is undefined");
        return Quaternion<S>();
    }
    const S theta = std::atan2(s, q.w);
    return Quaternion<S>::imaginary(typename Quaternion<S>::Vec3(q.v * (theta / s)));
}

namespace detail {
inline const Tolerances& default_tolerances() {
    static const Tolerances tol{};
    return tol;
}
} // namespace detail

/// Point of S^3 as a validated unit quaternion.
class UnitQuaternion {
public:
    explicit UnitQuaternion(const Quaterniond& q,
                            const Tolerances& tol = detail::default_tolerances())
        : q_(q) {
        const double drift = std::abs(norm(q) - 1.0);
        if (drift > tol.eps_unit)
            throw Error("UnitQuaternion: |q| deviates from 1 by " + std::to_string(drift));
        // Renormalize once drift exceeds a tenth of the validation tolerance.
        if (drift > tol.eps_unit / 10.0) q_ = normalized(q_);
    }

    static UnitQuaternion one() { return UnitQuaternion(Quaterniond::identity()); }

    const Quaterniond& value() const { return q_; }

private:
    Quaterniond q_;
};

/// Point of S^2, stored as a full imaginary quaternion (w asserted zero)
/// rather than two angles, so downstream projections have no pole
/// singularities.
class SpherePoint {
public:
    explicit SpherePoint(const Quaterniond& q,
                         const Tolerances& tol = detail::default_tolerances())
        : q_(q) {
        if (std::abs(q.w) > tol.eps_unit)
            throw Error("SpherePoint: real part " + std::to_string(q.w) + " is not zero");
        q_.w = 0.0;
        const double drift = std::abs(q_.v.norm() - 1.0);
        if (drift > tol.eps_unit)
            throw Error("SpherePoint: |p| deviates from 1 by " + std::to_string(drift));
        if (drift > tol.eps_unit / 10.0) q_ = normalized(q_);
    }

    explicit SpherePoint(const Eigen::Vector3d& u,
                         const Tolerances& tol = detail::default_tolerances())
        : SpherePoint(Quaterniond::imaginary(u), tol) {}

    const Quaterniond& value() const { return q_; }
    const Eigen::Vector3d& vec() const { return q_.v; }

private:
    Quaterniond q_;
};

/// Great-circle distance on S^2 via atan2 of (|u x v|, <u,v>); accurate
/// near 0 and pi, where cylindrical necksizes live.
inline double sphere_distance(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    return std::atan2(u.cross(v).norm(), u.dot(v));
}

inline double sphere_distance(const SpherePoint& u, const SpherePoint& v) {
    return sphere_distance(u.vec(), v.vec());
}

/// Geodesic distance on S^3 between unit quaternions.
inline double s3_distance(const Quaterniond& p, const Quaterniond& q) {
    const double c = dot(p, q);
    const double s = (p - q * c).coeffs().norm();
    return std::atan2(s, c);
}

} // namespace cousinlab
