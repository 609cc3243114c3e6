#pragma once

#include <array>
#include <optional>
#include <vector>

#include "cousinlab/grid.hpp"
#include "cousinlab/hopf.hpp"

namespace cousinlab {

/// Ordered triple of distinct points on S^2; the value space of the
/// classifying map, considered up to rotation.
struct SphericalTriple {
    SpherePoint p1, p2, p3;

    SphericalTriple(const SpherePoint& a, const SpherePoint& b, const SpherePoint& c,
                    const Tolerances& tol = {});

    const SpherePoint& point(int i) const {
        return i == 0 ? p1 : (i == 1 ? p2 : p3);
    }
};

/// Rotation-invariant coordinates of a triple: rotate the circle through
/// the three points onto a circle of latitude with p1 at longitude zero and
/// p2, p3 proceeding eastward; keep the common latitude and the longitudes
/// of p2 and p3.
struct CanonicalTripleCoords {
    double latitude = 0.0;       // in [-pi/2, pi/2]
    double lon2 = 0.0, lon3 = 0.0; // in [0, 2 pi)
};

/// Three numbers in (0, pi]; candidate asymptotic necksizes.
struct NecksizeVector {
    double n1 = 0.0, n2 = 0.0, n3 = 0.0;
    double operator[](int i) const { return i == 0 ? n1 : (i == 1 ? n2 : n3); }
};

/// Result of the spherical triangle inequality test.  `slacks` holds
/// n_j + n_k - n_i for i = 1, 2, 3 and 2 pi - (n_1 + n_2 + n_3); `margin`
/// is the smallest of them (zero margin = boundary case, still admissible).
struct AdmissibilityVerdict {
    bool admissible = false;
    double margin = 0.0;
    std::array<double, 4> slacks{};
};

/// Three weights with coplanar unit axis directions; balanced when
/// sum w_i a_i = 0.
struct ForceSystem {
    std::array<double, 3> weights{};
    std::array<Eigen::Vector3d, 3> axes{};
    Eigen::Vector3d net() const {
        return weights[0] * axes[0] + weights[1] * axes[1] + weights[2] * axes[2];
    }
};

/// Axis angles solved from force balancing.
struct ForceBalance {
    ForceSystem system;
    /// angle(a_i, a_j) for (1,2), (2,3), (3,1).
    std::array<double, 3> angles{};
};

enum class Chirality { Left, Right };

/// Edge lengths of the triple: n_i = dist(p_i, p_{i+1}) with indices mod 3.
NecksizeVector triple_distances(const SphericalTriple& t);

/// The four spherical triangle inequalities, with non-strict boundary
/// cases admissible.  Components outside (0, pi] raise an error.
AdmissibilityVerdict check_necksize_inequalities(const NecksizeVector& n,
                                                 const Tolerances& tol = {});

/// A triple whose distances are n; the two chirality values give mirror
/// triples (canonical latitudes of opposite sign), which coincide up to
/// rotation when an inequality is tight.
SphericalTriple triple_from_necksizes(const NecksizeVector& n, Chirality chirality,
                                      const Tolerances& tol = {});

CanonicalTripleCoords canonicalize_triple(const SphericalTriple& t);

/// Rebuild a representative triple from canonical coordinates.
SphericalTriple triple_from_canonical(const CanonicalTripleCoords& c,
                                      const Tolerances& tol = {});

/// Force magnitude n (1 - H n / 2 pi) of an end asymptotic to a surface of
/// revolution with necksize n.
double end_weight(double n, double H);

/// Angles between the asymptotic axes prescribed by force balancing for
/// CMC-1 ends: the closed planar triangle with side lengths
/// w_i = end_weight(n_i, 1).  Errors when the weights cannot close.
ForceBalance axis_angles_from_necksizes(const NecksizeVector& n, const Tolerances& tol = {});

/// Hopf projection (direction k) of a single boundary fiber; errors when
/// the samples do not cluster within radius_limit.
SpherePoint classify_fiber_curve(const std::vector<Quaterniond>& fiber, double radius_limit,
                                 const char* context = "classify_boundary");

/// Classifying data of a cousin grid: one point per symmetry-marked
/// boundary side (2 or 3 of them), each required to be contained in a
/// k-Hopf circle within rho_cluster.  Sides are taken in counterclockwise
/// order YMin, XMax, YMax, XMin.
struct BoundaryClassification {
    std::vector<SpherePoint> points;
    /// Present when exactly three components were classified.
    std::optional<SphericalTriple> triple;
};
BoundaryClassification classify_boundary(const ImmersionGrid& ftilde,
                                         const Tolerances& tol = {});

} // namespace cousinlab
