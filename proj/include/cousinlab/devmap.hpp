#pragma once

#include <vector>

#include "cousinlab/moduli.hpp"
#include "cousinlab/quaternion.hpp"

namespace cousinlab {

/**
 * Sheeted spherical metrics on the disk: slit spheres, joins and chains,
 * and the triangle-with-rays decomposition of three-point metrics.  Cell
 * regions are kept implicit (membership predicates plus boundary arcs)
 * rather than tessellated, so degree counting uses exact spherical
 * predicates.
 */

/// Directed arc of a great circle: from `a` to `b`, counterclockwise
/// around `pole`.  Arcs of length up to pi (minimizing) are the ones slit
/// spheres use; the pole disambiguates the semicircle when a and b are
/// antipodal.
class GreatArc {
public:
    GreatArc(const SpherePoint& a, const SpherePoint& b, const Eigen::Vector3d& pole);

    /// Minimizing arc between non-antipodal distinct points.
    static GreatArc minimizing(const SpherePoint& a, const SpherePoint& b);

    const Eigen::Vector3d& start() const { return a_; }
    const Eigen::Vector3d& end() const { return b_; }
    const Eigen::Vector3d& pole() const { return pole_; }
    double length() const { return length_; }
    bool minimizing_arc() const { return length_ <= M_PI + 1e-12; }

    /// Point at arc parameter s in [0, length].
    Eigen::Vector3d point_at(double s) const;
    /// Unit tangent of the traversal at parameter s.
    Eigen::Vector3d tangent_at(double s) const;
    /// Whether q lies on the closed arc within tolerance eps.
    bool contains(const Eigen::Vector3d& q, double eps) const;
    /// Reversed traversal (same point set).
    GreatArc reversed() const;

private:
    Eigen::Vector3d a_, b_, pole_;
    double length_;
};

enum class CellKind { SlitSphere, Hemisphere, Triangle };

/// One boundary arc of a cell, oriented with the cell on its left.
struct CellArc {
    GreatArc arc;
    bool glued = false;
    /// Marks the artificial boundary where an infinite ray was truncated.
    bool truncation = false;
};

/// A spherical region together with its development placement.  All cells
/// constructed here develop at the identity rotation; the field is kept so
/// that joined metrics with rotated developments remain representable.
struct Cell {
    CellKind kind = CellKind::SlitSphere;
    /// SlitSphere: the slit.  Unused otherwise.
    std::vector<GreatArc> slit;
    /// Hemisphere: region <q, pole> > 0.
    Eigen::Vector3d pole = Eigen::Vector3d::UnitZ();
    /// Triangle: vertices in boundary order (region to the left).
    std::vector<Eigen::Vector3d> vertices;
    /// Development placement.
    Quaterniond rotation = Quaterniond::identity();
    /// Boundary arcs available for gluing.
    std::vector<CellArc> arcs;

    double area() const;
    /// Whether the developed region contains q; q must stay away from the
    /// cell boundary (see developing_degree).
    bool contains(const Eigen::Vector3d& q) const;
    /// Distance from q to the nearest boundary arc or slit of the cell.
    double boundary_distance(const Eigen::Vector3d& q) const;
};

struct Gluing {
    int cell_a = 0, arc_a = 0;
    int cell_b = 0, arc_b = 0;
};

/// Disk with a spherical metric, stored as cells plus isometric gluings.
struct SheetedMetric {
    std::vector<Cell> cells;
    std::vector<Gluing> gluings;
    std::vector<SpherePoint> completion_points;

    double total_area() const;
    /// Free (unglued) boundary arcs as (cell, arc) indices.
    std::vector<std::pair<int, int>> free_arcs() const;
    /// Total length of the free completion boundary, excluding truncation
    /// arcs when requested.
    double completion_boundary_length(bool include_truncation = true) const;
};

/// S^2 slit along a closed minimizing arc; the completion boundary is a
/// loop of two arcs of the slit's length.
SheetedMetric make_slit_sphere(const GreatArc& e);

/// Glue two disks along free boundary arcs of equal length whose
/// developments extend one another (coincident arcs, opposite traversal).
SheetedMetric join(const SheetedMetric& a, const SheetedMetric& b,
                   std::pair<int, int> arc_a, std::pair<int, int> arc_b);

/// Chain of k slit spheres of slit length n joined along a common arc; the
/// finite stand-in for a ray of slit spheres.  The far bank is flagged as
/// the truncation boundary.
SheetedMetric truncated_ray(double n, int k);
SheetedMetric truncated_ray(const GreatArc& e, int k);

/// Spherical excess of the triangle to the left of the three minimizing
/// arcs connecting the triple in label order.  Returns exactly 2 pi when
/// the triple contains an antipodal pair (the full-great-circle
/// convention) and 4 pi in the collinear case where one arc contains the
/// third point in its interior.
double triangle_area(const SphericalTriple& t);

/// Three-point metric: the left-of-Gamma triangle with a truncated ray of
/// `depth` slit spheres joined across each edge.  The completion points
/// develop to the triple.
SheetedMetric three_point_metric(const SphericalTriple& t, int depth);

/// Number of cells whose region contains q; q must keep clear of all cell
/// boundaries and slit endpoints.
int developing_degree(const SheetedMetric& m, const SpherePoint& q);

} // namespace cousinlab
