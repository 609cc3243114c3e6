#pragma once

#include <array>
#include <string>
#include <vector>

#include "cousinlab/quaternion.hpp"

namespace cousinlab {

enum class Ambient { R3, S3 };

inline const char* ambient_name(Ambient a) { return a == Ambient::R3 ? "R3" : "S3"; }

/// Sides of the parameter rectangle, in the counterclockwise order used
/// when boundary components are labeled.
enum class GridSide : int { YMin = 0, XMax = 1, YMax = 2, XMin = 3 };

/// Per-side boundary annotation.  `symmetry_curve` marks sides whose image
/// is a symmetry curve of the surface (mirror arc in R^3, Hopf fiber of the
/// cousin in S^3).  `clip_offset` is the parameter distance from the last
/// grid line to the true boundary curve; generators that must keep their
/// stencils strictly inside an open parameter interval clip by half a step
/// and record the offset here, so that boundary classification can
/// extrapolate back onto the true curve.
struct BoundaryEdge {
    bool symmetry_curve = false;
    double clip_offset = 0.0;
};

/// Dense rectangular field, row-major in the x index.
template <typename T>
struct Field {
    int nx = 0, ny = 0;
    std::vector<T> data;

    Field() = default;
    Field(int nx_, int ny_) : nx(nx_), ny(ny_), data(static_cast<size_t>(nx_) * ny_) {}
    Field(int nx_, int ny_, const T& init)
        : nx(nx_), ny(ny_), data(static_cast<size_t>(nx_) * ny_, init) {}

    T& operator()(int i, int j) { return data[static_cast<size_t>(i) * ny + j]; }
    const T& operator()(int i, int j) const { return data[static_cast<size_t>(i) * ny + j]; }
};

/**
 * Rectangular grid sampling an immersion f: Omega -> R^3 (imaginary
 * quaternion values) or S^3 (unit quaternion values).  Node (i, j) sits at
 * parameter (x0 + i hx, y0 + j hy); storage is row-major in i.
 *
 * Grids are immutable by convention after construction: every operation
 * takes them by const reference and returns fresh fields, so unrestricted
 * concurrent reads are safe.
 */
struct ImmersionGrid {
    Ambient ambient = Ambient::R3;
    int nx = 0, ny = 0;
    double hx = 0.0, hy = 0.0;
    double x0 = 0.0, y0 = 0.0;
    std::vector<Quaterniond> values;
    std::array<BoundaryEdge, 4> boundary{};

    ImmersionGrid() = default;
    ImmersionGrid(Ambient a, int nx_, int ny_, double hx_, double hy_)
        : ambient(a), nx(nx_), ny(ny_), hx(hx_), hy(hy_),
          values(static_cast<size_t>(nx_) * ny_) {
        if (nx_ < 2 || ny_ < 2) throw Error("ImmersionGrid: need at least 2x2 nodes");
        if (hx_ <= 0.0 || hy_ <= 0.0) throw Error("ImmersionGrid: spacings must be positive");
    }

    Quaterniond& at(int i, int j) { return values[static_cast<size_t>(i) * ny + j]; }
    const Quaterniond& at(int i, int j) const { return values[static_cast<size_t>(i) * ny + j]; }

    double x_at(int i) const { return x0 + i * hx; }
    double y_at(int j) const { return y0 + j * hy; }

    BoundaryEdge& edge(GridSide s) { return boundary[static_cast<int>(s)]; }
    const BoundaryEdge& edge(GridSide s) const { return boundary[static_cast<int>(s)]; }

    /// Checks the ambient constraint (w = 0, or |q| = 1) at every node.
    void validate_ambient(const Tolerances& tol = {}) const;

    /// Checks that the grid is an immersion at interior nodes; throws with
    /// the first offending node.  Separate from validate_ambient because
    /// derivative stencils are needed.
    void validate_immersion(const Tolerances& tol = {}) const;
};

/// Ordered node indices along one grid side, plus which side of the curve
/// the surface lies on (the conormal points into the grid interior).
struct BoundaryCurve {
    GridSide conormal_side = GridSide::YMin;
    std::vector<std::pair<int, int>> nodes;
};

/// Node list of one side, ordered by the running index.
BoundaryCurve boundary_curve(const ImmersionGrid& g, GridSide side);

} // namespace cousinlab
