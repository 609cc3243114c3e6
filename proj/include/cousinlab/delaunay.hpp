#pragma once

#include <utility>
#include <vector>

#include "cousinlab/cousin.hpp"
#include "cousinlab/grid.hpp"
#include "cousinlab/hopf.hpp"

namespace cousinlab {

/// Parameters of the spherical helicoid
///   h(x, y) = p(y) (cos x + u(y) sin x),
///   p(y) = cos(n y) - i sin(n y),  u(y) = j cos(2 pi y) + k sin(2 pi y).
/// For n in (0, pi] the helicoid is the minimal cousin of an embedded
/// half-unduloid of necksize n; n = 0 and n = 2 pi are not immersed.
struct HelicoidParams {
    double n = M_PI / 2.0;
    double x_min = 0.0, x_max = 2.0 * M_PI;
    double y_min = -0.25, y_max = 0.25;
    int nx = 401, ny = 201;
    /// Clip the open y-interval by half a step at each end and record the
    /// offsets in the grid's boundary metadata.
    bool clip_y = true;
};

/// Analytic evaluation of the helicoid and its exact x-derivative.
Quaterniond helicoid_point(double n, double x, double y);
Quaterniond helicoid_dx(double n, double x, double y);

/// Samples the helicoid on a rectangular grid in its native orthogonal
/// parametrization (|h_x| = 1, |h_y|^2 = n^2 cos^2 x + (2pi - n)^2 sin^2 x).
ImmersionGrid spherical_helicoid(const HelicoidParams& params);

/// Isothermal chart of the helicoid: x is reparametrized by the conformal
/// arclength integral and both coordinates are scaled by lambda = 2 pi - n,
/// so the conformal factor is at most 1.  Covers one x-period and the full
/// y-interval (inclusive; nothing degenerates on the closed strip), with
/// grid spacing near `h` in both directions.
ImmersionGrid helicoid_conformal_chart(double n, double h);

/// Meridian of the H = 1 surface of revolution with neck radius n / 2 pi,
/// sampled by arclength over one full period (neck at s = 0, bulge at
/// s = pi/2, neck again at s = pi).
struct UnduloidProfile {
    double necksize = 0.0;
    double neck_radius = 0.0;
    double bulge_radius = 0.0;
    std::vector<double> s, r, z, phi;

    /// Axial force 2 pi (r sin(phi) - r^2), a first integral of the
    /// profile equation; equals n (1 - n / 2 pi) along the solution.
    static double force(double r, double phi) {
        return 2.0 * M_PI * (r * std::sin(phi) - r * r);
    }
};

/// Independent oracle: integrates the profile system
///   r' = cos(phi), z' = sin(phi), phi' = 2 - sin(phi)/r
/// from the neck with an adaptive high-order scheme at tolerance 1e-10.
UnduloidProfile unduloid_profile_oracle(double n, int samples = 1024);

/// Conformal chart of the oracle unduloid: coordinates (sigma, theta) with
/// metric r^2 (d sigma^2 + d theta^2), theta in [0, pi] (the half above the
/// mirror plane), axis along i, neck circle centered at the origin.
/// sigma_bulge is placed exactly on a grid node and the sigma range covers
/// [-extent, extent] with extent >= sigma_bulge * over_bulge.
ImmersionGrid unduloid_chart(double n, double h_sigma, double h_theta,
                             double over_bulge = 1.25);
/// sigma coordinate of the bulge for necksize n.
double unduloid_sigma_bulge(double n);

/// Builds the helicoid grid for necksize n on y in (-1/4, 1/4), integrates
/// the cousin system to R^3 and aligns the result: axis of revolution along
/// i, boundary arcs in the ij-plane, first neck circle centered at the
/// origin.  The S^3 grid is conjugated by the same rotation so the pair
/// relations stay exact.
///
/// nx = 0 or ny = 0 picks the defaults: 400x200 cells over one x-period,
/// with the x count scaled up as pi/(2n) for small necksizes, whose neck
/// regions sharpen and would otherwise trip the integrability gate.
CousinPair generate_unduloid(double n, int nx = 0, int ny = 0,
                             const Tolerances& tol = {});

/// Values of a symmetry-curve boundary row, extrapolated onto the true
/// boundary curve when the grid records a clip offset for that side.
std::vector<Quaterniond> boundary_fiber_samples(const ImmersionGrid& g, GridSide side);

/// Centroid of the k-Hopf projections of a fiber curve; errors with
/// `context` when the projections spread beyond radius_limit.
SpherePoint hopf_cluster_point(const std::vector<Quaterniond>& fiber, double radius_limit,
                               const char* context);

/// Hopf projections (direction k) of the two bounding rulings of an
/// unduloid cousin pair, in (YMin, YMax) order.  Each ruling must project
/// to a single point within cluster radius 1e-4.
std::pair<SpherePoint, SpherePoint> boundary_hopf_points(const CousinPair& pair);

/// Circumference extrema over the parallels (y-curves) of an unduloid-like
/// half grid: lengths are doubled half-parallel lengths, extrapolated over
/// any recorded clip offsets.
struct ParallelExtrema {
    double neck = 0.0;
    double bulge = 0.0;
    int neck_index = -1;
    int bulge_index = -1;
};
ParallelExtrema measure_parallel_extrema(const ImmersionGrid& g);

/// Necksize = twice the length of the shortest half-parallel; errors if the
/// parallel lengths have no interior minimum.
double measure_necksize(const ImmersionGrid& g);

} // namespace cousinlab
