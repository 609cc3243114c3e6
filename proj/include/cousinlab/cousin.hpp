#pragma once

#include <utility>
#include <vector>

#include "cousinlab/differential.hpp"
#include "cousinlab/grid.hpp"

namespace cousinlab {

/// Order in which the spanning tree of the integration sweeps the grid.
enum class IntegrationOrder { RowMajor, ColumnMajor };

/// A CMC-1 immersion f in R^3 and its isometric minimal cousin ftilde in
/// S^3, integrated from a common base node.  The grids share (nx, ny, hx,
/// hy) and induce the same metric within tau_isom.
struct CousinPair {
    ImmersionGrid f;
    ImmersionGrid ftilde;
    std::pair<int, int> base_point{0, 0};
    /// Largest unit-norm drift seen during group integration.
    double drift_log = 0.0;
    /// Largest per-plaquette integrability defect density of the input.
    double loop_residual_max = 0.0;
    /// Max pointwise |E - E~| + |F - F~| + |G - G~| between the two grids.
    double isometry_error = 0.0;
};

/// Per-plaquette integrability defect of the cousin system
/// d(ftilde) = ftilde (df o J) for an R^3 grid: the holonomy of the group
/// increments around each plaquette, reported as a density per unit of
/// parameter area.  Vanishes to discretization order exactly when the
/// surface is CMC-1; for other surfaces it approaches |Delta f - 2 fx fy|.
/// Output has shape (nx-1, ny-1).
Eigen::ArrayXXd loop_residual(const ImmersionGrid& f);

/// Same audit for the reverse direction: additive defect of the R^3-valued
/// form -ftilde^{-1} d(ftilde) o J around plaquettes of an S^3 grid, again
/// a density.  Vanishes exactly when ftilde is minimal.
Eigen::ArrayXXd loop_residual_s3(const ImmersionGrid& ftilde);

/// Integrates d(ftilde) = ftilde (df o J) over the grid, starting from
/// ftilde(base) = base_value (default 1), by exact exponential steps in the
/// group along a row-major spanning tree.  The input must be CMC-1: its
/// loop residual density is checked against tau_loop = factor * h^2 first.
CousinPair integrate_to_s3(const ImmersionGrid& f, const Tolerances& tol = {},
                           IntegrationOrder order = IntegrationOrder::RowMajor,
                           const Quaterniond& base_value = Quaterniond::identity());

/// Integrates df = -ftilde^{-1} d(ftilde) o J from f(base) = base_value
/// (default 0).  The input must be minimal; the output is CMC-1, and a
/// mean curvature of -1 is reported as a sign/orientation error rather
/// than silently reinterpreted.
CousinPair integrate_to_r3(const ImmersionGrid& ftilde, const Tolerances& tol = {},
                           IntegrationOrder order = IntegrationOrder::RowMajor,
                           const Quaterniond& base_value = Quaterniond());

/// Pointwise |nu~ - ftilde nu|; the cousins share their normal in this
/// left-translated sense.
Eigen::ArrayXXd verify_normal_relation(const CousinPair& pair);

/// Pointwise Frobenius norm of J S~ - S + Id in the shared (dx, dy) frame;
/// interior nodes only.
Eigen::ArrayXXd verify_shape_relation(const CousinPair& pair, const Tolerances& tol = {});

/// Signed height difference along `direction` between the endpoints of a
/// grid-adjacent path connecting two boundary sides.  Computed both as the
/// direct displacement integral on f and as the conormal integral
/// -int <eta~, gamma~ k> ds on the cousin; the two must agree within
/// tau_period and the first is returned.
double period(const CousinPair& pair, const std::vector<std::pair<int, int>>& path,
              const SpherePoint& direction, const Tolerances& tol = {});

} // namespace cousinlab
