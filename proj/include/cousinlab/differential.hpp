#pragma once

#include <Eigen/Core>

#include "cousinlab/grid.hpp"

namespace cousinlab {

/// First derivatives of a grid in both parameter directions.
struct DerivativeFields {
    Field<Quaterniond> fx;
    Field<Quaterniond> fy;
};

/// Coefficients of the first fundamental form in the (dx, dy) frame.
struct MetricField {
    Eigen::ArrayXXd E, F, G;
};

/// Per-node shape operator in the (dx, dy) frame.
using ShapeField = Field<Eigen::Matrix2d>;

/// Tangent vector field given by coefficients against (dx, dy).
using TangentField = Field<Eigen::Vector2d>;

/// Second-order finite differences: central at interior nodes, one-sided
/// (still second-order) on the boundary.  Requires nx, ny >= 3.
DerivativeFields derivatives(const ImmersionGrid& g);

/// Fourth-order stencils; used internally where the second-order error
/// would dominate a tolerance (group integration, period integrands,
/// isometry audits).  Requires nx, ny >= 5.
DerivativeFields derivatives4(const ImmersionGrid& g);

MetricField metric(const ImmersionGrid& g, const DerivativeFields& d);
inline MetricField metric(const ImmersionGrid& g) { return metric(g, derivatives(g)); }

/// Relative conformality defect max(|E-G|, 2|F|) / max(E, G) over nodes.
double conformality_defect(const MetricField& m);

/// Unit normal field.  In R^3: nu = fx x fy / |fx x fy|.  In S^3: the unit
/// vector orthogonal to f, fx, fy with det[f, fx, fy, nu] > 0, which is the
/// orientation matching the mean-curvature convention in R^3.
Field<Quaterniond> normal(const ImmersionGrid& g);
Field<Quaterniond> normal(const ImmersionGrid& g, const DerivativeFields& d);

/// Pointwise conformality residuals r1 = |fx|^2 - |fy|^2 and
/// r2 = |fx fy + fy fx| (R^3 grids) or 2 |<fx, fy>| (S^3 grids).
void conformality_residual(const ImmersionGrid& g, Eigen::ArrayXXd& r1, Eigen::ArrayXXd& r2);

/// Max over nodes at least `margin` layers away from the grid boundary;
/// one-sided stencil layers carry lower-order error than the interior.
double deep_interior_max(const Eigen::ArrayXXd& a, int margin);

/// Pointwise |Delta f - 2 fx fy| at interior nodes (zero on the boundary
/// rows, where no central second difference exists).  Vanishes exactly when
/// the surface has constant mean curvature 1 in a conformal chart; the grid
/// must be conformal within tau_conf.
Eigen::ArrayXXd cmc_residual(const ImmersionGrid& g, const Tolerances& tol = {});

/// Pointwise |Delta f + f (|fx|^2 + |fy|^2)| at interior nodes of a
/// conformal S^3 grid; vanishes exactly for minimal surfaces.
Eigen::ArrayXXd minimal_residual_s3(const ImmersionGrid& g, const Tolerances& tol = {});

/// Shape operator S solved from d(nu) = -df o S in the (dx, dy) frame.
ShapeField shape_operator(const ImmersionGrid& g, const Tolerances& tol = {});
ShapeField shape_operator(const ImmersionGrid& g, const DerivativeFields& d,
                          const Field<Quaterniond>& nu, const Tolerances& tol = {});

/// Frame-invariant scalars of a shape operator.
inline double mean_curvature(const Eigen::Matrix2d& S) { return 0.5 * S.trace(); }
/// |A|^2 = (tr S)^2 - 2 det S, the squared norm of the second fundamental
/// form in an orthonormal frame.
inline double second_form_norm_sq(const Eigen::Matrix2d& S) {
    const double t = S.trace();
    return t * t - 2.0 * S.determinant();
}

/// Matrix of the 90-degree rotation J of the tangent plane in the (dx, dy)
/// frame: J dx = (-F dx + E dy)/W, J dy = (-G dx + F dy)/W, W = sqrt(EG-F^2).
Eigen::Matrix2d j_matrix(double E, double F, double G);

/// J applied to a tangent field; preserves length, J(JX) = -X, and (X, JX)
/// is positively oriented.
TangentField apply_J(const ImmersionGrid& g, const TangentField& X);

/// Laplace-Beltrami of a scalar field u on the surface, at interior nodes.
Eigen::ArrayXXd laplace_beltrami(const ImmersionGrid& g, const Eigen::ArrayXXd& u);

/// Pointwise Jacobi residual Delta_M u + |A|^2 u at interior nodes of an
/// R^3 grid.
Eigen::ArrayXXd jacobi_residual(const ImmersionGrid& g, const Eigen::ArrayXXd& u,
                                const Tolerances& tol = {});

/// Max over interior nodes (boundary rows of residual fields are zero).
double interior_max(const Eigen::ArrayXXd& a);

} // namespace cousinlab
