#pragma once

namespace cousinlab {

/// Central registry of numerical tolerances.  Every check in the library
/// reads its threshold from here so that a run can be audited against a
/// single config block, and the CLI can override individual entries.
struct Tolerances {
    /// Unit-norm validation for quaternions on S^3 and points on S^2.
    double eps_unit = 1e-9;
    /// Rank test for the immersion condition at grid nodes (relative).
    double eps_rank = 1e-10;
    /// Minimal pairwise separation for points of a spherical triple.
    double eps_distinct = 1e-8;
    /// Relative conformality defect accepted by the curvature residuals.
    double tau_conf = 1e-3;
    /// Accepted mean-curvature residual for a grid fed to the integrator.
    double tau_cmc = 1e-3;
    /// Accepted minimality residual for a grid fed to the integrator.
    double tau_min = 1e-3;
    /// Pointwise metric deviation allowed between integrated cousins.
    double tau_isom = 1e-3;
    /// Integrability threshold: loop residual density <= factor * h^2.
    double tau_loop_factor = 10.0;
    /// Agreement required between the two period integrals.
    double tau_period = 1e-4;
    /// Cluster radius for Hopf projections of boundary fibers.
    double rho_cluster = 1e-3;
    /// Unit-norm drift at which group integration is declared unstable.
    double drift_limit = 1e-6;
    /// Slack below which a necksize inequality still counts as satisfied
    /// (absorbs roundoff in boundary cases; reported margins are raw).
    double eps_inequality = 1e-12;
};

} // namespace cousinlab
