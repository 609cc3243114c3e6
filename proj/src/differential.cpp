#include "cousinlab/differential.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

namespace cousinlab {

namespace {

std::string node_str(int i, int j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

// Second-order first derivative along one line of nodes.
template <typename Get>
Quaterniond d1_o2(const Get& f, int idx, int count, double h) {
    if (idx > 0 && idx + 1 < count) return (f(idx + 1) - f(idx - 1)) / (2.0 * h);
    if (idx == 0) return (f(0) * (-3.0) + f(1) * 4.0 - f(2)) / (2.0 * h);
    return (f(count - 1) * 3.0 - f(count - 2) * 4.0 + f(count - 3)) / (2.0 * h);
}

// Fourth-order central first derivative; the four boundary nodes use
// one-sided six-point (fifth-order) stencils so that the error field stays
// one order smoother there than in the interior.  Differentiating an
// integrated grid a second time (round trips, relation checks) would
// otherwise lose an order right where the sweeps start.
template <typename Get>
Quaterniond d1_o4(const Get& f, int idx, int count, double h) {
    if (idx >= 2 && idx + 2 < count) {
        return (f(idx - 2) - f(idx - 1) * 8.0 + f(idx + 1) * 8.0 - f(idx + 2)) / (12.0 * h);
    }
    if (idx < 2) {
        if (idx == 0)
            return (f(0) * (-137.0 / 60.0) + f(1) * 5.0 - f(2) * 5.0 + f(3) * (10.0 / 3.0) -
                    f(4) * 1.25 + f(5) * 0.2) /
                   h;
        return (f(0) * (-0.2) - f(1) * (13.0 / 12.0) + f(2) * 2.0 - f(3) +
                f(4) * (1.0 / 3.0) - f(5) * 0.05) /
               h;
    }
    const int n = count;
    if (idx == n - 1)
        return (f(n - 1) * (137.0 / 60.0) - f(n - 2) * 5.0 + f(n - 3) * 5.0 -
                f(n - 4) * (10.0 / 3.0) + f(n - 5) * 1.25 - f(n - 6) * 0.2) /
               h;
    return (f(n - 1) * 0.2 + f(n - 2) * (13.0 / 12.0) - f(n - 3) * 2.0 + f(n - 4) -
            f(n - 5) * (1.0 / 3.0) + f(n - 6) * 0.05) /
           h;
}

template <bool FourthOrder>
DerivativeFields derivatives_impl(const ImmersionGrid& g) {
    const int min_nodes = FourthOrder ? 6 : 3;
    if (g.nx < min_nodes || g.ny < min_nodes)
        throw Error("derivatives: grid too small, need at least " + std::to_string(min_nodes) +
                    " nodes per direction");
    DerivativeFields d{Field<Quaterniond>(g.nx, g.ny), Field<Quaterniond>(g.nx, g.ny)};
    for (int j = 0; j < g.ny; ++j) {
        const auto row = [&](int i) -> const Quaterniond& { return g.at(i, j); };
        for (int i = 0; i < g.nx; ++i)
            d.fx(i, j) = FourthOrder ? d1_o4(row, i, g.nx, g.hx) : d1_o2(row, i, g.nx, g.hx);
    }
    for (int i = 0; i < g.nx; ++i) {
        const auto col = [&](int j) -> const Quaterniond& { return g.at(i, j); };
        for (int j = 0; j < g.ny; ++j)
            d.fy(i, j) = FourthOrder ? d1_o4(col, j, g.ny, g.hy) : d1_o2(col, j, g.ny, g.hy);
    }
    return d;
}

// Vector orthogonal to a, b, c in R^4 with det[a, b, c, out] = |out|^2 > 0.
Eigen::Vector4d cross4(const Eigen::Vector4d& a, const Eigen::Vector4d& b,
                       const Eigen::Vector4d& c) {
    Eigen::Vector4d out;
    Eigen::Matrix3d m;
    for (int comp = 0; comp < 4; ++comp) {
        int r = 0;
        for (int k = 0; k < 4; ++k) {
            if (k == comp) continue;
            m(0, r) = a[k];
            m(1, r) = b[k];
            m(2, r) = c[k];
            ++r;
        }
        // Expanding det[a; b; c; e_comp] along the last row.
        const double sign = ((3 + comp) % 2 == 0) ? 1.0 : -1.0;
        out[comp] = sign * m.determinant();
    }
    return out;
}

} // namespace

void ImmersionGrid::validate_ambient(const Tolerances& tol) const {
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const Quaterniond& q = at(i, j);
            if (ambient == Ambient::R3) {
                if (std::abs(q.w) > tol.eps_unit)
                    throw Error("grid node " + node_str(i, j) + " has nonzero real part " +
                                std::to_string(q.w) + " in R3 ambient");
            } else if (std::abs(norm(q) - 1.0) > tol.eps_unit) {
                throw Error("grid node " + node_str(i, j) + " is off S3 by " +
                            std::to_string(std::abs(norm(q) - 1.0)));
            }
        }
    }
}

void ImmersionGrid::validate_immersion(const Tolerances& tol) const {
    const DerivativeFields d = derivatives(*this);
    for (int i = 1; i + 1 < nx; ++i) {
        for (int j = 1; j + 1 < ny; ++j) {
            const Quaterniond& fx = d.fx(i, j);
            const Quaterniond& fy = d.fy(i, j);
            const double E = dot(fx, fx), F = dot(fx, fy), G = dot(fy, fy);
            const double gram = E * G - F * F;
            const double scale = (E + G) * (E + G);
            if (!(gram > tol.eps_rank * scale))
                throw Error("grid is degenerate at node " + node_str(i, j) +
                            ": EG - F^2 = " + std::to_string(gram));
        }
    }
}

BoundaryCurve boundary_curve(const ImmersionGrid& g, GridSide side) {
    BoundaryCurve c;
    c.conormal_side = side;
    switch (side) {
        case GridSide::YMin:
            for (int i = 0; i < g.nx; ++i) c.nodes.emplace_back(i, 0);
            break;
        case GridSide::YMax:
            for (int i = 0; i < g.nx; ++i) c.nodes.emplace_back(i, g.ny - 1);
            break;
        case GridSide::XMin:
            for (int j = 0; j < g.ny; ++j) c.nodes.emplace_back(0, j);
            break;
        case GridSide::XMax:
            for (int j = 0; j < g.ny; ++j) c.nodes.emplace_back(g.nx - 1, j);
            break;
    }
    return c;
}

DerivativeFields derivatives(const ImmersionGrid& g) { return derivatives_impl<false>(g); }
DerivativeFields derivatives4(const ImmersionGrid& g) { return derivatives_impl<true>(g); }

MetricField metric(const ImmersionGrid& g, const DerivativeFields& d) {
    MetricField m;
    m.E.resize(g.nx, g.ny);
    m.F.resize(g.nx, g.ny);
    m.G.resize(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            m.E(i, j) = dot(d.fx(i, j), d.fx(i, j));
            m.F(i, j) = dot(d.fx(i, j), d.fy(i, j));
            m.G(i, j) = dot(d.fy(i, j), d.fy(i, j));
        }
    }
    return m;
}

double conformality_defect(const MetricField& m) {
    double worst = 0.0;
    for (int i = 0; i < m.E.rows(); ++i) {
        for (int j = 0; j < m.E.cols(); ++j) {
            const double scale = std::max(m.E(i, j), m.G(i, j));
            if (scale <= 0.0) return std::numeric_limits<double>::infinity();
            const double defect =
                std::max(std::abs(m.E(i, j) - m.G(i, j)), 2.0 * std::abs(m.F(i, j))) / scale;
            worst = std::max(worst, defect);
        }
    }
    return worst;
}

Field<Quaterniond> normal(const ImmersionGrid& g) { return normal(g, derivatives(g)); }

Field<Quaterniond> normal(const ImmersionGrid& g, const DerivativeFields& d) {
    Field<Quaterniond> nu(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            if (g.ambient == Ambient::R3) {
                const Eigen::Vector3d c = d.fx(i, j).v.cross(d.fy(i, j).v);
                const double len = c.norm();
                if (len < 1e-14)
                    throw Error("normal: degenerate node " + node_str(i, j));
                nu(i, j) = Quaterniond::imaginary(c / len);
            } else {
                const Eigen::Vector4d c = cross4(g.at(i, j).coeffs(), d.fx(i, j).coeffs(),
                                                 d.fy(i, j).coeffs());
                const double len = c.norm();
                if (len < 1e-14)
                    throw Error("normal: degenerate node " + node_str(i, j));
                nu(i, j) = Quaterniond(c[0] / len, c[1] / len, c[2] / len, c[3] / len);
            }
        }
    }
    return nu;
}

void conformality_residual(const ImmersionGrid& g, Eigen::ArrayXXd& r1, Eigen::ArrayXXd& r2) {
    // For imaginary-valued grids the anticommutator test is the literal
    // conformality condition; for S^3 grids, where the tangent vectors are
    // general quaternions, r2 falls back to twice the metric cross term.
    const DerivativeFields d = derivatives(g);
    r1.resize(g.nx, g.ny);
    r2.resize(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const Quaterniond& fx = d.fx(i, j);
            const Quaterniond& fy = d.fy(i, j);
            r1(i, j) = squared_norm(fx) - squared_norm(fy);
            r2(i, j) = (g.ambient == Ambient::R3) ? norm(fx * fy + fy * fx)
                                                  : 2.0 * std::abs(dot(fx, fy));
        }
    }
}

namespace {

void require_conformal(const ImmersionGrid& g, const Tolerances& tol, const char* op) {
    const double defect = conformality_defect(metric(g));
    if (defect > tol.tau_conf)
        throw Error(std::string(op) + ": grid is not conformal (defect " +
                    std::to_string(defect) + " > tau_conf " + std::to_string(tol.tau_conf) +
                    "); the residual would be meaningless");
}

Quaterniond laplacian_node(const ImmersionGrid& g, int i, int j) {
    const Quaterniond dxx =
        (g.at(i + 1, j) - g.at(i, j) * 2.0 + g.at(i - 1, j)) / (g.hx * g.hx);
    const Quaterniond dyy =
        (g.at(i, j + 1) - g.at(i, j) * 2.0 + g.at(i, j - 1)) / (g.hy * g.hy);
    return dxx + dyy;
}

} // namespace

Eigen::ArrayXXd cmc_residual(const ImmersionGrid& g, const Tolerances& tol) {
    if (g.ambient != Ambient::R3) throw Error("cmc_residual expects an R3 grid");
    require_conformal(g, tol, "cmc_residual");
    const DerivativeFields d = derivatives(g);
    Eigen::ArrayXXd r = Eigen::ArrayXXd::Zero(g.nx, g.ny);
    for (int i = 1; i + 1 < g.nx; ++i)
        for (int j = 1; j + 1 < g.ny; ++j)
            r(i, j) = norm(laplacian_node(g, i, j) - d.fx(i, j) * d.fy(i, j) * 2.0);
    return r;
}

Eigen::ArrayXXd minimal_residual_s3(const ImmersionGrid& g, const Tolerances& tol) {
    if (g.ambient != Ambient::S3) throw Error("minimal_residual_s3 expects an S3 grid");
    require_conformal(g, tol, "minimal_residual_s3");
    const DerivativeFields d = derivatives(g);
    Eigen::ArrayXXd r = Eigen::ArrayXXd::Zero(g.nx, g.ny);
    for (int i = 1; i + 1 < g.nx; ++i) {
        for (int j = 1; j + 1 < g.ny; ++j) {
            const double e2 = squared_norm(d.fx(i, j)) + squared_norm(d.fy(i, j));
            r(i, j) = norm(laplacian_node(g, i, j) + g.at(i, j) * e2);
        }
    }
    return r;
}

ShapeField shape_operator(const ImmersionGrid& g, const Tolerances& tol) {
    const DerivativeFields d = derivatives(g);
    return shape_operator(g, d, normal(g, d), tol);
}

ShapeField shape_operator(const ImmersionGrid& g, const DerivativeFields& d,
                          const Field<Quaterniond>& nu, const Tolerances& tol) {
    // d(nu) = -df o S, solved against the Gram matrix of (fx, fy).
    DerivativeFields dn{Field<Quaterniond>(g.nx, g.ny), Field<Quaterniond>(g.nx, g.ny)};
    for (int j = 0; j < g.ny; ++j) {
        const auto row = [&](int i) -> const Quaterniond& { return nu(i, j); };
        for (int i = 0; i < g.nx; ++i) dn.fx(i, j) = d1_o2(row, i, g.nx, g.hx);
    }
    for (int i = 0; i < g.nx; ++i) {
        const auto col = [&](int j) -> const Quaterniond& { return nu(i, j); };
        for (int j = 0; j < g.ny; ++j) dn.fy(i, j) = d1_o2(col, j, g.ny, g.hy);
    }

    ShapeField S(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const Quaterniond& fx = d.fx(i, j);
            const Quaterniond& fy = d.fy(i, j);
            Eigen::Matrix2d gram;
            gram << dot(fx, fx), dot(fx, fy), dot(fx, fy), dot(fy, fy);
            const double det = gram.determinant();
            if (!(det > tol.eps_rank * gram.trace() * gram.trace()))
                throw Error("shape_operator: degenerate metric at node " + node_str(i, j));
            Eigen::Matrix2d rhs;
            rhs << -dot(dn.fx(i, j), fx), -dot(dn.fy(i, j), fx),
                   -dot(dn.fx(i, j), fy), -dot(dn.fy(i, j), fy);
            S(i, j) = gram.inverse() * rhs;
        }
    }
    return S;
}

Eigen::Matrix2d j_matrix(double E, double F, double G) {
    const double w2 = E * G - F * F;
    if (!(w2 > 0.0)) throw Error("j_matrix: degenerate metric");
    const double W = std::sqrt(w2);
    Eigen::Matrix2d J;
    J << -F / W, -G / W, E / W, F / W;
    return J;
}

TangentField apply_J(const ImmersionGrid& g, const TangentField& X) {
    const MetricField m = metric(g);
    TangentField out(g.nx, g.ny);
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double E = m.E(i, j), F = m.F(i, j), G = m.G(i, j);
            if (!(E * G - F * F > 0.0))
                throw Error("apply_J: degenerate metric at node " + node_str(i, j));
            out(i, j) = j_matrix(E, F, G) * X(i, j);
        }
    }
    return out;
}

Eigen::ArrayXXd laplace_beltrami(const ImmersionGrid& g, const Eigen::ArrayXXd& u) {
    if (u.rows() != g.nx || u.cols() != g.ny)
        throw Error("laplace_beltrami: field shape does not match grid");
    const MetricField m = metric(g);

    // Flux form: Delta u = (P_x + Q_y) / W with
    //   P = (G u_x - F u_y) / W,  Q = (E u_y - F u_x) / W,  W = sqrt(EG - F^2).
    Eigen::ArrayXXd P(g.nx, g.ny), Q(g.nx, g.ny), W(g.nx, g.ny);
    Eigen::ArrayXXd ux(g.nx, g.ny), uy(g.nx, g.ny);
    const auto d1s = [](const auto& get, int idx, int count, double h) {
        if (idx > 0 && idx + 1 < count) return (get(idx + 1) - get(idx - 1)) / (2.0 * h);
        if (idx == 0) return (-3.0 * get(0) + 4.0 * get(1) - get(2)) / (2.0 * h);
        return (3.0 * get(count - 1) - 4.0 * get(count - 2) + get(count - 3)) / (2.0 * h);
    };
    for (int j = 0; j < g.ny; ++j) {
        const auto row = [&](int i) { return u(i, j); };
        for (int i = 0; i < g.nx; ++i) ux(i, j) = d1s(row, i, g.nx, g.hx);
    }
    for (int i = 0; i < g.nx; ++i) {
        const auto col = [&](int j) { return u(i, j); };
        for (int j = 0; j < g.ny; ++j) uy(i, j) = d1s(col, j, g.ny, g.hy);
    }
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const double E = m.E(i, j), F = m.F(i, j), G = m.G(i, j);
            const double w2 = E * G - F * F;
            if (!(w2 > 0.0))
                throw Error("laplace_beltrami: degenerate metric at node " + node_str(i, j));
            W(i, j) = std::sqrt(w2);
            P(i, j) = (G * ux(i, j) - F * uy(i, j)) / W(i, j);
            Q(i, j) = (E * uy(i, j) - F * ux(i, j)) / W(i, j);
        }
    }
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(g.nx, g.ny);
    for (int i = 1; i + 1 < g.nx; ++i) {
        for (int j = 1; j + 1 < g.ny; ++j) {
            const double Px = (P(i + 1, j) - P(i - 1, j)) / (2.0 * g.hx);
            const double Qy = (Q(i, j + 1) - Q(i, j - 1)) / (2.0 * g.hy);
            out(i, j) = (Px + Qy) / W(i, j);
        }
    }
    return out;
}

Eigen::ArrayXXd jacobi_residual(const ImmersionGrid& g, const Eigen::ArrayXXd& u,
                                const Tolerances& tol) {
    if (g.ambient != Ambient::R3) throw Error("jacobi_residual expects an R3 grid");
    const Eigen::ArrayXXd lap = laplace_beltrami(g, u);
    const ShapeField S = shape_operator(g, tol);
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(g.nx, g.ny);
    for (int i = 1; i + 1 < g.nx; ++i)
        for (int j = 1; j + 1 < g.ny; ++j)
            out(i, j) = std::abs(lap(i, j) + second_form_norm_sq(S(i, j)) * u(i, j));
    return out;
}

double interior_max(const Eigen::ArrayXXd& a) {
    double worst = 0.0;
    for (int i = 1; i + 1 < a.rows(); ++i)
        for (int j = 1; j + 1 < a.cols(); ++j) worst = std::max(worst, std::abs(a(i, j)));
    return worst;
}

double deep_interior_max(const Eigen::ArrayXXd& a, int margin) {
    double worst = 0.0;
    for (int i = margin; i + margin < a.rows(); ++i)
        for (int j = margin; j + margin < a.cols(); ++j)
            worst = std::max(worst, std::abs(a(i, j)));
    return worst;
}

} // namespace cousinlab
