#include "cousinlab/cousin.hpp"

#include <array>
#include <cmath>
#include <string>

namespace cousinlab {

namespace {

// Gauss-Legendre points on an edge [0, 1].
constexpr double kGauss1 = 0.5 - 0.28867513459481288225457439025098;
constexpr double kGauss2 = 0.5 + 0.28867513459481288225457439025098;

// Lagrange interpolation of a nodal line field at parameter xi in [0, 1]
// on the edge [idx, idx+1].  Interior edges use a centered cubic; the two
// outermost edges use one-sided quartics, matching the extra order of the
// boundary derivative stencils.
template <typename Get>
Quaterniond interp_edge(const Get& f, int idx, int count, double xi) {
    int base, m;  // first stencil node, stencil size
    if (idx >= 1 && idx + 2 < count) {
        base = idx - 1;
        m = 4;
    } else if (idx == 0) {
        base = 0;
        m = 5;
    } else {
        base = count - 5;
        m = 5;
    }
    const double t = xi + static_cast<double>(idx - base);
    Quaterniond out;
    for (int k = 0; k < m; ++k) {
        double w = 1.0;
        for (int l = 0; l < m; ++l) {
            if (l == k) continue;
            w *= (t - static_cast<double>(l)) / static_cast<double>(k - l);
        }
        out += f(base + k) * w;
    }
    return out;
}

// Nodal values of the connection form alpha = df o J for an R^3 grid, or
// beta = -ftilde^{-1} d(ftilde) o J (imaginary part) for an S^3 grid.
struct ConnectionForm {
    Field<Quaterniond> cx, cy;
};

ConnectionForm connection_form(const ImmersionGrid& g) {
    const DerivativeFields d = derivatives4(g);
    ConnectionForm c{Field<Quaterniond>(g.nx, g.ny), Field<Quaterniond>(g.nx, g.ny)};
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            const Quaterniond& fx = d.fx(i, j);
            const Quaterniond& fy = d.fy(i, j);
            const double E = dot(fx, fx), F = dot(fx, fy), G = dot(fy, fy);
            const double w2 = E * G - F * F;
            if (!(w2 > 0.0))
                throw Error("connection form: degenerate metric at node (" +
                            std::to_string(i) + ", " + std::to_string(j) + ")");
            const double W = std::sqrt(w2);
            // df o J applied to dx and dy.
            Quaterniond jx = (fx * (-F) + fy * E) / W;
            Quaterniond jy = (fx * (-G) + fy * F) / W;
            if (g.ambient == Ambient::R3) {
                c.cx(i, j) = jx;
                c.cy(i, j) = jy;
            } else {
                const Quaterniond inv = conj(g.at(i, j)) / squared_norm(g.at(i, j));
                Quaterniond bx = (inv * jx) * -1.0;
                Quaterniond by = (inv * jy) * -1.0;
                bx.w = 0.0;  // tangent at 1 is imaginary; discard FD noise
                by.w = 0.0;
                c.cx(i, j) = bx;
                c.cy(i, j) = by;
            }
        }
    }
    return c;
}

// Fourth-order edge increment of the connection form: 2-point Gauss
// quadrature plus, in the group case, the leading Magnus commutator for
// the right-invariant system d(ftilde) = ftilde alpha.
Quaterniond edge_increment(const ConnectionForm& c, const ImmersionGrid& g, int i, int j,
                           bool x_edge, bool group) {
    Quaterniond a1, a2;
    double h;
    if (x_edge) {
        const auto row = [&](int k) -> const Quaterniond& { return c.cx(k, j); };
        a1 = interp_edge(row, i, g.nx, kGauss1);
        a2 = interp_edge(row, i, g.nx, kGauss2);
        h = g.hx;
    } else {
        const auto col = [&](int k) -> const Quaterniond& { return c.cy(i, k); };
        a1 = interp_edge(col, j, g.ny, kGauss1);
        a2 = interp_edge(col, j, g.ny, kGauss2);
        h = g.hy;
    }
    Quaterniond inc = (a1 + a2) * (0.5 * h);
    if (group) {
        const double k2 = std::sqrt(3.0) * h * h / 12.0;
        inc += commutator(a1, a2) * k2;
    }
    return inc;
}

struct SweepCallbacks {
    // step(i, j, i_prev, j_prev, x_edge, edge_origin_i, edge_origin_j)
    template <typename F>
    static void run(int nx, int ny, IntegrationOrder order, F&& step) {
        if (order == IntegrationOrder::RowMajor) {
            for (int i = 1; i < nx; ++i) step(i, 0, i - 1, 0, true, i - 1, 0);
            for (int i = 0; i < nx; ++i)
                for (int j = 1; j < ny; ++j) step(i, j, i, j - 1, false, i, j - 1);
        } else {
            for (int j = 1; j < ny; ++j) step(0, j, 0, j - 1, false, 0, j - 1);
            for (int j = 0; j < ny; ++j)
                for (int i = 1; i < nx; ++i) step(i, j, i - 1, j, true, i - 1, j);
        }
    }
};

Eigen::ArrayXXd plaquette_residual(const ImmersionGrid& g, bool group) {
    const ConnectionForm c = connection_form(g);
    Eigen::ArrayXXd out(g.nx - 1, g.ny - 1);
    for (int i = 0; i + 1 < g.nx; ++i) {
        for (int j = 0; j + 1 < g.ny; ++j) {
            const Quaterniond b = edge_increment(c, g, i, j, true, group);      // bottom
            const Quaterniond r = edge_increment(c, g, i + 1, j, false, group); // right
            const Quaterniond t = edge_increment(c, g, i, j + 1, true, group);  // top
            const Quaterniond l = edge_increment(c, g, i, j, false, group);     // left
            double defect;
            if (group) {
                const Quaterniond hol = exp_imaginary(b) * exp_imaginary(r) *
                                        conj(exp_imaginary(t)) * conj(exp_imaginary(l));
                defect = norm(log_unit(normalized(hol)));
            } else {
                defect = norm(b + r - t - l);
            }
            out(i, j) = defect / (g.hx * g.hy);
        }
    }
    return out;
}

void check_integrable(const Eigen::ArrayXXd& res, const ImmersionGrid& g,
                      const Tolerances& tol, const char* reason) {
    const double h = std::max(g.hx, g.hy);
    const double tau_loop = tol.tau_loop_factor * h * h;
    double worst = 0.0;
    int wi = 0, wj = 0;
    for (int i = 0; i < res.rows(); ++i) {
        for (int j = 0; j < res.cols(); ++j) {
            if (res(i, j) > worst) {
                worst = res(i, j);
                wi = i;
                wj = j;
            }
        }
    }
    if (worst > tau_loop)
        throw Error(std::string("not integrable: ") + reason + "; worst plaquette (" +
                    std::to_string(wi) + ", " + std::to_string(wj) + ") has residual density " +
                    std::to_string(worst) + " > tau_loop " + std::to_string(tau_loop));
}

double isometry_error(const ImmersionGrid& a, const ImmersionGrid& b) {
    const MetricField ma = metric(a, derivatives4(a));
    const MetricField mb = metric(b, derivatives4(b));
    double worst = 0.0;
    for (int i = 0; i < a.nx; ++i) {
        for (int j = 0; j < a.ny; ++j) {
            const double dev = std::abs(ma.E(i, j) - mb.E(i, j)) +
                               std::abs(ma.F(i, j) - mb.F(i, j)) +
                               std::abs(ma.G(i, j) - mb.G(i, j));
            worst = std::max(worst, dev);
        }
    }
    return worst;
}

} // namespace

Eigen::ArrayXXd loop_residual(const ImmersionGrid& f) {
    if (f.ambient != Ambient::R3) throw Error("loop_residual expects an R3 grid");
    return plaquette_residual(f, true);
}

Eigen::ArrayXXd loop_residual_s3(const ImmersionGrid& ftilde) {
    if (ftilde.ambient != Ambient::S3) throw Error("loop_residual_s3 expects an S3 grid");
    return plaquette_residual(ftilde, false);
}

CousinPair integrate_to_s3(const ImmersionGrid& f, const Tolerances& tol,
                           IntegrationOrder order, const Quaterniond& base_value) {
    if (f.ambient != Ambient::R3) throw Error("integrate_to_s3 expects an R3 grid");
    f.validate_ambient(tol);

    CousinPair pair;
    pair.f = f;

    const Eigen::ArrayXXd res = plaquette_residual(f, true);
    pair.loop_residual_max = res.maxCoeff();
    check_integrable(res, f, tol, "input is not CMC");

    const ConnectionForm c = connection_form(f);
    ImmersionGrid ft(Ambient::S3, f.nx, f.ny, f.hx, f.hy);
    ft.x0 = f.x0;
    ft.y0 = f.y0;
    ft.boundary = f.boundary;
    ft.at(0, 0) = base_value;

    double drift = std::abs(norm(base_value) - 1.0);
    SweepCallbacks::run(f.nx, f.ny, order, [&](int i, int j, int ip, int jp, bool x_edge,
                                               int ei, int ej) {
        const Quaterniond inc = edge_increment(c, f, ei, ej, x_edge, true);
        Quaterniond q = ft.at(ip, jp) * exp_imaginary(inc);
        const double dev = std::abs(norm(q) - 1.0);
        drift = std::max(drift, dev);
        if (dev > tol.eps_unit / 10.0) q = normalized(q);
        ft.at(i, j) = q;
    });
    if (drift > tol.drift_limit)
        throw Error("integration unstable: unit-norm drift " + std::to_string(drift) +
                    " exceeds " + std::to_string(tol.drift_limit));
    pair.drift_log = drift;
    pair.ftilde = std::move(ft);
    pair.isometry_error = isometry_error(pair.f, pair.ftilde);
    if (pair.isometry_error > tol.tau_isom)
        throw Error("cousins are not isometric: metric deviation " +
                    std::to_string(pair.isometry_error) + " > tau_isom " +
                    std::to_string(tol.tau_isom));
    return pair;
}

CousinPair integrate_to_r3(const ImmersionGrid& ftilde, const Tolerances& tol,
                           IntegrationOrder order, const Quaterniond& base_value) {
    if (ftilde.ambient != Ambient::S3) throw Error("integrate_to_r3 expects an S3 grid");
    ftilde.validate_ambient(tol);

    CousinPair pair;
    pair.ftilde = ftilde;

    const Eigen::ArrayXXd res = plaquette_residual(ftilde, false);
    pair.loop_residual_max = res.maxCoeff();
    check_integrable(res, ftilde, tol, "input is not minimal");

    const ConnectionForm c = connection_form(ftilde);
    ImmersionGrid f(Ambient::R3, ftilde.nx, ftilde.ny, ftilde.hx, ftilde.hy);
    f.x0 = ftilde.x0;
    f.y0 = ftilde.y0;
    f.boundary = ftilde.boundary;
    f.at(0, 0) = base_value;

    SweepCallbacks::run(ftilde.nx, ftilde.ny, order,
                        [&](int i, int j, int ip, int jp, bool x_edge, int ei, int ej) {
                            const Quaterniond inc =
                                edge_increment(c, ftilde, ei, ej, x_edge, false);
                            f.at(i, j) = f.at(ip, jp) + inc;
                        });
    pair.f = std::move(f);
    pair.isometry_error = isometry_error(pair.f, pair.ftilde);
    if (pair.isometry_error > tol.tau_isom)
        throw Error("cousins are not isometric: metric deviation " +
                    std::to_string(pair.isometry_error) + " > tau_isom " +
                    std::to_string(tol.tau_isom));

    // Mean curvature of the output must be +1; -1 indicates an orientation
    // mismatch in the input which we surface instead of flipping J.
    const ShapeField S = shape_operator(pair.f, tol);
    double h_sum = 0.0;
    int count = 0;
    for (int i = 1; i + 1 < pair.f.nx; ++i) {
        for (int j = 1; j + 1 < pair.f.ny; ++j) {
            h_sum += mean_curvature(S(i, j));
            ++count;
        }
    }
    const double h_mean = h_sum / std::max(count, 1);
    if (h_mean < 0.0)
        throw Error("orientation/sign error: integrated surface has mean curvature " +
                    std::to_string(h_mean) + " (expected +1); the input orientation is "
                    "reversed");
    return pair;
}

Eigen::ArrayXXd verify_normal_relation(const CousinPair& pair) {
    const Field<Quaterniond> nu = normal(pair.f);
    const Field<Quaterniond> nut = normal(pair.ftilde);
    Eigen::ArrayXXd out(pair.f.nx, pair.f.ny);
    for (int i = 0; i < pair.f.nx; ++i)
        for (int j = 0; j < pair.f.ny; ++j)
            out(i, j) = norm(nut(i, j) - pair.ftilde.at(i, j) * nu(i, j));
    return out;
}

Eigen::ArrayXXd verify_shape_relation(const CousinPair& pair, const Tolerances& tol) {
    const ShapeField S = shape_operator(pair.f, tol);
    const ShapeField St = shape_operator(pair.ftilde, tol);
    const MetricField m = metric(pair.f);
    Eigen::ArrayXXd out = Eigen::ArrayXXd::Zero(pair.f.nx, pair.f.ny);
    for (int i = 1; i + 1 < pair.f.nx; ++i) {
        for (int j = 1; j + 1 < pair.f.ny; ++j) {
            const Eigen::Matrix2d J = j_matrix(m.E(i, j), m.F(i, j), m.G(i, j));
            const Eigen::Matrix2d R = J * St(i, j) - S(i, j) + Eigen::Matrix2d::Identity();
            out(i, j) = R.norm();
        }
    }
    return out;
}

namespace {

bool on_boundary(const ImmersionGrid& g, const std::pair<int, int>& n) {
    return n.first == 0 || n.first == g.nx - 1 || n.second == 0 || n.second == g.ny - 1;
}

GridSide which_side(const ImmersionGrid& g, const std::pair<int, int>& n) {
    if (n.second == 0) return GridSide::YMin;
    if (n.second == g.ny - 1) return GridSide::YMax;
    if (n.first == 0) return GridSide::XMin;
    return GridSide::XMax;
}

} // namespace

double period(const CousinPair& pair, const std::vector<std::pair<int, int>>& path,
              const SpherePoint& direction, const Tolerances& tol) {
    const ImmersionGrid& f = pair.f;
    const ImmersionGrid& ft = pair.ftilde;
    if (path.size() < 2) throw Error("period: path needs at least two nodes");
    for (size_t k = 0; k + 1 < path.size(); ++k) {
        const int di = std::abs(path[k + 1].first - path[k].first);
        const int dj = std::abs(path[k + 1].second - path[k].second);
        if (di + dj != 1) throw Error("period: path nodes must be grid-adjacent");
    }
    if (!on_boundary(f, path.front()) || !on_boundary(f, path.back()) ||
        which_side(f, path.front()) == which_side(f, path.back()))
        throw Error("period: path must connect two different boundary sides");

    const Quaterniond k_dir = direction.value();

    // Direct form: the displacement integral telescopes.
    const Quaterniond delta = f.at(path.back().first, path.back().second) -
                              f.at(path.front().first, path.front().second);
    const double p_direct = dot(delta, k_dir);

    // Cousin form: -int <eta~, gamma~ k> ds with eta~ = d(ftilde)(J gamma')
    // and the parameter measure absorbed into the conormal, sampled with the
    // same edge quadrature as the integrators.
    const DerivativeFields d = derivatives4(ft);
    Field<Quaterniond> etax(ft.nx, ft.ny), etay(ft.nx, ft.ny);
    Field<Quaterniond> fk(ft.nx, ft.ny);
    {
        const MetricField m = metric(ft, d);
        for (int i = 0; i < ft.nx; ++i) {
            for (int j = 0; j < ft.ny; ++j) {
                const double E = m.E(i, j), F = m.F(i, j), G = m.G(i, j);
                const double W = std::sqrt(E * G - F * F);
                etax(i, j) = (d.fx(i, j) * (-F) + d.fy(i, j) * E) / W;
                etay(i, j) = (d.fx(i, j) * (-G) + d.fy(i, j) * F) / W;
                fk(i, j) = ft.at(i, j) * k_dir;
            }
        }
    }
    double p_cousin = 0.0;
    for (size_t k = 0; k + 1 < path.size(); ++k) {
        const auto [i0, j0] = path[k];
        const auto [i1, j1] = path[k + 1];
        const bool x_edge = (j0 == j1);
        const int ei = std::min(i0, i1), ej = std::min(j0, j1);
        const double sgn = x_edge ? (i1 > i0 ? 1.0 : -1.0) : (j1 > j0 ? 1.0 : -1.0);
        const double h = x_edge ? ft.hx : ft.hy;
        // Integrand g(t) = <eta_dir(t), (ft k)(t)> along the edge, where
        // eta_dir is the conormal of the coordinate direction traversed.
        const auto sample = [&](double xi) {
            Quaterniond eta, fkq;
            if (x_edge) {
                const auto rowE = [&](int q) -> const Quaterniond& { return etax(q, ej); };
                const auto rowK = [&](int q) -> const Quaterniond& { return fk(q, ej); };
                eta = interp_edge(rowE, ei, ft.nx, xi);
                fkq = interp_edge(rowK, ei, ft.nx, xi);
            } else {
                const auto colE = [&](int q) -> const Quaterniond& { return etay(ei, q); };
                const auto colK = [&](int q) -> const Quaterniond& { return fk(ei, q); };
                eta = interp_edge(colE, ej, ft.ny, xi);
                fkq = interp_edge(colK, ej, ft.ny, xi);
            }
            return dot(eta, fkq);
        };
        const double integral = 0.5 * h * (sample(kGauss1) + sample(kGauss2));
        p_cousin -= sgn * integral;
    }

    if (std::abs(p_direct - p_cousin) > tol.tau_period)
        throw Error("period: the two integral forms disagree by " +
                    std::to_string(std::abs(p_direct - p_cousin)) + " > tau_period " +
                    std::to_string(tol.tau_period));
    return p_direct;
}

} // namespace cousinlab
