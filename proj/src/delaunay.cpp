#include "cousinlab/delaunay.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "cousinlab/ode.hpp"

namespace cousinlab {

namespace {

void require_unduloid_necksize(double n) {
    if (!(n > 0.0) || !(n <= M_PI))
        throw Error("necksize must lie in (0, pi], got " + std::to_string(n));
}

double helicoid_speed_sq(double n, double x) {
    const double m = 2.0 * M_PI - n;
    const double c = std::cos(x), s = std::sin(x);
    return n * n * c * c + m * m * s * s;
}

} // namespace

Quaterniond helicoid_point(double n, double x, double y) {
    const Quaterniond p(std::cos(n * y), -std::sin(n * y), 0.0, 0.0);
    const Quaterniond u(0.0, 0.0, std::cos(2.0 * M_PI * y), std::sin(2.0 * M_PI * y));
    const Quaterniond ruling(std::cos(x), Eigen::Vector3d(u.v * std::sin(x)));
    return p * ruling;
}

Quaterniond helicoid_dx(double n, double x, double y) {
    const Quaterniond p(std::cos(n * y), -std::sin(n * y), 0.0, 0.0);
    const Quaterniond u(0.0, 0.0, std::cos(2.0 * M_PI * y), std::sin(2.0 * M_PI * y));
    const Quaterniond d(-std::sin(x), Eigen::Vector3d(u.v * std::cos(x)));
    return p * d;
}

ImmersionGrid spherical_helicoid(const HelicoidParams& params) {
    if (params.n == 0.0 || params.n == 2.0 * M_PI)
        throw Error("spherical helicoid is not immersed for n = 0 or n = 2 pi");
    if (params.nx < 3 || params.ny < 3) throw Error("spherical_helicoid: grid too small");

    double y_lo = params.y_min, y_hi = params.y_max;
    double clip = 0.0;
    int ny = params.ny;
    double hy;
    if (params.clip_y) {
        hy = (params.y_max - params.y_min) / static_cast<double>(ny);
        clip = hy / 2.0;
        y_lo = params.y_min + clip;
        y_hi = params.y_max - clip;
    } else {
        hy = (params.y_max - params.y_min) / static_cast<double>(ny - 1);
    }
    const double hx = (params.x_max - params.x_min) / static_cast<double>(params.nx - 1);

    ImmersionGrid g(Ambient::S3, params.nx, ny, hx, hy);
    g.x0 = params.x_min;
    g.y0 = y_lo;
    g.edge(GridSide::YMin) = {true, clip};
    g.edge(GridSide::YMax) = {true, clip};
    for (int i = 0; i < params.nx; ++i) {
        const double x = g.x_at(i);
        for (int j = 0; j < ny; ++j) {
            // The y axis is stored reversed: the cousin system orients the
            // integrated surface by d(ftilde) = ftilde (df o J), and this
            // labeling makes the R^3 cousin come out with mean curvature +1.
            const double y = y_hi - j * hy;
            g.at(i, j) = helicoid_point(params.n, x, y);
        }
    }
    return g;
}

ImmersionGrid helicoid_conformal_chart(double n, double h) {
    require_unduloid_necksize(n);
    if (!(h > 0.0)) throw Error("helicoid_conformal_chart: h must be positive");
    const double lambda = 2.0 * M_PI - n;

    // x(S) solves dx/dS = sqrt(g(x)) / lambda; one x-period in S.
    DormandPrince<1> stepper(
        [n, lambda](double, const Eigen::Matrix<double, 1, 1>& x) {
            Eigen::Matrix<double, 1, 1> d;
            d[0] = std::sqrt(helicoid_speed_sq(n, x[0])) / lambda;
            return d;
        },
        1e-12);

    // Total S over one period by integrating dS/dx = lambda / sqrt(g).
    double s_period = 0.0;
    {
        DormandPrince<1> quad(
            [n, lambda](double x, const Eigen::Matrix<double, 1, 1>&) {
                Eigen::Matrix<double, 1, 1> d;
                d[0] = lambda / std::sqrt(helicoid_speed_sq(n, x));
                return d;
            },
            1e-12);
        Eigen::Matrix<double, 1, 1> acc;
        acc[0] = 0.0;
        s_period = quad.integrate(0.0, acc, 2.0 * M_PI)[0];
    }

    const int nx = static_cast<int>(std::ceil(s_period / h)) + 1;
    const double hS = s_period / static_cast<double>(nx - 1);
    const double y_half = lambda / 4.0;
    const int ny_half = static_cast<int>(std::ceil(y_half / h));
    const int ny = 2 * ny_half + 1;
    const double hY = y_half / static_cast<double>(ny_half);

    // March x across the S nodes once.
    std::vector<double> xs(static_cast<size_t>(nx));
    Eigen::Matrix<double, 1, 1> x_state;
    x_state[0] = 0.0;
    xs[0] = 0.0;
    for (int i = 1; i < nx; ++i) {
        x_state = stepper.integrate((i - 1) * hS, x_state, i * hS);
        xs[static_cast<size_t>(i)] = x_state[0];
    }

    ImmersionGrid g(Ambient::S3, nx, ny, hS, hY);
    g.x0 = 0.0;
    g.y0 = -y_half;
    g.edge(GridSide::YMin) = {true, 0.0};
    g.edge(GridSide::YMax) = {true, 0.0};
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double y = (g.y0 + j * hY) / lambda;
            g.at(i, j) = helicoid_point(n, xs[static_cast<size_t>(i)], -y);
        }
    }
    return g;
}

namespace {

using State3 = Eigen::Matrix<double, 3, 1>; // (r, z, phi) in arclength s

State3 profile_rhs(const State3& y) {
    State3 d;
    d[0] = std::cos(y[2]);
    d[1] = std::sin(y[2]);
    d[2] = 2.0 - std::sin(y[2]) / y[0];
    return d;
}

} // namespace

UnduloidProfile unduloid_profile_oracle(double n, int samples) {
    require_unduloid_necksize(n);
    if (samples < 2) throw Error("unduloid_profile_oracle: need at least two samples");

    UnduloidProfile prof;
    prof.necksize = n;
    prof.neck_radius = n / (2.0 * M_PI);
    prof.bulge_radius = 1.0 - prof.neck_radius;

    DormandPrince<3> stepper([](double, const State3& y) { return profile_rhs(y); }, 1e-11);
    State3 y;
    y << prof.neck_radius, 0.0, M_PI / 2.0;

    const double s_end = M_PI; // one full period: neck -> bulge -> neck
    prof.s.resize(static_cast<size_t>(samples));
    prof.r.resize(static_cast<size_t>(samples));
    prof.z.resize(static_cast<size_t>(samples));
    prof.phi.resize(static_cast<size_t>(samples));
    double s_prev = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double s = s_end * static_cast<double>(k) / static_cast<double>(samples - 1);
        if (k > 0) y = stepper.integrate(s_prev, y, s);
        s_prev = s;
        prof.s[static_cast<size_t>(k)] = s;
        prof.r[static_cast<size_t>(k)] = y[0];
        prof.z[static_cast<size_t>(k)] = y[1];
        prof.phi[static_cast<size_t>(k)] = y[2];
    }
    return prof;
}

double unduloid_sigma_bulge(double n) {
    require_unduloid_necksize(n);
    // d sigma / ds = 1 / r alongside the profile system.
    DormandPrince<4> stepper(
        [](double, const Eigen::Matrix<double, 4, 1>& y) {
            Eigen::Matrix<double, 4, 1> d;
            const State3 p = profile_rhs(y.head<3>());
            d.head<3>() = p;
            d[3] = 1.0 / y[0];
            return d;
        },
        1e-11);
    Eigen::Matrix<double, 4, 1> y;
    y << n / (2.0 * M_PI), 0.0, M_PI / 2.0, 0.0;
    return stepper.integrate(0.0, y, M_PI / 2.0)[3];
}

ImmersionGrid unduloid_chart(double n, double h_sigma, double h_theta, double over_bulge) {
    require_unduloid_necksize(n);
    const double sigma_b = unduloid_sigma_bulge(n);

    // Put the bulge exactly on a node and keep the grid symmetric about the
    // neck; the profile symmetry r(-s) = r(s), z(-s) = -z(s) is mirrored
    // bit for bit.
    const int k_bulge = std::max(1, static_cast<int>(std::round(sigma_b / h_sigma)));
    const double hs = sigma_b / static_cast<double>(k_bulge);
    const int half = static_cast<int>(std::ceil(over_bulge * k_bulge));
    const int nx = 2 * half + 1;

    const int ny = std::max(5, static_cast<int>(std::round(M_PI / h_theta)) + 1);
    const double ht = M_PI / static_cast<double>(ny - 1);

    // State (r, z, phi, s) as a function of sigma.
    DormandPrince<4> stepper(
        [](double, const Eigen::Matrix<double, 4, 1>& y) {
            Eigen::Matrix<double, 4, 1> d;
            const double r = y[0], phi = y[2];
            d[0] = r * std::cos(phi);
            d[1] = r * std::sin(phi);
            d[2] = 2.0 * r - std::sin(phi);
            d[3] = r;
            return d;
        },
        1e-11);

    std::vector<double> rr(static_cast<size_t>(nx)), zz(static_cast<size_t>(nx));
    Eigen::Matrix<double, 4, 1> y;
    y << n / (2.0 * M_PI), 0.0, M_PI / 2.0, 0.0;
    rr[static_cast<size_t>(half)] = y[0];
    zz[static_cast<size_t>(half)] = y[1];
    for (int k = 1; k <= half; ++k) {
        y = stepper.integrate((k - 1) * hs, y, k * hs);
        rr[static_cast<size_t>(half + k)] = y[0];
        zz[static_cast<size_t>(half + k)] = y[1];
        rr[static_cast<size_t>(half - k)] = y[0];
        zz[static_cast<size_t>(half - k)] = -y[1];
    }

    ImmersionGrid g(Ambient::R3, nx, ny, hs, ht);
    g.x0 = -half * hs;
    g.y0 = 0.0;
    g.edge(GridSide::YMin) = {true, 0.0};
    g.edge(GridSide::YMax) = {true, 0.0};
    for (int i = 0; i < nx; ++i) {
        const double r = rr[static_cast<size_t>(i)], z = zz[static_cast<size_t>(i)];
        for (int j = 0; j < ny; ++j) {
            const double th = j * ht;
            g.at(i, j) = Quaterniond::imaginary({z, r * std::cos(th), r * std::sin(th)});
        }
    }
    return g;
}

namespace {

// Center of a circle through (nearly) coplanar samples: plane by PCA, then
// an algebraic least-squares circle fit within the plane.  Exact for exact
// circle samples regardless of arc coverage.
Eigen::Vector3d fit_circle_center(const std::vector<Eigen::Vector3d>& pts) {
    if (pts.size() < 3) throw Error("fit_circle_center: need at least 3 points");
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& p : pts) mean += p;
    mean /= static_cast<double>(pts.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    const Eigen::Vector3d normal = eig.eigenvectors().col(0);
    const Eigen::Vector3d e1 = eig.eigenvectors().col(2);
    const Eigen::Vector3d e2 = normal.cross(e1);

    // Kasa fit: minimize |(u, v) . (2a, 2b) + c - (u^2 + v^2)|.
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d b = Eigen::Vector3d::Zero();
    for (const auto& p : pts) {
        const Eigen::Vector3d q = p - mean;
        const double u = q.dot(e1), v = q.dot(e2);
        const Eigen::Vector3d row(2.0 * u, 2.0 * v, 1.0);
        A += row * row.transpose();
        b += row * (u * u + v * v);
    }
    const Eigen::Vector3d sol = A.ldlt().solve(b);
    return mean + sol[0] * e1 + sol[1] * e2;
}

} // namespace

CousinPair generate_unduloid(double n, int nx, int ny, const Tolerances& tol) {
    require_unduloid_necksize(n);
    if (nx == 0) {
        const double stretch = std::max(1.0, M_PI / (2.0 * n));
        const int quarters = static_cast<int>(std::ceil(100.0 * stretch));
        nx = 4 * quarters + 1;
    }
    if (ny == 0) ny = 201;
    if (nx < 9 || (nx - 1) % 4 != 0)
        throw Error("generate_unduloid: nx must be 4k+1 so that neck and bulge rulings "
                    "land on grid nodes");

    HelicoidParams params;
    params.n = n;
    params.nx = nx;
    params.ny = ny;
    const ImmersionGrid helicoid = spherical_helicoid(params);
    CousinPair pair = integrate_to_r3(helicoid, tol);

    // Neck rulings sit at x = 0 and x = pi.
    const int i_neck0 = 0;
    const int i_neck1 = (nx - 1) / 2;
    std::vector<Eigen::Vector3d> neck0, neck1;
    for (int j = 0; j < ny; ++j) {
        neck0.push_back(pair.f.at(i_neck0, j).v);
        neck1.push_back(pair.f.at(i_neck1, j).v);
    }
    const Eigen::Vector3d c0 = fit_circle_center(neck0);
    const Eigen::Vector3d c1 = fit_circle_center(neck1);
    const Eigen::Vector3d axis = (c1 - c0).normalized();

    // Mirror normal from the two boundary rows; sign chosen so the surface
    // interior lies on the positive side.
    std::vector<Eigen::Vector3d> rim;
    Eigen::Vector3d rim_mean = Eigen::Vector3d::Zero();
    for (int i = 0; i < nx; ++i) {
        rim.push_back(pair.f.at(i, 0).v);
        rim.push_back(pair.f.at(i, ny - 1).v);
    }
    for (const auto& p : rim) rim_mean += p;
    rim_mean /= static_cast<double>(rim.size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : rim) cov += (p - rim_mean) * (p - rim_mean).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    Eigen::Vector3d up = eig.eigenvectors().col(0);
    up -= up.dot(axis) * axis;
    up.normalize();
    const Eigen::Vector3d mid = pair.f.at(i_neck1 / 2, ny / 2).v;
    if ((mid - rim_mean).dot(up) < 0.0) up = -up;

    // Rows a, up x a, up map (axis, up) to (i, k).
    Eigen::Matrix3d R;
    R.row(0) = axis.transpose();
    R.row(1) = up.cross(axis).transpose();
    R.row(2) = up.transpose();
    const Eigen::Quaterniond eq(R);
    const Quaterniond a(eq.w(), eq.x(), eq.y(), eq.z());
    const Quaterniond a_unit = normalized(a);

    for (auto& q : pair.f.values) {
        const Eigen::Vector3d moved = R * (q.v - c0);
        q = Quaterniond::imaginary(moved);
    }
    for (auto& q : pair.ftilde.values) q = rotate_by(a_unit, q);
    return pair;
}

std::vector<Quaterniond> boundary_fiber_samples(const ImmersionGrid& g, GridSide side) {
    const BoundaryEdge& e = g.edge(side);
    BoundaryCurve curve = boundary_curve(g, side);
    if (curve.nodes.size() < 5)
        throw Error("boundary_fiber_samples: side has too few nodes to classify");
    // Corner nodes are shared with the adjacent sides; they belong to the
    // closure of two boundary components at once and are dropped from the
    // fiber samples.
    curve.nodes.erase(curve.nodes.begin());
    curve.nodes.pop_back();
    std::vector<Quaterniond> out;
    out.reserve(curve.nodes.size());
    const bool y_side = (side == GridSide::YMin || side == GridSide::YMax);
    const double h = y_side ? g.hy : g.hx;
    const double t = -e.clip_offset / h; // extrapolation parameter, 0 on row 0
    const double w0 = (t - 1.0) * (t - 2.0) / 2.0;
    const double w1 = -t * (t - 2.0);
    const double w2 = t * (t - 1.0) / 2.0;
    for (const auto& [i, j] : curve.nodes) {
        Quaterniond q;
        if (e.clip_offset == 0.0) {
            q = g.at(i, j);
        } else if (side == GridSide::YMin) {
            q = g.at(i, 0) * w0 + g.at(i, 1) * w1 + g.at(i, 2) * w2;
        } else if (side == GridSide::YMax) {
            q = g.at(i, g.ny - 1) * w0 + g.at(i, g.ny - 2) * w1 + g.at(i, g.ny - 3) * w2;
        } else if (side == GridSide::XMin) {
            q = g.at(0, j) * w0 + g.at(1, j) * w1 + g.at(2, j) * w2;
        } else {
            q = g.at(g.nx - 1, j) * w0 + g.at(g.nx - 2, j) * w1 + g.at(g.nx - 3, j) * w2;
        }
        if (g.ambient == Ambient::S3) q = normalized(q);
        out.push_back(q);
    }
    return out;
}

SpherePoint hopf_cluster_point(const std::vector<Quaterniond>& fiber, double radius_limit,
                               const char* what) {
    const Quaterniond k_dir(0.0, 0.0, 0.0, 1.0);
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    std::vector<Eigen::Vector3d> proj;
    proj.reserve(fiber.size());
    for (const auto& q : fiber) {
        const Quaterniond img = hopf_project_raw(k_dir, q);
        proj.push_back(img.v);
        mean += img.v;
    }
    if (mean.norm() < 1e-12) throw Error(std::string(what) + ": projection has no centroid");
    mean.normalize();
    double radius = 0.0;
    for (const auto& p : proj) radius = std::max(radius, sphere_distance(mean, p));
    if (radius > radius_limit)
        throw Error(std::string(what) + ": boundary is not a Hopf fiber (projection cluster "
                                        "radius " +
                    std::to_string(radius) + " > " + std::to_string(radius_limit) + ")");
    return SpherePoint(mean);
}

std::pair<SpherePoint, SpherePoint> boundary_hopf_points(const CousinPair& pair) {
    const ImmersionGrid& ft = pair.ftilde;
    if (ft.ambient != Ambient::S3) throw Error("boundary_hopf_points: pair has no S3 grid");
    const auto lo = boundary_fiber_samples(ft, GridSide::YMin);
    const auto hi = boundary_fiber_samples(ft, GridSide::YMax);
    return {hopf_cluster_point(lo, 1e-4, "boundary_hopf_points"),
            hopf_cluster_point(hi, 1e-4, "boundary_hopf_points")};
}

ParallelExtrema measure_parallel_extrema(const ImmersionGrid& g) {
    if (g.ambient != Ambient::R3)
        throw Error("measure_parallel_extrema expects an R3 grid");
    if (g.ny < 3 || g.nx < 3) throw Error("measure_parallel_extrema: grid too small");

    const double span = (g.ny - 1) * g.hy;
    const double full = span + g.edge(GridSide::YMin).clip_offset +
                        g.edge(GridSide::YMax).clip_offset;
    const double scale = full / span;

    std::vector<double> len(static_cast<size_t>(g.nx), 0.0);
    for (int i = 0; i < g.nx; ++i) {
        double L = 0.0;
        for (int j = 0; j + 1 < g.ny; ++j) L += norm(g.at(i, j + 1) - g.at(i, j));
        len[static_cast<size_t>(i)] = 2.0 * L * scale;
    }

    ParallelExtrema out;
    double best_min = std::numeric_limits<double>::infinity();
    double best_max = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < g.nx; ++i) {
        const double l = len[static_cast<size_t>(i)];
        if (l < len[static_cast<size_t>(i - 1)] && l <= len[static_cast<size_t>(i + 1)] &&
            l < best_min) {
            best_min = l;
            out.neck_index = i;
        }
        if (l > len[static_cast<size_t>(i - 1)] && l >= len[static_cast<size_t>(i + 1)] &&
            l > best_max) {
            best_max = l;
            out.bulge_index = i;
        }
    }
    const auto refine = [&](int i) {
        const double lm = len[static_cast<size_t>(i - 1)], l0 = len[static_cast<size_t>(i)],
                     lp = len[static_cast<size_t>(i + 1)];
        const double denom = lp - 2.0 * l0 + lm;
        if (std::abs(denom) < 1e-300) return l0;
        return l0 - (lp - lm) * (lp - lm) / (8.0 * denom);
    };
    if (out.neck_index >= 0) out.neck = refine(out.neck_index);
    if (out.bulge_index >= 0) out.bulge = refine(out.bulge_index);
    return out;
}

double measure_necksize(const ImmersionGrid& g) {
    const ParallelExtrema e = measure_parallel_extrema(g);
    if (e.neck_index < 0)
        throw Error("measure_necksize: parallel lengths have no interior minimum");
    return e.neck;
}

} // namespace cousinlab
