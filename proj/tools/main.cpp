// cousinlab command-line tool: generators, cousin integration, boundary
// classification, necksize/force arithmetic, sheeted spherical metrics.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "cousinlab/cousin.hpp"
#include "cousinlab/delaunay.hpp"
#include "cousinlab/devmap.hpp"
#include "cousinlab/differential.hpp"
#include "cousinlab/io.hpp"
#include "cousinlab/moduli.hpp"

namespace cl = cousinlab;
using cl::json;

namespace {

struct Output {
    std::string report_path;
    bool timings = false;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    int finish(json& report, bool ok) const {
        report["pass"] = ok;
        if (timings) {
            const auto dt = std::chrono::steady_clock::now() - t0;
            report["wall_time_ms"] =
                std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
        }
        const std::string text = report.dump(2) + "\n";
        if (!report_path.empty())
            cl::write_text_file(report_path, text);
        else
            std::cout << text;
        return ok ? 0 : 1;
    }
};

void add_output_options(CLI::App* cmd, Output& out) {
    cmd->add_option("--report", out.report_path, "write the JSON report to this file");
    cmd->add_flag("--timings", out.timings,
                  "include wall time in the report (off by default; reports are "
                  "byte-deterministic without it)");
}

void add_tolerance_options(CLI::App* cmd, cl::Tolerances& tol) {
    cmd->add_option("--tau-cmc", tol.tau_cmc, "accepted CMC residual for integrator input");
    cmd->add_option("--tau-min", tol.tau_min, "accepted minimality residual");
    cmd->add_option("--tau-isom", tol.tau_isom, "accepted cousin metric deviation");
    cmd->add_option("--tau-loop-factor", tol.tau_loop_factor,
                    "integrability threshold factor (tau_loop = factor * h^2)");
    cmd->add_option("--tau-period", tol.tau_period, "agreement of the two period integrals");
    cmd->add_option("--tau-conf", tol.tau_conf, "relative conformality defect");
    cmd->add_option("--rho-cluster", tol.rho_cluster, "Hopf fiber cluster radius");
    cmd->add_option("--eps-unit", tol.eps_unit, "unit-norm validation tolerance");
}

std::vector<double> parse_csv_doubles(const std::string& text, size_t expected,
                                      const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.size() != expected)
        throw cl::Error(std::string(what) + ": expected " + std::to_string(expected) +
                        " comma-separated values");
    return out;
}

// Values typed as decimal roundings of pi (e.g. 3.1416) mean a cylindrical
// end; snap them so they land inside the (0, pi] domain.
std::vector<double> parse_necksizes(const std::string& text, const char* what) {
    std::vector<double> v = parse_csv_doubles(text, 3, what);
    for (double& x : v)
        if (std::abs(x - M_PI) <= 1e-4) x = M_PI;
    return v;
}

json vec3_json(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

void require_valid_config(const cl::Tolerances& tol, int nx, int ny) {
    for (const double t : {tol.eps_unit, tol.tau_conf, tol.tau_cmc, tol.tau_min,
                           tol.tau_isom, tol.tau_loop_factor, tol.tau_period,
                           tol.rho_cluster}) {
        if (!(t > 0.0)) throw cl::Error("overridden tolerances must be positive");
    }
    if ((nx != 0 && nx < 16) || (ny != 0 && ny < 16))
        throw cl::Error("resolution must be at least 16x16 nodes");
}

json triple_record(const cl::SphericalTriple& t) {
    const cl::NecksizeVector n = cl::triple_distances(t);
    const cl::CanonicalTripleCoords c = cl::canonicalize_triple(t);
    const cl::AdmissibilityVerdict v = cl::check_necksize_inequalities(n);
    json j;
    j["p1"] = vec3_json(t.p1.vec());
    j["p2"] = vec3_json(t.p2.vec());
    j["p3"] = vec3_json(t.p3.vec());
    j["canonical"] = {{"latitude", c.latitude}, {"lon2", c.lon2}, {"lon3", c.lon3}};
    j["necksizes"] = json::array({n.n1, n.n2, n.n3});
    j["admissible"] = v.admissible;
    j["margins"] = json::array({v.slacks[0], v.slacks[1], v.slacks[2], v.slacks[3]});
    return j;
}

struct UnduloidRun {
    json report;
    bool ok = true;
};

UnduloidRun run_unduloid(double n, int nx, int ny, const cl::Tolerances& tol,
                         cl::CousinPair* keep = nullptr) {
    UnduloidRun r;
    cl::CousinPair pair = cl::generate_unduloid(n, nx, ny, tol);
    const cl::ParallelExtrema ext = cl::measure_parallel_extrema(pair.f);
    const auto pts = cl::boundary_hopf_points(pair);
    const double hopf_dist = cl::sphere_distance(pts.first, pts.second);

    const double neck_tol = 1e-3, hopf_tol = 1e-4;
    r.report["necksize"] = n;
    r.report["resolution"] = {{"nx", pair.f.nx}, {"ny", pair.f.ny}};
    r.report["loop_residual_max"] = pair.loop_residual_max;
    r.report["isometry_error"] = {{"value", pair.isometry_error},
                                  {"tolerance", tol.tau_isom}};
    r.report["drift_log"] = pair.drift_log;
    r.report["base_point"] = json::array({pair.base_point.first, pair.base_point.second});
    r.report["neck_circumference"] = {{"value", ext.neck},
                                      {"expected", n},
                                      {"tolerance", neck_tol}};
    r.report["bulge_circumference"] = {{"value", ext.bulge},
                                       {"expected", 2.0 * M_PI - n},
                                       {"tolerance", neck_tol}};
    r.report["hopf_distance"] = {{"value", hopf_dist},
                                 {"expected", n},
                                 {"tolerance", hopf_tol}};
    r.ok = std::abs(ext.neck - n) <= neck_tol &&
           std::abs(ext.bulge - (2.0 * M_PI - n)) <= neck_tol &&
           std::abs(hopf_dist - n) <= hopf_tol;
    if (keep) *keep = std::move(pair);
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical toolkit for CMC surfaces, their minimal cousins in S^3, "
                 "Hopf-projection classification, and sheeted spherical metrics"};
    app.require_subcommand(1);

    // gen-unduloid ---------------------------------------------------------
    double necksize = M_PI / 2.0;
    int nx = 0, ny = 0;
    std::string out_obj, out_grid_r3, out_grid_s3, out_profile;
    cl::Tolerances tol_u;
    Output out_u;
    auto* gen_und = app.add_subcommand("gen-unduloid",
                                       "generate a half-unduloid and its minimal cousin");
    gen_und->add_option("--necksize", necksize, "necksize in (0, pi]")->required();
    gen_und->add_option("--nx", nx, "nodes across one x period (4k+1; 0 = auto)");
    gen_und->add_option("--ny", ny, "nodes across the y interval (0 = auto)");
    gen_und->add_option("--out", out_obj, "OBJ export of the R^3 half-unduloid");
    gen_und->add_option("--grid-r3", out_grid_r3, "grid JSON export of the R^3 half");
    gen_und->add_option("--grid-s3", out_grid_s3, "grid JSON export of the S^3 cousin");
    gen_und->add_option("--profile", out_profile, "CSV export of the profile oracle");
    add_tolerance_options(gen_und, tol_u);
    add_output_options(gen_und, out_u);

    // gen-helicoid ---------------------------------------------------------
    double heli_n = M_PI / 2.0, heli_h = 0.005, max_residual = 1e-4;
    bool conformal = false;
    int heli_nx = 401, heli_ny = 201;
    std::string heli_grid;
    Output out_h;
    auto* gen_heli = app.add_subcommand("gen-helicoid", "sample a spherical helicoid");
    gen_heli->add_option("--necksize", heli_n, "necksize in (0, pi]")->required();
    gen_heli->add_flag("--conformal", conformal,
                       "emit the isothermal chart instead of the native parametrization");
    gen_heli->add_option("--spacing", heli_h, "grid spacing of the conformal chart");
    gen_heli->add_option("--nx", heli_nx, "native-chart nodes in x");
    gen_heli->add_option("--ny", heli_ny, "native-chart nodes in y");
    gen_heli->add_option("--max-residual", max_residual,
                         "minimality residual accepted for the conformal chart");
    gen_heli->add_option("--grid", heli_grid, "grid JSON output path");
    add_output_options(gen_heli, out_h);

    // cousin ---------------------------------------------------------------
    std::string cousin_in, cousin_out_r3, cousin_out_s3, order_name = "row";
    cl::Tolerances tol_c;
    Output out_c;
    auto* cousin_cmd = app.add_subcommand("cousin", "integrate the cousin system");
    cousin_cmd->add_option("--in", cousin_in, "input grid JSON (R3 or S3)")->required();
    cousin_cmd->add_option("--order", order_name, "spanning tree order: row or column");
    cousin_cmd->add_option("--out-r3", cousin_out_r3, "write the R^3 grid");
    cousin_cmd->add_option("--out-s3", cousin_out_s3, "write the S^3 grid");
    add_tolerance_options(cousin_cmd, tol_c);
    add_output_options(cousin_cmd, out_c);

    // classify -------------------------------------------------------------
    std::string classify_in, classify_out;
    cl::Tolerances tol_cls;
    Output out_cls;
    auto* classify_cmd =
        app.add_subcommand("classify", "Hopf-project the boundary fibers of a cousin grid");
    classify_cmd->add_option("--in", classify_in, "S3 cousin grid JSON")->required();
    classify_cmd->add_option("--out", classify_out, "triple/point-pair JSON output");
    add_tolerance_options(classify_cmd, tol_cls);
    add_output_options(classify_cmd, out_cls);

    // necksizes --------------------------------------------------------------
    std::string neck_values, neck_triple;
    Output out_n;
    auto* neck_cmd = app.add_subcommand(
        "necksizes", "spherical triangle inequalities and triple distances");
    neck_cmd->add_option("--values", neck_values, "n1,n2,n3 to test for admissibility");
    neck_cmd->add_option("--triple", neck_triple,
                         "lat,lon2,lon3 canonical coordinates of a triple");
    add_output_options(neck_cmd, out_n);

    // forces -----------------------------------------------------------------
    std::string force_necksizes;
    Output out_f;
    auto* force_cmd =
        app.add_subcommand("forces", "end weights and balanced axis directions");
    force_cmd->add_option("--necksizes", force_necksizes, "n1,n2,n3")->required();
    add_output_options(force_cmd, out_f);

    // devmap -----------------------------------------------------------------
    std::string devmap_triple, devmap_query, devmap_out;
    int devmap_depth = 1;
    Output out_d;
    auto* devmap_cmd = app.add_subcommand(
        "devmap", "three-point spherical metric as a triangle with rays of slit spheres");
    devmap_cmd->add_option("--triple", devmap_triple, "lat,lon2,lon3")->required();
    devmap_cmd->add_option("--depth", devmap_depth, "slit spheres per ray");
    devmap_cmd->add_option("--query-degree", devmap_query,
                           "lon,lat of a point to evaluate the developing degree at");
    devmap_cmd->add_option("--out", devmap_out, "cells/gluings JSON output");
    add_output_options(devmap_cmd, out_d);

    // sweep ------------------------------------------------------------------
    double sweep_min = 0.1 * M_PI, sweep_max = M_PI;
    int sweep_count = 10, sweep_nx = 201, sweep_ny = 101;
    cl::Tolerances tol_s;
    Output out_s;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "unduloid pipeline over a range of necksizes (worker pool honors "
                 "COUSINLAB_THREADS)");
    sweep_cmd->add_option("--necksize-min", sweep_min, "first necksize");
    sweep_cmd->add_option("--necksize-max", sweep_max, "last necksize");
    sweep_cmd->add_option("--count", sweep_count, "number of samples");
    sweep_cmd->add_option("--nx", sweep_nx, "nodes across one x period (4k+1)");
    sweep_cmd->add_option("--ny", sweep_ny, "nodes across the y interval");
    add_tolerance_options(sweep_cmd, tol_s);
    add_output_options(sweep_cmd, out_s);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_und->parsed()) {
            require_valid_config(tol_u, nx, ny);
            cl::CousinPair pair;
            UnduloidRun r = run_unduloid(necksize, nx, ny, tol_u, &pair);
            if (!out_obj.empty()) cl::export_obj(pair.f, out_obj);
            if (!out_grid_r3.empty()) cl::save_grid(pair.f, out_grid_r3);
            if (!out_grid_s3.empty()) cl::save_grid(pair.ftilde, out_grid_s3);
            if (!out_profile.empty())
                cl::export_profile_csv(cl::unduloid_profile_oracle(necksize), out_profile);
            return out_u.finish(r.report, r.ok);
        }
        if (gen_heli->parsed()) {
            require_valid_config(cl::Tolerances{}, conformal ? 0 : heli_nx,
                                 conformal ? 0 : heli_ny);
            json report;
            bool ok = true;
            cl::ImmersionGrid g(cl::Ambient::S3, 2, 2, 1, 1);
            if (conformal) {
                g = cl::helicoid_conformal_chart(heli_n, heli_h);
                const double res = cl::interior_max(cl::minimal_residual_s3(g));
                report["minimal_residual"] = {{"value", res}, {"tolerance", max_residual}};
                ok = res <= max_residual;
            } else {
                cl::HelicoidParams p;
                p.n = heli_n;
                p.nx = heli_nx;
                p.ny = heli_ny;
                g = cl::spherical_helicoid(p);
            }
            report["necksize"] = heli_n;
            report["parametrization"] = conformal ? "conformal" : "orthogonal";
            report["resolution"] = {{"nx", g.nx}, {"ny", g.ny}};
            report["hx"] = g.hx;
            report["hy"] = g.hy;
            if (!heli_grid.empty()) cl::save_grid(g, heli_grid);
            return out_h.finish(report, ok);
        }
        if (cousin_cmd->parsed()) {
            const cl::ImmersionGrid g = cl::load_grid(cousin_in);
            const cl::IntegrationOrder order = (order_name == "column")
                                                   ? cl::IntegrationOrder::ColumnMajor
                                                   : cl::IntegrationOrder::RowMajor;
            const cl::CousinPair pair = (g.ambient == cl::Ambient::R3)
                                            ? cl::integrate_to_s3(g, tol_c, order)
                                            : cl::integrate_to_r3(g, tol_c, order);
            json report;
            report["direction"] = g.ambient == cl::Ambient::R3 ? "to-s3" : "to-r3";
            report["loop_residual_max"] = pair.loop_residual_max;
            report["isometry_error"] = {{"value", pair.isometry_error},
                                        {"tolerance", tol_c.tau_isom}};
            report["drift_log"] = pair.drift_log;
            report["base_point"] = json::array({pair.base_point.first,
                                                pair.base_point.second});
            if (!cousin_out_r3.empty()) cl::save_grid(pair.f, cousin_out_r3);
            if (!cousin_out_s3.empty()) cl::save_grid(pair.ftilde, cousin_out_s3);
            return out_c.finish(report, true);
        }
        if (classify_cmd->parsed()) {
            const cl::ImmersionGrid g = cl::load_grid(classify_in);
            const cl::BoundaryClassification cls = cl::classify_boundary(g, tol_cls);
            json report;
            json pts = json::array();
            for (const auto& p : cls.points) pts.push_back(vec3_json(p.vec()));
            report["points"] = pts;
            if (cls.triple) {
                report["triple"] = triple_record(*cls.triple);
            } else {
                report["distance"] =
                    cl::sphere_distance(cls.points.at(0), cls.points.at(1));
            }
            if (!classify_out.empty())
                cl::write_text_file(classify_out, report.dump(2) + "\n");
            return out_cls.finish(report, true);
        }
        if (neck_cmd->parsed()) {
            json report;
            bool ok = true;
            if (!neck_values.empty()) {
                const auto v = parse_necksizes(neck_values, "--values");
                const cl::NecksizeVector n{v[0], v[1], v[2]};
                const cl::AdmissibilityVerdict verdict = cl::check_necksize_inequalities(n);
                report["necksizes"] = json::array({n.n1, n.n2, n.n3});
                report["admissible"] = verdict.admissible;
                report["margin"] = verdict.margin;
                report["slacks"] = json::array({verdict.slacks[0], verdict.slacks[1],
                                                verdict.slacks[2], verdict.slacks[3]});
                ok = verdict.admissible;
            } else if (!neck_triple.empty()) {
                const auto v = parse_csv_doubles(neck_triple, 3, "--triple");
                const cl::SphericalTriple t =
                    cl::triple_from_canonical({v[0], v[1], v[2]});
                report = triple_record(t);
                ok = report["admissible"].get<bool>();
            } else {
                throw cl::Error("necksizes: pass --values or --triple");
            }
            return out_n.finish(report, ok);
        }
        if (force_cmd->parsed()) {
            const auto v = parse_necksizes(force_necksizes, "--necksizes");
            const cl::NecksizeVector n{v[0], v[1], v[2]};
            const cl::ForceBalance fb = cl::axis_angles_from_necksizes(n);
            json report;
            report["necksizes"] = json::array({n.n1, n.n2, n.n3});
            report["weights"] = json::array(
                {fb.system.weights[0], fb.system.weights[1], fb.system.weights[2]});
            json axes = json::array();
            for (const auto& a : fb.system.axes) axes.push_back(vec3_json(a));
            report["axes"] = axes;
            report["axis_angles"] =
                json::array({fb.angles[0], fb.angles[1], fb.angles[2]});
            report["balance_residual"] = fb.system.net().norm();
            return out_f.finish(report, fb.system.net().norm() <= 1e-10);
        }
        if (devmap_cmd->parsed()) {
            const auto v = parse_csv_doubles(devmap_triple, 3, "--triple");
            const cl::SphericalTriple t = cl::triple_from_canonical({v[0], v[1], v[2]});
            const cl::SheetedMetric m = cl::three_point_metric(t, devmap_depth);
            json report;
            report["triple"] = triple_record(t);
            report["depth"] = devmap_depth;
            report["cells"] = m.cells.size();
            report["triangle_area"] = cl::triangle_area(t);
            report["total_area"] = m.total_area();
            report["completion_boundary_length"] = m.completion_boundary_length();
            if (!devmap_query.empty()) {
                const auto q = parse_csv_doubles(devmap_query, 2, "--query-degree");
                const double lon = q[0], lat = q[1];
                const cl::SpherePoint qp(Eigen::Vector3d(
                    std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon),
                    std::sin(lat)));
                report["query"] = {{"lon", lon}, {"lat", lat}};
                report["degree"] = cl::developing_degree(m, qp);
            }
            if (!devmap_out.empty()) {
                json cells = json::array();
                for (const auto& c : m.cells) {
                    json jc;
                    jc["kind"] = c.kind == cl::CellKind::SlitSphere
                                     ? "slit-sphere"
                                     : (c.kind == cl::CellKind::Hemisphere ? "hemisphere"
                                                                           : "triangle");
                    json arcs = json::array();
                    for (const auto& a : c.arcs)
                        arcs.push_back({{"start", vec3_json(a.arc.start())},
                                        {"end", vec3_json(a.arc.end())},
                                        {"pole", vec3_json(a.arc.pole())},
                                        {"length", a.arc.length()},
                                        {"glued", a.glued},
                                        {"truncation", a.truncation}});
                    jc["arcs"] = arcs;
                    cells.push_back(jc);
                }
                json dump;
                dump["cells"] = cells;
                json gl = json::array();
                for (const auto& g : m.gluings)
                    gl.push_back(json::array({g.cell_a, g.arc_a, g.cell_b, g.arc_b}));
                dump["gluings"] = gl;
                cl::write_text_file(devmap_out, dump.dump(2) + "\n");
            }
            return out_d.finish(report, true);
        }
        if (sweep_cmd->parsed()) {
            require_valid_config(tol_s, sweep_nx, sweep_ny);
            if (sweep_count < 1) throw cl::Error("sweep: count must be positive");
            std::vector<double> ns(static_cast<size_t>(sweep_count));
            for (int k = 0; k < sweep_count; ++k) {
                ns[static_cast<size_t>(k)] =
                    sweep_count == 1
                        ? sweep_min
                        : sweep_min + (sweep_max - sweep_min) * k / (sweep_count - 1);
            }
            unsigned hw = std::max(1u, std::thread::hardware_concurrency());
            if (const char* env = std::getenv("COUSINLAB_THREADS")) {
                const int cap = std::atoi(env);
                if (cap > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
            }
            hw = std::max(1u, std::min<unsigned>(hw, static_cast<unsigned>(sweep_count)));

            std::vector<json> results(ns.size());
            std::vector<char> oks(ns.size(), 1);
            std::atomic<size_t> next{0};
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < hw; ++w) {
                pool.emplace_back([&]() {
                    for (size_t k = next.fetch_add(1); k < ns.size();
                         k = next.fetch_add(1)) {
                        try {
                            UnduloidRun r = run_unduloid(ns[k], sweep_nx, sweep_ny, tol_s);
                            results[k] = std::move(r.report);
                            oks[k] = r.ok ? 1 : 0;
                        } catch (const std::exception& e) {
                            results[k] = {{"necksize", ns[k]}, {"error", e.what()}};
                            oks[k] = 0;
                        }
                    }
                });
            }
            for (auto& t : pool) t.join();

            json report;
            report["count"] = sweep_count;
            json samples = json::array();
            bool all_ok = true;
            for (size_t k = 0; k < ns.size(); ++k) {
                samples.push_back(results[k]);
                all_ok = all_ok && oks[k];
            }
            report["samples"] = samples;
            return out_s.finish(report, all_ok);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
