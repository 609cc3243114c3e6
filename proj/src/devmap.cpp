#include "cousinlab/devmap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace cousinlab {

namespace {

double wrap_2pi(double t) {
    t = std::fmod(t, 2.0 * M_PI);
    if (t < 0.0) t += 2.0 * M_PI;
    return t;
}

bool near(const Eigen::Vector3d& a, const Eigen::Vector3d& b, double eps = 1e-9) {
    return (a - b).norm() <= eps;
}

} // namespace

GreatArc::GreatArc(const SpherePoint& a, const SpherePoint& b, const Eigen::Vector3d& pole)
    : a_(a.vec()), b_(b.vec()), pole_(pole.normalized()) {
    if (std::abs(pole_.dot(a_)) > 1e-9 || std::abs(pole_.dot(b_)) > 1e-9)
        throw Error("GreatArc: pole is not orthogonal to the endpoints");
    const Eigen::Vector3d b_perp = b_ - b_.dot(pole_) * pole_;
    const double az = std::atan2(pole_.dot(a_.cross(b_perp)), a_.dot(b_perp));
    length_ = wrap_2pi(az);
    if (length_ < 1e-12)
        throw Error("GreatArc: endpoints coincide along the traversal direction");
}

GreatArc GreatArc::minimizing(const SpherePoint& a, const SpherePoint& b) {
    const Eigen::Vector3d cr = a.vec().cross(b.vec());
    if (cr.norm() < 1e-12)
        throw Error("GreatArc::minimizing: endpoints are antipodal or equal; the arc is "
                    "not unique");
    return GreatArc(a, b, cr.normalized());
}

Eigen::Vector3d GreatArc::point_at(double s) const {
    const Eigen::Vector3d t = pole_.cross(a_);
    return a_ * std::cos(s) + t * std::sin(s);
}

Eigen::Vector3d GreatArc::tangent_at(double s) const {
    const Eigen::Vector3d t = pole_.cross(a_);
    return -a_ * std::sin(s) + t * std::cos(s);
}

bool GreatArc::contains(const Eigen::Vector3d& q, double eps) const {
    if (std::abs(q.dot(pole_)) > eps) return false;
    const Eigen::Vector3d q_plane = q - q.dot(pole_) * pole_;
    if (q_plane.norm() < 1e-14) return false;
    const Eigen::Vector3d qp = q_plane.normalized();
    const double az = wrap_2pi(std::atan2(pole_.dot(a_.cross(qp)), a_.dot(qp)));
    return az <= length_ + eps || az >= 2.0 * M_PI - eps;
}

GreatArc GreatArc::reversed() const {
    return GreatArc(SpherePoint(b_), SpherePoint(a_), Eigen::Vector3d(-pole_));
}

namespace {

// Spherical distance from q to the closed arc.
double arc_distance(const GreatArc& e, const Eigen::Vector3d& q) {
    double best = std::min(sphere_distance(q, e.start()), sphere_distance(q, e.end()));
    const Eigen::Vector3d q_plane = q - q.dot(e.pole()) * e.pole();
    if (q_plane.norm() > 1e-14) {
        const Eigen::Vector3d qp = q_plane.normalized();
        const double az =
            wrap_2pi(std::atan2(e.pole().dot(e.start().cross(qp)), e.start().dot(qp)));
        if (az <= e.length()) best = std::min(best, sphere_distance(q, e.point_at(az)));
    }
    return best;
}

// Interior turning angle at vertex b between minimizing arcs a->b and b->c;
// positive = left turn.
double turn_at(const Eigen::Vector3d& a, const Eigen::Vector3d& b, const Eigen::Vector3d& c) {
    const GreatArc in = GreatArc::minimizing(SpherePoint(a), SpherePoint(b));
    const GreatArc out = GreatArc::minimizing(SpherePoint(b), SpherePoint(c));
    const Eigen::Vector3d u_in = in.tangent_at(in.length());
    const Eigen::Vector3d u_out = out.tangent_at(0.0);
    return std::atan2(b.dot(u_in.cross(u_out)), u_in.dot(u_out));
}

// Proper crossing count between two arcs; nullopt when an intersection
// candidate grazes an endpoint and the count is ambiguous.
std::optional<int> arc_crossings(const GreatArc& A, const GreatArc& B) {
    const Eigen::Vector3d d = A.pole().cross(B.pole());
    const double dl = d.norm();
    if (dl < 1e-12) return 0; // shared great circle; generic queries avoid this
    int count = 0;
    for (const double sgn : {1.0, -1.0}) {
        const Eigen::Vector3d t = sgn * d / dl;
        const auto param = [&](const GreatArc& e) {
            return wrap_2pi(std::atan2(e.pole().dot(e.start().cross(t)), e.start().dot(t)));
        };
        const double ta = param(A), tb = param(B);
        const double margin = 1e-9;
        const bool in_a = ta > margin && ta < A.length() - margin;
        const bool in_b = tb > margin && tb < B.length() - margin;
        const bool on_a = ta <= 2.0 * M_PI - margin ? ta <= A.length() + margin : true;
        const bool on_b = tb <= 2.0 * M_PI - margin ? tb <= B.length() + margin : true;
        const bool near_end_a = on_a && !in_a;
        const bool near_end_b = on_b && !in_b;
        if ((near_end_a && on_b) || (near_end_b && on_a)) return std::nullopt;
        if (in_a && in_b) ++count;
    }
    return count;
}

bool triangle_contains(const std::vector<CellArc>& edges, const Eigen::Vector3d& q) {
    // Parity of boundary crossings along a probe arc from q to an anchor
    // point placed just inside one edge.
    for (const double eps : {1e-5, 7e-5, 3e-4}) {
        for (size_t e = 0; e < edges.size(); ++e) {
            const GreatArc& edge = edges[e].arc;
            const Eigen::Vector3d mid = edge.point_at(edge.length() / 2.0);
            const Eigen::Vector3d left = edge.pole();
            const Eigen::Vector3d anchor =
                (std::cos(eps) * mid + std::sin(eps) * left).normalized();
            if (near(anchor, q, 1e-8) || anchor.cross(q).norm() < 1e-10) continue;
            const GreatArc probe = GreatArc::minimizing(SpherePoint(q), SpherePoint(anchor));
            int total = 0;
            bool ok = true;
            for (const CellArc& ca : edges) {
                const auto c = arc_crossings(probe, ca.arc);
                if (!c) {
                    ok = false;
                    break;
                }
                total += *c;
            }
            if (ok) return total % 2 == 0;
        }
    }
    throw Error("triangle membership test is degenerate for this query point");
}

} // namespace

double Cell::area() const {
    switch (kind) {
        case CellKind::SlitSphere:
            return 4.0 * M_PI;
        case CellKind::Hemisphere:
            return 2.0 * M_PI;
        case CellKind::Triangle: {
            double turns = 0.0;
            const int m = static_cast<int>(vertices.size());
            for (int i = 0; i < m; ++i) {
                const Eigen::Vector3d& a = vertices[static_cast<size_t>((i + m - 1) % m)];
                const Eigen::Vector3d& b = vertices[static_cast<size_t>(i)];
                const Eigen::Vector3d& c = vertices[static_cast<size_t>((i + 1) % m)];
                turns += turn_at(a, b, c);
            }
            return 2.0 * M_PI - turns;
        }
    }
    return 0.0;
}

bool Cell::contains(const Eigen::Vector3d& q) const {
    switch (kind) {
        case CellKind::SlitSphere:
            return !slit[0].contains(q, 1e-9);
        case CellKind::Hemisphere:
            return pole.dot(q) > 0.0;
        case CellKind::Triangle:
            return triangle_contains(arcs, q);
    }
    return false;
}

double Cell::boundary_distance(const Eigen::Vector3d& q) const {
    double best = std::numeric_limits<double>::infinity();
    if (kind == CellKind::Hemisphere)
        best = std::abs(M_PI / 2.0 - sphere_distance(q, pole));
    for (const GreatArc& e : slit) best = std::min(best, arc_distance(e, q));
    for (const CellArc& ca : arcs) best = std::min(best, arc_distance(ca.arc, q));
    return best;
}

double SheetedMetric::total_area() const {
    double a = 0.0;
    for (const Cell& c : cells) a += c.area();
    return a;
}

std::vector<std::pair<int, int>> SheetedMetric::free_arcs() const {
    std::vector<std::pair<int, int>> out;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c)
        for (int a = 0; a < static_cast<int>(cells[static_cast<size_t>(c)].arcs.size()); ++a)
            if (!cells[static_cast<size_t>(c)].arcs[static_cast<size_t>(a)].glued)
                out.emplace_back(c, a);
    return out;
}

double SheetedMetric::completion_boundary_length(bool include_truncation) const {
    double len = 0.0;
    for (const auto& [c, a] : free_arcs()) {
        const CellArc& ca = cells[static_cast<size_t>(c)].arcs[static_cast<size_t>(a)];
        if (!include_truncation && ca.truncation) continue;
        len += ca.arc.length();
    }
    return len;
}

SheetedMetric make_slit_sphere(const GreatArc& e) {
    if (!e.minimizing_arc())
        throw Error("make_slit_sphere: the slit must be a minimizing arc (length <= pi)");
    SheetedMetric m;
    Cell cell;
    cell.kind = CellKind::SlitSphere;
    cell.slit = {e};
    cell.arcs.push_back({e, false, false});
    cell.arcs.push_back({e.reversed(), false, false});
    m.cells.push_back(std::move(cell));
    m.completion_points.emplace_back(e.start());
    m.completion_points.emplace_back(e.end());
    return m;
}

SheetedMetric join(const SheetedMetric& a, const SheetedMetric& b, std::pair<int, int> arc_a,
                   std::pair<int, int> arc_b) {
    const auto& ca =
        a.cells.at(static_cast<size_t>(arc_a.first)).arcs.at(static_cast<size_t>(arc_a.second));
    const auto& cb =
        b.cells.at(static_cast<size_t>(arc_b.first)).arcs.at(static_cast<size_t>(arc_b.second));
    if (ca.glued || cb.glued) throw Error("join: arc is already glued");
    if (std::abs(ca.arc.length() - cb.arc.length()) > 1e-9)
        throw Error("join: arc length mismatch (" + std::to_string(ca.arc.length()) + " vs " +
                    std::to_string(cb.arc.length()) + ")");
    const bool opposite = near(ca.arc.start(), cb.arc.end()) &&
                          near(ca.arc.end(), cb.arc.start()) &&
                          near(ca.arc.point_at(ca.arc.length() / 2.0),
                               cb.arc.point_at(cb.arc.length() / 2.0));
    if (!opposite) {
        if (near(ca.arc.start(), cb.arc.start()) && near(ca.arc.end(), cb.arc.end()))
            throw Error("join: orientation mismatch; the developments do not extend one "
                        "another across the arc");
        throw Error("join: arcs do not coincide");
    }

    SheetedMetric out;
    out.cells = a.cells;
    out.gluings = a.gluings;
    const int offset = static_cast<int>(out.cells.size());
    for (const Cell& c : b.cells) out.cells.push_back(c);
    for (const Gluing& g : b.gluings)
        out.gluings.push_back({g.cell_a + offset, g.arc_a, g.cell_b + offset, g.arc_b});
    out.gluings.push_back({arc_a.first, arc_a.second, arc_b.first + offset, arc_b.second});
    out.cells[static_cast<size_t>(arc_a.first)].arcs[static_cast<size_t>(arc_a.second)].glued =
        true;
    out.cells[static_cast<size_t>(arc_b.first + offset)]
        .arcs[static_cast<size_t>(arc_b.second)]
        .glued = true;

    out.completion_points = a.completion_points;
    for (const SpherePoint& p : b.completion_points) {
        bool dup = false;
        for (const SpherePoint& q : out.completion_points)
            if (near(p.vec(), q.vec())) dup = true;
        if (!dup) out.completion_points.push_back(p);
    }
    return out;
}

SheetedMetric truncated_ray(const GreatArc& e, int k) {
    if (k < 1) throw Error("truncated_ray: need at least one slit sphere");
    SheetedMetric m = make_slit_sphere(e);
    for (int i = 1; i < k; ++i) m = join(m, make_slit_sphere(e), {i - 1, 1}, {0, 0});
    m.cells.back().arcs[1].truncation = true;
    return m;
}

SheetedMetric truncated_ray(double n, int k) {
    if (!(n > 0.0) || !(n <= M_PI))
        throw Error("truncated_ray: slit length outside (0, pi]");
    const double half = n / 2.0;
    const SpherePoint from(Eigen::Vector3d(0.0, std::sin(half), std::cos(half)));
    const SpherePoint to(Eigen::Vector3d(0.0, -std::sin(half), std::cos(half)));
    const GreatArc e(from, to, Eigen::Vector3d::UnitX());
    return truncated_ray(e, k);
}

namespace {

struct TripleShape {
    bool antipodal = false;    // some edge has length pi
    bool full_circle = false;  // collinear with distance sum 2 pi
    bool folded = false;       // collinear with one edge containing the third point
    NecksizeVector n;
};

TripleShape triple_shape(const SphericalTriple& t) {
    TripleShape s;
    s.n = triple_distances(t);
    for (int i = 0; i < 3; ++i)
        if (s.n[i] >= M_PI - 1e-9) s.antipodal = true;
    const double det = t.p1.vec().dot(t.p2.vec().cross(t.p3.vec()));
    if (std::abs(det) < 1e-12 && !s.antipodal) {
        if (std::abs(s.n.n1 + s.n.n2 + s.n.n3 - 2.0 * M_PI) < 1e-9)
            s.full_circle = true;
        else if (std::abs(s.n.n1 - s.n.n2 - s.n.n3) < 1e-9 ||
                 std::abs(s.n.n2 - s.n.n3 - s.n.n1) < 1e-9 ||
                 std::abs(s.n.n3 - s.n.n1 - s.n.n2) < 1e-9)
            s.folded = true;
    }
    return s;
}

// Pole of the labeled traversal, from the first usable edge.
Eigen::Vector3d traversal_pole(const SphericalTriple& t) {
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d& a = t.point(i).vec();
        const Eigen::Vector3d& b = t.point((i + 1) % 3).vec();
        const Eigen::Vector3d cr = a.cross(b);
        if (cr.norm() > 1e-9) return cr.normalized();
    }
    throw Error("triple has no usable edge direction");
}

} // namespace

double triangle_area(const SphericalTriple& t) {
    const TripleShape s = triple_shape(t);
    if (s.antipodal) return 2.0 * M_PI;
    if (s.full_circle) return 2.0 * M_PI;
    if (s.folded) return 4.0 * M_PI;
    double turns = 0.0;
    for (int i = 0; i < 3; ++i)
        turns +=
            turn_at(t.point((i + 2) % 3).vec(), t.point(i).vec(), t.point((i + 1) % 3).vec());
    return 2.0 * M_PI - turns;
}

SheetedMetric three_point_metric(const SphericalTriple& t, int depth) {
    if (depth < 0) throw Error("three_point_metric: depth must be nonnegative");
    const TripleShape s = triple_shape(t);

    SheetedMetric m;
    std::vector<std::pair<int, int>> edge_slots; // (cell, arc) per labeled edge

    if (s.antipodal || s.full_circle) {
        // Gamma is a full great circle; the triangle is the hemisphere to
        // its left, bounded by the three partition arcs.
        const Eigen::Vector3d pole = traversal_pole(t);
        Cell hemi;
        hemi.kind = CellKind::Hemisphere;
        hemi.pole = pole;
        for (int i = 0; i < 3; ++i) {
            const GreatArc e(t.point(i), t.point((i + 1) % 3), pole);
            hemi.arcs.push_back({e, false, false});
        }
        m.cells.push_back(std::move(hemi));
        for (int i = 0; i < 3; ++i) edge_slots.emplace_back(0, i);
    } else if (s.folded) {
        // One minimizing arc contains the third point in its interior; the
        // triangle is two hemispheres joined across the complementary arc,
        // with area 4 pi.
        int big = 0;
        for (int i = 0; i < 3; ++i)
            if (std::abs(s.n[i] - s.n[(i + 1) % 3] - s.n[(i + 2) % 3]) < 1e-9) big = i;
        const Eigen::Vector3d& vi = t.point(big).vec();
        const Eigen::Vector3d& vj = t.point((big + 1) % 3).vec();
        const Eigen::Vector3d& vk = t.point((big + 2) % 3).vec();
        const Eigen::Vector3d pole = vi.cross(vj).normalized();

        const GreatArc e_big(SpherePoint(vi), SpherePoint(vj), pole);
        const GreatArc e_comp(SpherePoint(vj), SpherePoint(vi), pole); // the long way round
        Cell upper;
        upper.kind = CellKind::Hemisphere;
        upper.pole = pole;
        upper.arcs.push_back({e_big, false, false});
        upper.arcs.push_back({e_comp, false, false});

        Cell lower;
        lower.kind = CellKind::Hemisphere;
        lower.pole = -pole;
        lower.arcs.push_back(
            {GreatArc(SpherePoint(vj), SpherePoint(vk), -pole), false, false});
        lower.arcs.push_back(
            {GreatArc(SpherePoint(vk), SpherePoint(vi), -pole), false, false});
        lower.arcs.push_back({e_comp.reversed(), false, false});

        m.cells.push_back(std::move(upper));
        m.cells.push_back(std::move(lower));
        m.gluings.push_back({0, 1, 1, 2});
        m.cells[0].arcs[1].glued = true;
        m.cells[1].arcs[2].glued = true;

        edge_slots.resize(3);
        edge_slots[static_cast<size_t>(big)] = {0, 0};
        edge_slots[static_cast<size_t>((big + 1) % 3)] = {1, 0};
        edge_slots[static_cast<size_t>((big + 2) % 3)] = {1, 1};
    } else {
        Cell tri;
        tri.kind = CellKind::Triangle;
        tri.vertices = {t.p1.vec(), t.p2.vec(), t.p3.vec()};
        for (int i = 0; i < 3; ++i) {
            const GreatArc e = GreatArc::minimizing(t.point(i), t.point((i + 1) % 3));
            tri.arcs.push_back({e, false, false});
        }
        m.cells.push_back(std::move(tri));
        for (int i = 0; i < 3; ++i) edge_slots.emplace_back(0, i);
    }

    m.completion_points = {t.p1, t.p2, t.p3};

    if (depth > 0) {
        for (int i = 0; i < 3; ++i) {
            const auto [cell, arc] = edge_slots[static_cast<size_t>(i)];
            const GreatArc e =
                m.cells[static_cast<size_t>(cell)].arcs[static_cast<size_t>(arc)].arc;
            const SheetedMetric ray = truncated_ray(e.reversed(), depth);
            m = join(m, ray, {cell, arc}, {0, 0});
        }
    }
    return m;
}

int developing_degree(const SheetedMetric& m, const SpherePoint& q) {
    const Eigen::Vector3d v = q.vec();
    for (const SpherePoint& p : m.completion_points)
        if (sphere_distance(p.vec(), v) < 1e-9)
            throw Error("developing_degree: query point coincides with a completion point");
    for (const Cell& c : m.cells)
        if (c.boundary_distance(v) < 1e-9)
            throw Error("developing_degree: query point lies on a cell boundary, where the "
                        "degree is not defined");
    int degree = 0;
    for (const Cell& c : m.cells)
        if (c.contains(v)) ++degree;
    return degree;
}

} // namespace cousinlab
