#include "torus.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace critloc {

namespace {

// Coefficients of plane point p in basis (u, v).
Vec2 basis_coords(const FlatTorus& t, const Vec2& p) {
    double d = t.det();
    return {cross(p, t.v) / d, cross(t.u, p) / d};
}

double frac01(double x) {
    double f = x - std::floor(x);
    if (f >= 1.0) f -= 1.0;
    return f;
}

// Circumcenter of triangle (0, a, b).
Vec2 circumcenter(const Vec2& a, const Vec2& b) {
    double d = 2.0 * cross(a, b);
    double na = norm2(a), nb = norm2(b);
    return {(b.y * na - a.y * nb) / d, (a.x * nb - b.x * na) / d};
}

} // namespace

FlatTorus reduce_basis(const Vec2& u_in, const Vec2& v_in) {
    Vec2 u = u_in, v = v_in;
    double scale = std::max(norm(u), norm(v));
    if (scale <= 0.0 || std::abs(cross(u, v)) < 1e-14 * scale * scale)
        fail(ErrorCode::DegenerateBasis, "lattice basis is (nearly) linearly dependent");

    for (int it = 0; it < 64; ++it) {
        if (norm2(u) > norm2(v)) std::swap(u, v);
        double mu = std::round(dot(u, v) / norm2(u));
        v -= u * mu;
        if (norm2(v) >= norm2(u) * (1.0 - 1e-15)) break;
    }
    if (norm2(u) > norm2(v)) std::swap(u, v);
    if (cross(u, v) < 0.0) v = -v;
    // tie-break the Lagrange domain boundary deterministically
    if (dot(u, v) < -0.5 * norm2(u) * (1.0 - 1e-15)) v += u;

    FlatTorus t;
    t.u = u;
    t.v = v;
    t.reduced = true;
    return t;
}

FlatTorus reduced_of(const FlatTorus& t) {
    if (t.reduced) return t;
    return reduce_basis(t.u, t.v);
}

Vec2 torus_to_plane(const FlatTorus& t, const TorusPoint& p) {
    return t.u * p.a + t.v * p.b;
}

TorusPoint plane_to_torus(const FlatTorus& t, const Vec2& p) {
    Vec2 c = basis_coords(t, p);
    return {frac01(c.x), frac01(c.y)};
}

TorusPoint canonical_point(const FlatTorus& t, const TorusPoint& p) {
    (void)t;
    return {frac01(p.a), frac01(p.b)};
}

bool torus_points_equal(const FlatTorus& t, const TorusPoint& p, const TorusPoint& q, double eps) {
    FlatTorus r = reduced_of(t);
    Vec2 d = torus_to_plane(t, p) - torus_to_plane(t, q);
    // distance of d to the lattice
    Vec2 c = basis_coords(r, d);
    c.x -= std::round(c.x);
    c.y -= std::round(c.y);
    Vec2 base = r.u * c.x + r.v * c.y;
    double best = norm(base);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            best = std::min(best, norm(base + r.u * double(i) + r.v * double(j)));
    return best <= eps;
}

bool is_rectangular(const FlatTorus& t) {
    FlatTorus r = reduced_of(t);
    return std::abs(dot(r.u, r.v)) <= 1e-12 * norm(r.u) * norm(r.v);
}

std::vector<Vec2> relevant_vectors(const FlatTorus& t) {
    FlatTorus r = reduced_of(t);
    std::vector<Vec2> w = {r.u, r.v};
    if (!is_rectangular(r)) {
        Vec2 w3 = dot(r.u, r.v) > 0.0 ? r.v - r.u : r.v + r.u;
        w.push_back(w3);
    }
    return w;
}

std::vector<Vec2> voronoi_cell_vertices(const FlatTorus& t) {
    FlatTorus r = reduced_of(t);
    std::vector<Vec2> verts;
    if (is_rectangular(r)) {
        Vec2 c = (r.u + r.v) * 0.5;
        verts = {c, Vec2{-c.x, -c.y}, (r.v - r.u) * 0.5, (r.u - r.v) * 0.5};
    } else {
        std::vector<Vec2> rel = relevant_vectors(r);
        std::vector<Vec2> all;
        for (const Vec2& w : rel) {
            all.push_back(w);
            all.push_back(-w);
        }
        std::sort(all.begin(), all.end(),
                  [](const Vec2& a, const Vec2& b) { return std::atan2(a.y, a.x) < std::atan2(b.y, b.x); });
        for (size_t i = 0; i < all.size(); ++i)
            verts.push_back(circumcenter(all[i], all[(i + 1) % all.size()]));
    }
    return verts;
}

double covering_radius(const FlatTorus& t) {
    double r = 0.0;
    for (const Vec2& p : voronoi_cell_vertices(t)) r = std::max(r, norm(p));
    return r;
}

SegmentSet segments_between(const FlatTorus& t, const TorusPoint& y, const TorusPoint& x, double tol) {
    if (tol <= 0.0) fail(ErrorCode::InvalidArgument, "segments_between: tol must be positive");
    FlatTorus r = reduced_of(t);
    Vec2 py = torus_to_plane(t, y);
    Vec2 px = torus_to_plane(t, x);
    Vec2 d0 = px - py;

    // shift x - y close to the origin, then scan a provably sufficient range
    Vec2 c = basis_coords(r, d0);
    double i0 = std::round(c.x), j0 = std::round(c.y);
    Vec2 base = d0 - r.u * i0 - r.v * j0;

    double rad = 2.0 * covering_radius(r) + norm(base);
    double hu = std::abs(r.det()) / norm(r.v); // spacing between u-index lines
    double hv = std::abs(r.det()) / norm(r.u);
    int ni = int(std::ceil(rad / hu)) + 1;
    int nj = int(std::ceil(rad / hv)) + 1;

    double best = std::numeric_limits<double>::infinity();
    for (int i = -ni; i <= ni; ++i)
        for (int j = -nj; j <= nj; ++j)
            best = std::min(best, norm(base + r.u * double(i) + r.v * double(j)));

    SegmentSet s;
    s.target = canonical_point(t, x);
    s.length = best;
    double keep = best + tol * (1.0 + best);
    std::vector<Vec2> reps;
    for (int i = -ni; i <= ni; ++i)
        for (int j = -nj; j <= nj; ++j) {
            Vec2 q = base + r.u * double(i) + r.v * double(j);
            if (norm(q) <= keep) reps.push_back(q);
        }
    std::sort(reps.begin(), reps.end(), [](const Vec2& a, const Vec2& b) {
        return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
    });
    for (const Vec2& q : reps) {
        s.reps.push_back(py + q); // plane representative of x relative to y's chart
        if (best > 0.0) {
            s.directions_at_y.push_back(wrap_angle(std::atan2(q.y, q.x)));
            s.directions_at_x.push_back(wrap_angle(std::atan2(-q.y, -q.x)));
        }
    }
    std::sort(s.directions_at_y.begin(), s.directions_at_y.end());
    return s;
}

double torus_distance(const FlatTorus& t, const TorusPoint& y, const TorusPoint& x) {
    return segments_between(t, y, x).length;
}

namespace {

// Torus classes of the Voronoi cell vertices: indices grouped by equality on
// the torus, in deterministic order.
std::vector<std::vector<int>> vertex_classes(const FlatTorus& r, const std::vector<Vec2>& verts) {
    std::vector<std::vector<int>> classes;
    std::vector<int> owner(verts.size(), -1);
    for (size_t i = 0; i < verts.size(); ++i) {
        if (owner[i] >= 0) continue;
        std::vector<int> cls = {int(i)};
        owner[i] = int(classes.size());
        TorusPoint pi = plane_to_torus(r, verts[i]);
        for (size_t j = i + 1; j < verts.size(); ++j) {
            if (owner[j] >= 0) continue;
            TorusPoint pj = plane_to_torus(r, verts[j]);
            if (torus_points_equal(r, pi, pj, 1e-9 * (1.0 + norm(verts[i])))) {
                owner[j] = owner[i];
                cls.push_back(int(j));
            }
        }
        classes.push_back(cls);
    }
    return classes;
}

} // namespace

CutLocusGraph cut_locus_torus(const FlatTorus& t, const TorusPoint& y) {
    FlatTorus r = reduced_of(t);
    Vec2 py = torus_to_plane(t, y);
    CutLocusGraph g;
    g.from_mesh = false;

    std::vector<Vec2> verts = voronoi_cell_vertices(r);

    if (is_rectangular(r)) {
        Vec2 c = verts[0];
        LocusNode node;
        node.uv = py + c;
        node.dist = norm(c);
        g.nodes.push_back(node);
        // two loops: along the bisector of v (length |u|) and of u (length |v|)
        LocusEdge ev;
        ev.a = ev.b = 0;
        ev.poly_uv = {py + (r.u + r.v) * 0.5, py + (r.v - r.u) * 0.5};
        ev.length = norm(r.u);
        g.edges.push_back(ev);
        LocusEdge eu;
        eu.a = eu.b = 0;
        eu.poly_uv = {py + (r.u + r.v) * 0.5, py + (r.u - r.v) * 0.5};
        eu.length = norm(r.v);
        g.edges.push_back(eu);
    } else {
        auto classes = vertex_classes(r, verts);
        std::vector<int> owner(verts.size(), -1);
        for (size_t k = 0; k < classes.size(); ++k)
            for (int idx : classes[k]) owner[idx] = int(k);
        for (const auto& cls : classes) {
            LocusNode node;
            node.uv = py + verts[cls[0]];
            node.dist = norm(verts[cls[0]]);
            g.nodes.push_back(node);
        }
        // cell edges i -> i+1 in angular order; opposite edges are identified
        size_t nv = verts.size();
        for (size_t i = 0; i < nv / 2; ++i) {
            LocusEdge e;
            e.a = owner[i];
            e.b = owner[(i + 1) % nv];
            e.poly_uv = {py + verts[i], py + verts[(i + 1) % nv]};
            e.length = dist(verts[i], verts[(i + 1) % nv]);
            g.edges.push_back(e);
        }
    }

    for (auto& e : g.edges) {
        e.cyclic = true;
        g.nodes[e.a].degree++;
        g.nodes[e.b].degree++;
    }
    for (auto& n : g.nodes) {
        n.cyclic = true;
        n.cyclic_degree = n.degree;
    }
    return g;
}

std::vector<CriticalSite> q_inverse_torus(const FlatTorus& t, const TorusPoint& y, double tol,
                                          double eps_theta) {
    FlatTorus r = reduced_of(t);
    Vec2 py = torus_to_plane(t, y);
    std::vector<CriticalSite> sites;

    auto make_site = [&](const Vec2& off, CriticalSite::Kind kind, int locus_idx) {
        TorusPoint tp = plane_to_torus(t, py + off);
        SegmentSet seg = segments_between(t, y, tp, tol);
        CriticalSite s;
        s.uv = py + off;
        s.rho = seg.length;
        s.seg_count = int(seg.reps.size());
        s.dirs_at_y.at = DirectionSet::At::Source;
        s.dirs_at_y.angles = seg.directions_at_y;
        s.type = s.seg_count == 2 ? 2 : 3;
        s.kind = kind;
        if (kind == CriticalSite::Kind::EdgeInterior)
            s.locus_edge = locus_idx;
        else
            s.locus_node = locus_idx;
        return s;
    };

    // type-2 candidates: midpoints of Voronoi-relevant vectors; each carries
    // two diametrally opposite segments, hence is always critical
    std::vector<Vec2> rel = relevant_vectors(r);
    CutLocusGraph g = cut_locus_torus(r, TorusPoint{0, 0});
    auto owning_edge = [&](const Vec2& mid) {
        for (size_t e = 0; e < g.edges.size(); ++e) {
            const auto& p = g.edges[e].poly_uv;
            Vec2 a = p.front(), b = p.back();
            Vec2 ab = b - a;
            double tt = dot(mid - a, ab) / norm2(ab);
            if (tt > -1e-9 && tt < 1.0 + 1e-9 && std::abs(cross(ab, mid - a)) < 1e-9 * (1.0 + norm(ab)))
                return int(e);
        }
        return -1;
    };
    for (const Vec2& w : rel) {
        Vec2 mid = w * 0.5;
        sites.push_back(make_site(mid, CriticalSite::Kind::EdgeInterior, owning_edge(mid)));
    }

    // type-3 candidates: Voronoi cell vertices, kept iff direction gap <= pi
    std::vector<Vec2> verts = voronoi_cell_vertices(r);
    auto classes = vertex_classes(r, verts);
    for (size_t k = 0; k < classes.size(); ++k) {
        CriticalSite s = make_site(verts[classes[k][0]], CriticalSite::Kind::Ramification, int(k));
        if (max_circular_gap(s.dirs_at_y.angles) <= kPi + eps_theta) sites.push_back(s);
    }

    std::sort(sites.begin(), sites.end(), [](const CriticalSite& a, const CriticalSite& b) {
        if (a.rho != b.rho) return a.rho < b.rho;
        return std::atan2(a.uv.y, a.uv.x) < std::atan2(b.uv.y, b.uv.x);
    });
    return sites;
}

std::vector<TorusPoint> farthest_set_torus(const FlatTorus& t, const TorusPoint& y, double tol) {
    FlatTorus r = reduced_of(t);
    Vec2 py = torus_to_plane(t, y);
    std::vector<Vec2> verts = voronoi_cell_vertices(r);
    auto classes = vertex_classes(r, verts);
    double dmax = 0.0;
    for (const auto& cls : classes) dmax = std::max(dmax, norm(verts[cls[0]]));
    std::vector<TorusPoint> out;
    for (const auto& cls : classes) {
        if (norm(verts[cls[0]]) >= dmax - tol * (1.0 + dmax))
            out.push_back(plane_to_torus(t, py + verts[cls[0]]));
    }
    return out;
}

TangentData torus_tangent_data(const FlatTorus& t, const TorusPoint& y, const CutLocusGraph& g) {
    FlatTorus r = reduced_of(t);
    Vec2 py = torus_to_plane(t, y);
    TangentData td;

    td.node_dirs.resize(g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) {
        SegmentSet seg = segments_between(t, y, plane_to_torus(t, g.nodes[i].uv));
        td.node_dirs[i] = seg.directions_at_y;
    }

    for (size_t e = 0; e < g.edges.size(); ++e) {
        const auto& edge = g.edges[e];
        Vec2 a = edge.poly_uv.front() - py;
        Vec2 b = edge.poly_uv.back() - py;
        // the cell edge bisects the relevant vector w = a + b projected...
        // midpoint m lies on the bisector of exactly one relevant vector
        Vec2 m = (a + b) * 0.5;
        Vec2 w{0, 0};
        double bestdiff = std::numeric_limits<double>::infinity();
        for (const Vec2& cand : relevant_vectors(r)) {
            for (int sgn : {1, -1}) {
                Vec2 ww = cand * double(sgn);
                double diff = std::abs(dist(m, ww) - norm(m)) + std::abs(dist(a, ww) - norm(a));
                if (diff < bestdiff) {
                    bestdiff = diff;
                    w = ww;
                }
            }
        }
        EdgeTangentData etd;
        etd.edge = int(e);
        auto ang = [](const Vec2& p) { return wrap_angle(std::atan2(p.y, p.x)); };
        etd.flank[0].at_a = ang(a);
        etd.flank[0].at_b = ang(b);
        etd.flank[0].sweep = angle_diff(ang(a), ang(b));
        etd.flank[1].at_a = ang(a - w);
        etd.flank[1].at_b = ang(b - w);
        etd.flank[1].sweep = angle_diff(ang(a - w), ang(b - w));
        td.edges.push_back(etd);
    }
    return td;
}

} // namespace critloc
