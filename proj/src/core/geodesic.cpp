#include "geodesic.hpp"

#include <cstdlib>

#include "error.hpp"

namespace critloc {

namespace {

constexpr double kTieKeep = 1e-12; // co-minimal windows within this margin survive
constexpr double kKillMargin = 1e-9;

struct CanonWindow {
    double a0, a1; // interval in canonical-halfedge params
    double cx, cy; // source; cy signed, > 0 means face(canonical halfedge) side
    double sigma;
};

} // namespace

// ---------------------------------------------------------------------------

DistanceField::DistanceField(const TriMesh& mesh, SurfacePoint source, SolveOptions opts)
    : mesh_(&mesh), source_(source), opts_(opts) {
    edge_windows_.resize(mesh.n_edges());
    vtx_dist_.assign(mesh.n_vertices(), std::numeric_limits<double>::infinity());
    vtx_window_.assign(mesh.n_vertices(), -1);
    vtx_spawned_.assign(mesh.n_vertices(), 0);
    scale_ = mesh.diameter_hint;
    max_windows_ = opts.max_windows;
    if (max_windows_ == 0) {
        if (const char* env = std::getenv("CRITLOC_MAX_WINDOWS"))
            max_windows_ = std::strtoull(env, nullptr, 10);
        if (max_windows_ == 0) max_windows_ = 50'000'000ull;
    }
}

DistanceField solve_distance(const TriMesh& mesh, const SurfacePoint& y, const SolveOptions& opts) {
    if (y.face < 0 || y.face >= mesh.n_faces() || y.b0 < -1e-12 || y.b1 < -1e-12 ||
        y.b2 < -1e-12 || std::abs(y.b0 + y.b1 + y.b2 - 1.0) > 1e-9)
        fail(ErrorCode::InvalidArgument, "solve_distance: invalid source point");
    DistanceField f(mesh, y, opts);
    f.run();
    return f;
}

void DistanceField::heap_push(QEntry e) {
    heap_.push_back(e);
    std::push_heap(heap_.begin(), heap_.end(),
                   [](const QEntry& a, const QEntry& b) { return a.key > b.key; });
}

bool DistanceField::heap_pop(QEntry& e) {
    if (heap_.empty()) return false;
    std::pop_heap(heap_.begin(), heap_.end(),
                  [](const QEntry& a, const QEntry& b) { return a.key > b.key; });
    e = heap_.back();
    heap_.pop_back();
    return true;
}

void DistanceField::touch_vertex(int v, double d, int via_window) {
    const TriMesh& m = *mesh_;
    if (d < vtx_dist_[v] - kTieKeep * (1.0 + d)) {
        vtx_dist_[v] = d;
        vtx_window_[v] = via_window;
        if (running_ && m.vertex_defect[v] < opts_.flat_defect_eps) {
            vtx_spawned_[v] = 0;
            heap_push({d, v, true});
        }
    }
}

namespace {

// position of the (pseudo)source vertex v in the frame of window wp's halfedge
Vec2 vertex_in_window_frame(const TriMesh& m, const Window& wp, int v) {
    int h = wp.halfedge;
    if (m.tail(h) == v) return {0.0, 0.0};
    if (m.head(h) == v) return {m.len(h), 0.0};
    int ht = m.twin[h];
    Vec2 ap = m.from_face(ht, m.corner2d[m.prev(ht)]);
    return {m.len(h) - ap.x, -ap.y};
}

// unnormalized cone coordinate at vertex v of a direction expressed in a face
// layout; the direction must point into (or border) that face's wedge
double cone_coord(const TriMesh& m, int v, int face, const Vec2& dir) {
    double cum = 0.0;
    for (int h : vertex_ring(m, v)) {
        if (m.face_of(h) == face) {
            Vec2 e1 = m.corner2d[m.next(h)] - m.corner2d[h];
            double a = std::atan2(cross(e1, dir), dot(e1, dir));
            if (a < -0.5 * kPi) a += kTwoPi; // tolerate slight underflow at the wedge start
            return cum + a;
        }
        cum += m.corner_angle[h];
    }
    fail(ErrorCode::InvalidArgument, "cone_coord: face not incident to vertex");
}

} // namespace

// back-toward-source direction of the geodesic that set vtx_dist_[v]
bool DistanceField::incoming_at_vertex(int v, int& face, Vec2& dir) const {
    const TriMesh& m = *mesh_;
    int wid = vtx_window_[v];
    if (wid >= 0) {
        const Window& w = windows_[wid];
        Vec2 p = vertex_in_window_frame(m, w, v);
        Vec2 S{w.sx, w.sy};
        if (std::abs(p.y) <= 1e-12 * m.len(w.halfedge)) {
            face = m.face_of(w.halfedge);
            dir = m.vec_to_face(w.halfedge, S - p);
        } else {
            // apex arrival: the straight leg lives in the unfolded hinge; express
            // it in the twin face where the apex actually sits
            int ht = m.twin[w.halfedge];
            Vec2 vv = S - p;
            face = m.face_of(ht);
            dir = m.vec_to_face(ht, Vec2{-vv.x, -vv.y});
        }
        return true;
    }
    // corner adjacent to the source chart
    int yv = m.corner_vertex(source_);
    if (yv >= 0) {
        for (int h : vertex_ring(m, v)) {
            int f = m.face_of(h);
            for (int k = 0; k < 3; ++k)
                if (m.faces[f][k] == yv) {
                    face = f;
                    dir = m.corner2d[3 * f + k] - m.corner2d[h];
                    return true;
                }
        }
        return false;
    }
    int f0 = source_.face;
    for (int k = 0; k < 3; ++k)
        if (m.faces[f0][k] == v) {
            face = f0;
            dir = m.point2d(source_) - m.corner2d[3 * f0 + k];
            return true;
        }
    int yh = m.on_halfedge(source_);
    if (yh >= 0) {
        int ht = m.twin[yh];
        int ft = m.face_of(ht);
        for (int k = 0; k < 3; ++k)
            if (m.faces[ft][k] == v) {
                Vec2 q = m.from_face(yh, m.point2d(source_));
                Vec2 y2 = m.to_face(ht, Vec2{m.len(yh) - q.x, 0.0});
                face = ft;
                dir = y2 - m.corner2d[3 * ft + k];
                return true;
            }
    }
    return false;
}

void DistanceField::spawn_pseudo(int v) {
    if (vtx_spawned_[v]) return;
    vtx_spawned_[v] = 1;
    const TriMesh& m = *mesh_;

    // geodesics continue through v only inside the shadow wedge: at least pi
    // on both sides of the incoming direction (a single ray at flat vertices,
    // widened by a small angular margin)
    constexpr double kWedgeMargin = 1e-6;
    int face_in;
    Vec2 dir_in;
    if (!incoming_at_vertex(v, face_in, dir_in)) return;
    double tin = cone_coord(m, v, face_in, dir_in);
    double ttot = vertex_total_angle(m, v);
    double wlo = tin + kPi - kWedgeMargin;
    double whi = tin + ttot - kPi + kWedgeMargin;

    double cum = 0.0;
    for (int h : vertex_ring(m, v)) {
        double ang = m.corner_angle[h];
        int ho = m.next(h);
        double Lo = m.len(ho);
        Vec2 c = m.corner2d[h];
        Vec2 A = m.corner2d[m.next(h)]; // tail of ho
        Vec2 B = m.corner2d[m.prev(h)]; // head of ho
        Vec2 Ddir = (B - A) / Lo;
        Vec2 e1 = normalized(A - c);

        // intersect the wedge [cum, cum+ang] with the shadow interval (mod ttot)
        for (double shift : {-ttot, 0.0, ttot}) {
            double p0 = std::max(cum, wlo + shift);
            double p1 = std::min(cum + ang, whi + shift);
            if (p1 - p0 <= 0.0) continue;
            auto s_at = [&](double phi) {
                double alpha = std::clamp(phi - cum, 0.0, ang);
                Vec2 r{e1.x * std::cos(alpha) - e1.y * std::sin(alpha),
                       e1.x * std::sin(alpha) + e1.y * std::cos(alpha)};
                double den = cross(Ddir, r);
                if (std::abs(den) < 1e-14) return alpha < 0.5 * ang ? 0.0 : Lo;
                return std::clamp(cross(c - A, r) / den, 0.0, Lo);
            };
            double s0 = s_at(p0), s1 = s_at(p1);
            Window w;
            w.halfedge = ho;
            Vec2 s = m.from_face(ho, c);
            w.sx = s.x;
            w.sy = std::max(s.y, 0.0);
            w.t0 = std::min(s0, s1);
            w.t1 = std::max(s0, s1);
            w.sigma = vtx_dist_[v];
            w.parent = vtx_window_[v];
            w.src_vertex = v;
            add_window(w);
        }
        cum += ang;
    }
}

void DistanceField::init_source() {
    const TriMesh& m = *mesh_;
    int v = m.corner_vertex(source_);
    if (v >= 0) {
        vtx_dist_[v] = 0.0;
        vtx_window_[v] = -1;
        vtx_spawned_[v] = 1;
        for (int h : vertex_ring(m, v)) {
            int ho = m.next(h);
            Vec2 s = m.from_face(ho, m.corner2d[h]);
            Window w;
            w.halfedge = ho;
            w.sx = s.x;
            w.sy = std::max(s.y, 0.0);
            w.t0 = 0.0;
            w.t1 = m.len(ho);
            w.sigma = 0.0;
            w.parent = -1;
            w.src_vertex = -1;
            add_window(w);
        }
        return;
    }
    // face charts containing the source (two for edge-interior points)
    std::vector<std::pair<int, Vec2>> charts;
    charts.push_back({source_.face, m.point2d(source_)});
    int hon = m.on_halfedge(source_);
    if (hon >= 0) {
        int ht = m.twin[hon];
        Vec2 q = m.from_face(hon, charts[0].second);
        charts.push_back({m.face_of(ht), m.to_face(ht, Vec2{m.len(hon) - q.x, 0.0})});
    }
    for (auto& [f, p] : charts) {
        for (int k = 0; k < 3; ++k) {
            int h = 3 * f + k;
            Vec2 s = m.from_face(h, p);
            if (s.y <= 1e-12 * m.len(h)) continue;
            Window w;
            w.halfedge = h;
            w.sx = s.x;
            w.sy = s.y;
            w.t0 = 0.0;
            w.t1 = m.len(h);
            w.sigma = 0.0;
            w.parent = -1;
            w.src_vertex = -1;
            add_window(w);
        }
        for (int k = 0; k < 3; ++k)
            touch_vertex(m.faces[f][k], dist(p, m.corner2d[3 * f + k]), -1);
    }
}

void DistanceField::add_window(Window w) {
    const TriMesh& m = *mesh_;
    double L = m.len(w.halfedge);
    double wid_eps = 1e-9 * L;
    w.t0 = std::max(w.t0, 0.0);
    w.t1 = std::min(w.t1, L);
    if (w.t1 - w.t0 < wid_eps) return;
    w.sy = std::max(w.sy, 0.0);

    int e = m.edge_of[w.halfedge];
    int hc = m.edge_halfedge[e];
    bool flip = w.halfedge != hc;

    auto canon = [&](const Window& x) -> CanonWindow {
        if (x.halfedge == hc) return {x.t0, x.t1, x.sx, x.sy, x.sigma};
        return {L - x.t1, L - x.t0, L - x.sx, -x.sy, x.sigma};
    };
    CanonWindow cw = canon(w);
    auto dist_of = [](const CanonWindow& c, double t) {
        return c.sigma + std::hypot(t - c.cx, c.cy);
    };

    std::vector<std::pair<double, double>> frags = {{cw.a0, cw.a1}};

    auto& list = edge_windows_[e];
    for (size_t li = 0; li < list.size() && !frags.empty(); ++li) {
        Window& o = windows_[list[li]];
        if (o.dead) continue;
        CanonWindow co = canon(o);

        // merge duplicates: same side, coincident source and offset
        double mtol = opts_.merge_tol * scale_;
        if (((cw.cy >= 0) == (co.cy >= 0)) && std::abs(cw.cx - co.cx) < mtol &&
            std::abs(std::abs(cw.cy) - std::abs(co.cy)) < mtol &&
            std::abs(cw.sigma - co.sigma) < mtol) {
            std::vector<std::pair<double, double>> nf;
            for (auto [f0, f1] : frags) {
                if (f1 <= co.a0 + wid_eps || f0 >= co.a1 - wid_eps) {
                    nf.push_back({f0, f1});
                    continue;
                }
                if (f0 < co.a0 - wid_eps) nf.push_back({f0, co.a0});
                if (f1 > co.a1 + wid_eps) nf.push_back({co.a1, f1});
            }
            frags = std::move(nf);
            continue;
        }

        std::vector<std::pair<double, double>> nf;
        for (auto [f0, f1] : frags) {
            double lo = std::max(f0, co.a0), hi = std::min(f1, co.a1);
            if (hi - lo < wid_eps) {
                nf.push_back({f0, f1});
                continue;
            }
            // equal-distance crossings inside the overlap
            double dsig = cw.sigma - co.sigma;
            std::vector<double> cuts = {lo, hi};
            if (std::abs(dsig) < 1e-15 * (1.0 + cw.sigma)) {
                double A = 2.0 * (cw.cx - co.cx);
                if (std::abs(A) > 1e-300) {
                    double t = (cw.cx * cw.cx + cw.cy * cw.cy - co.cx * co.cx - co.cy * co.cy) / A;
                    if (t > lo && t < hi) cuts.push_back(t);
                }
            } else {
                double A = 2.0 * (cw.cx - co.cx);
                double B = co.cx * co.cx + co.cy * co.cy - cw.cx * cw.cx - cw.cy * cw.cy -
                           dsig * dsig;
                double qa = A * A - 4.0 * dsig * dsig;
                double qb = 2.0 * A * B + 8.0 * dsig * dsig * cw.cx;
                double qc = B * B - 4.0 * dsig * dsig * (cw.cx * cw.cx + cw.cy * cw.cy);
                if (std::abs(qa) < 1e-12 * (std::abs(qb) + std::abs(qc) + 1.0)) {
                    if (std::abs(qb) > 1e-300) {
                        double t = -qc / qb;
                        if (t > lo && t < hi) cuts.push_back(t);
                    }
                } else {
                    double disc = qb * qb - 4.0 * qa * qc;
                    if (disc >= 0.0) {
                        double sq = std::sqrt(disc);
                        for (double t : {(-qb - sq) / (2 * qa), (-qb + sq) / (2 * qa)})
                            if (t > lo && t < hi &&
                                std::abs(dist_of(cw, t) - dist_of(co, t)) <
                                    1e-6 * (1.0 + dist_of(cw, t)))
                                cuts.push_back(t);
                    }
                }
            }
            std::sort(cuts.begin(), cuts.end());

            if (lo - f0 >= wid_eps) nf.push_back({f0, lo});
            for (size_t r = 0; r + 1 < cuts.size(); ++r) {
                double s0 = cuts[r], s1 = cuts[r + 1];
                if (s1 - s0 < wid_eps) continue;
                double mid = 0.5 * (s0 + s1);
                double dn = dist_of(cw, mid), dold = dist_of(co, mid);
                if (dn <= dold + kTieKeep * (1.0 + dn)) nf.push_back({s0, s1});
            }
            if (f1 - hi >= wid_eps) nf.push_back({hi, f1});
        }
        std::sort(nf.begin(), nf.end());
        frags.clear();
        for (auto& fr : nf) {
            if (!frags.empty() && fr.first <= frags.back().second + wid_eps)
                frags.back().second = std::max(frags.back().second, fr.second);
            else
                frags.push_back(fr);
        }

        // drop incumbents the new window strictly dominates everywhere
        if (co.a0 >= cw.a0 - wid_eps && co.a1 <= cw.a1 + wid_eps) {
            bool dom = true;
            for (double t : {co.a0, 0.5 * (co.a0 + co.a1), co.a1}) {
                double dn = dist_of(cw, t);
                if (!(dn + kKillMargin * (1.0 + dn) < dist_of(co, t))) {
                    dom = false;
                    break;
                }
            }
            if (dom) o.dead = true;
        }
    }

    for (auto [a0, a1] : frags) {
        if (a1 - a0 < wid_eps) continue;
        Window nw = w;
        if (!flip) {
            nw.t0 = a0;
            nw.t1 = a1;
        } else {
            nw.t0 = L - a1;
            nw.t1 = L - a0;
        }
        if (created_ >= max_windows_)
            fail(ErrorCode::ResourceLimit,
                 "window budget exceeded (" + std::to_string(max_windows_) + ")");
        int id = int(windows_.size());
        windows_.push_back(nw);
        created_++;
        edge_windows_[e].push_back(id);
        if (running_) heap_push({nw.min_dist(), id, false});

        if (nw.t0 <= 1e-7 * L) touch_vertex(m.tail(nw.halfedge), nw.dist_at(0.0), id);
        if (nw.t1 >= L * (1.0 - 1e-7)) touch_vertex(m.head(nw.halfedge), nw.dist_at(L), id);
    }
}

void DistanceField::propagate(int wid) {
    const TriMesh& m = *mesh_;
    Window w = windows_[wid];
    if (w.dead) return;
    int h = w.halfedge;
    int ht = m.twin[h];
    double L = m.len(h);

    // unfolded source in the twin frame (below the axis)
    double a0 = L - w.t1, a1 = L - w.t0;
    Vec2 S{L - w.sx, -w.sy};

    int h_apex = m.prev(ht); // corner opposite ht
    Vec2 C = m.from_face(ht, m.corner2d[h_apex]);
    int apex_v = m.tail(h_apex);

    auto tau_of = [&](const Vec2& X) {
        double den = X.y - S.y;
        if (std::abs(den) < 1e-300) return S.x;
        return (S.x * X.y - S.y * X.x) / den;
    };

    if (w.sy < 1e-12 * L) {
        // source on the edge line: the bundle is a single ray through a corner
        if (S.x <= a0 + 1e-7 * L) touch_vertex(m.tail(ht), w.sigma + std::abs(S.x), wid);
        if (S.x >= a1 - 1e-7 * L) touch_vertex(m.head(ht), w.sigma + std::abs(L - S.x), wid);
        return;
    }

    double tau_c = tau_of(C);
    if (tau_c >= a0 - 1e-7 * L && tau_c <= a1 + 1e-7 * L)
        touch_vertex(apex_v, w.sigma + dist(S, C), wid);

    for (int h2 : {m.next(ht), m.prev(ht)}) {
        double L2 = m.len(h2);
        Vec2 P0 = m.from_face(ht, m.corner2d[h2]);
        Vec2 P1 = m.from_face(ht, m.corner2d[m.next(h2)]);
        Vec2 D = (P1 - P0) / L2;

        // tau is monotone along the segment (its pole lies outside); clip in
        // tau-space first, then map back to segment parameters
        double tau0 = tau_of(P0), tau1 = tau_of(P1);
        double c0 = std::max(a0, std::min(tau0, tau1));
        double c1 = std::min(a1, std::max(tau0, tau1));
        if (c1 - c0 < 1e-12 * L) continue;

        auto s_of = [&](double a) {
            if (std::abs(a - tau0) < 1e-14 * L) return 0.0;
            if (std::abs(a - tau1) < 1e-14 * L) return L2;
            double coef = a * D.y - S.x * D.y + S.y * D.x;
            double rhs = S.x * P0.y - S.y * P0.x - a * (P0.y - S.y);
            if (std::abs(coef) * L2 < 1e-300) return rhs > 0 ? 1e300 : -1e300;
            return rhs / coef;
        };
        double s_a = s_of(c0), s_b = s_of(c1);
        double lo = std::max(std::min(s_a, s_b), 0.0);
        double hi = std::min(std::max(s_a, s_b), L2);
        if (hi - lo < 1e-9 * L2) continue;

        Vec2 S2 = m.from_face(h2, m.to_face(ht, S));
        if (S2.y < 1e-12 * L2) continue; // collinear continuation flows through corners

        Window child;
        child.halfedge = h2;
        child.sx = S2.x;
        child.sy = S2.y;
        child.t0 = lo;
        child.t1 = hi;
        child.sigma = w.sigma;
        child.parent = wid;
        child.src_vertex = w.src_vertex;
        add_window(child);
    }
}

void DistanceField::run() {
    running_ = true;
    init_source();
    QEntry e;
    while (heap_pop(e)) {
        if (e.vertex) {
            if (e.key <= vtx_dist_[e.id] + kTieKeep * (1.0 + e.key)) spawn_pseudo(e.id);
        } else {
            propagate(e.id);
        }
    }
    running_ = false;
}

// ---------------------------------------------------------------------------
// queries

namespace {

SurfacePoint bary_of(const TriMesh& m, int f, const Vec2& p) {
    Vec2 c0 = m.corner2d[3 * f], c1 = m.corner2d[3 * f + 1], c2 = m.corner2d[3 * f + 2];
    double den = cross(c1 - c0, c2 - c0);
    double b2 = cross(c1 - c0, p - c0) / den;
    double b1 = cross(p - c0, c2 - c0) / den;
    return {f, 1.0 - b1 - b2, b1, b2};
}

// position of the (pseudo)source vertex v in the frame of window wp's halfedge
Vec2 vertex_in_window_frame(const TriMesh& m, const Window& wp, int v) {
    int h = wp.halfedge;
    if (m.tail(h) == v) return {0.0, 0.0};
    if (m.head(h) == v) return {m.len(h), 0.0};
    int ht = m.twin[h];
    Vec2 ap = m.from_face(ht, m.corner2d[m.prev(ht)]);
    return {m.len(h) - ap.x, -ap.y};
}

} // namespace

// angle of a face-layout direction `dir` in the source's normalized chart
double DistanceField::source_chart_angle_of_vec(int face, Vec2 dir) const {
    const TriMesh& m = *mesh_;
    int yv = m.corner_vertex(source_);
    if (yv >= 0) {
        double cum = 0.0;
        double total = vertex_total_angle(m, yv);
        for (int hh : vertex_ring(m, yv)) {
            if (m.face_of(hh) == face) {
                Vec2 e1 = m.corner2d[m.next(hh)] - m.corner2d[hh];
                double a = std::atan2(cross(e1, dir), dot(e1, dir));
                if (a < 0) a += kTwoPi;
                return wrap_angle((cum + a) * (kTwoPi / total));
            }
            cum += m.corner_angle[hh];
        }
        fail(ErrorCode::InvalidArgument, "source chart: face not adjacent to source vertex");
    }
    int yh = m.on_halfedge(source_);
    if (yh >= 0 && face != source_.face) {
        int ht = m.twin[yh];
        if (m.face_of(ht) != face)
            fail(ErrorCode::InvalidArgument, "source chart: face not adjacent to source edge");
        Vec2 vt = m.from_face(ht, dir) - m.from_face(ht, Vec2{0, 0});
        dir = m.vec_to_face(yh, Vec2{-vt.x, -vt.y});
    }
    return wrap_angle(std::atan2(dir.y, dir.x));
}

double DistanceField::chart_angle_at_source(int root_window, const Vec2& first_hframe) const {
    const TriMesh& m = *mesh_;
    const Window& w = windows_[root_window];
    Vec2 dir = m.vec_to_face(w.halfedge, first_hframe - Vec2{w.sx, w.sy});
    return source_chart_angle_of_vec(m.face_of(w.halfedge), dir);
}

double DistanceField::source_direction(int window, Vec2 p) const {
    const TriMesh& m = *mesh_;
    int wid = window;
    int guard = 0;
    while (true) {
        if (++guard > 1 << 22) fail(ErrorCode::InvalidArgument, "backtrace loop");
        const Window& w = windows_[wid];
        if (w.parent < 0) {
            if (w.src_vertex < 0) return chart_angle_at_source(wid, p);
            // pseudo root at a corner of the source face: direction y -> corner
            int v = w.src_vertex;
            int fy = source_.face;
            Vec2 yc = m.point2d(source_);
            for (int k = 0; k < 3; ++k)
                if (m.faces[fy][k] == v)
                    return source_chart_angle_of_vec(fy, m.corner2d[3 * fy + k] - yc);
            // v may border the source's twin face when the source sits on an edge
            int yh = m.on_halfedge(source_);
            if (yh >= 0) {
                int ft = m.face_of(m.twin[yh]);
                for (int k = 0; k < 3; ++k)
                    if (m.faces[ft][k] == v) {
                        Vec2 q = m.from_face(yh, yc);
                        Vec2 yc2 = m.to_face(m.twin[yh], Vec2{m.len(yh) - q.x, 0.0});
                        return source_chart_angle_of_vec(ft, m.corner2d[3 * ft + k] - yc2);
                    }
            }
            fail(ErrorCode::InvalidArgument, "pseudo root not adjacent to source");
        }
        const Window& wp = windows_[w.parent];
        if (w.src_vertex != wp.src_vertex) {
            p = vertex_in_window_frame(m, wp, w.src_vertex);
            wid = w.parent;
            continue;
        }
        Vec2 S{w.sx, w.sy};
        double den = S.y - p.y;
        double tau = std::abs(den) < 1e-300 ? std::clamp(p.x, w.t0, w.t1)
                                            : std::clamp(S.x + (p.x - S.x) * S.y / den, w.t0, w.t1);
        int hpt = m.twin[wp.halfedge];
        Vec2 cp = m.to_face(w.halfedge, Vec2{tau, 0.0});
        Vec2 in_tw = m.from_face(hpt, cp);
        p = Vec2{m.len(wp.halfedge) - in_tw.x, -in_tw.y};
        wid = w.parent;
    }
}

std::vector<SegmentInfo> DistanceField::segments_at(const SurfacePoint& x, double tol) const {
    const TriMesh& m = *mesh_;
    struct Cand {
        double length;
        int face;
        Vec2 dir; // toward the source, in face layout
        Vec2 src;
        int window;
        int corner;
        double cross_t;
    };
    std::vector<Cand> cands;

    int xv = m.corner_vertex(x);
    int xh = xv >= 0 ? -1 : m.on_halfedge(x);

    std::vector<std::pair<int, Vec2>> charts;
    if (xv >= 0) {
        for (int h : vertex_ring(m, xv)) charts.push_back({m.face_of(h), m.corner2d[h]});
    } else {
        charts.push_back({x.face, m.point2d(x)});
        if (xh >= 0) {
            int ht = m.twin[xh];
            Vec2 q = m.from_face(xh, charts[0].second);
            charts.push_back({m.face_of(ht), m.to_face(ht, Vec2{m.len(xh) - q.x, 0.0})});
        }
    }

    int yv = m.corner_vertex(source_);
    int yh = yv >= 0 ? -1 : m.on_halfedge(source_);

    for (auto& [f, xf] : charts) {
        // direct in-face path
        Vec2 ypos;
        bool direct = false;
        if (yv >= 0) {
            for (int h : vertex_ring(m, yv))
                if (m.face_of(h) == f) {
                    ypos = m.corner2d[h];
                    direct = true;
                    break;
                }
        } else if (source_.face == f) {
            ypos = m.point2d(source_);
            direct = true;
        } else if (yh >= 0 && m.face_of(m.twin[yh]) == f) {
            int ht = m.twin[yh];
            Vec2 q = m.from_face(yh, m.point2d(source_));
            ypos = m.to_face(ht, Vec2{m.len(yh) - q.x, 0.0});
            direct = true;
        }
        if (direct) {
            double len = dist(xf, ypos);
            cands.push_back({len, f, len > 0 ? (ypos - xf) / len : Vec2{1, 0}, ypos, -1, -1, 0.0});
        }

        // windows crossing into f
        for (int k = 0; k < 3; ++k) {
            int hf = 3 * f + k;
            int ho = m.twin[hf];
            double L = m.len(hf);
            Vec2 xe = m.from_face(hf, xf);
            Vec2 xw{L - xe.x, -xe.y};
            for (int widx : edge_windows_[m.edge_of[hf]]) {
                const Window& w = windows_[widx];
                if (w.dead || w.halfedge != ho) continue;
                Vec2 S{w.sx, w.sy};
                double den = S.y - xw.y;
                double tau;
                if (den < 1e-12 * L) {
                    // collinear: valid only if x lies on the window's edge span
                    if (std::abs(xw.y) > 1e-9 * L) continue;
                    tau = std::clamp(xw.x, w.t0, w.t1);
                    if (xw.x < w.t0 - 1e-6 * L || xw.x > w.t1 + 1e-6 * L) continue;
                } else {
                    tau = S.x + (xw.x - S.x) * S.y / den;
                    if (tau < w.t0 - 1e-6 * L || tau > w.t1 + 1e-6 * L) continue;
                    tau = std::clamp(tau, w.t0, w.t1);
                }
                double len = w.sigma + dist(S, xw);
                Vec2 s_in_f = m.to_face(hf, Vec2{L - S.x, S.y});
                Vec2 dir = s_in_f - xf;
                double dn = norm(dir);
                cands.push_back({len, f, dn > 0 ? dir / dn : Vec2{1, 0}, s_in_f, widx, -1, tau});
            }
        }

        // arrivals through relay corners (flat or saddle vertices, or the
        // corners of the source face)
        for (int k = 0; k < 3; ++k) {
            int v = m.faces[f][k];
            if (v == xv || std::isinf(vtx_dist_[v])) continue;
            bool relay = m.vertex_defect[v] < opts_.flat_defect_eps;
            bool source_adjacent = vtx_window_[v] < 0;
            if (!relay && !source_adjacent) continue;
            Vec2 c = m.corner2d[3 * f + k];
            double len = vtx_dist_[v] + dist(xf, c);
            Vec2 dir = c - xf;
            double dn = norm(dir);
            if (dn <= 0) continue;
            cands.push_back({len, f, dir / dn, c, -1, v, 0.0});
        }
    }

    if (cands.empty()) return {};
    std::sort(cands.begin(), cands.end(),
              [](const Cand& a, const Cand& b) { return a.length < b.length; });
    double dmin = cands[0].length;
    double keep = dmin + tol * (1.0 + dmin);

    double total_x = xv >= 0 ? vertex_total_angle(m, xv) : kTwoPi;
    auto chart_angle = [&](const Cand& c) {
        if (xv >= 0) {
            double cum = 0.0;
            for (int hh : vertex_ring(m, xv)) {
                if (m.face_of(hh) == c.face) {
                    Vec2 e1 = m.corner2d[m.next(hh)] - m.corner2d[hh];
                    double a = std::atan2(cross(e1, c.dir), dot(e1, c.dir));
                    if (a < 0) a += kTwoPi;
                    return wrap_angle((cum + a) * (kTwoPi / total_x));
                }
                cum += m.corner_angle[hh];
            }
            return 0.0;
        }
        if (c.face != x.face && xh >= 0) {
            int ht = m.twin[xh];
            Vec2 vt = m.from_face(ht, c.dir) - m.from_face(ht, Vec2{0, 0});
            Vec2 d2 = m.vec_to_face(xh, Vec2{-vt.x, -vt.y});
            return wrap_angle(std::atan2(d2.y, d2.x));
        }
        return wrap_angle(std::atan2(c.dir.y, c.dir.x));
    };

    std::vector<SegmentInfo> out;
    for (const Cand& c : cands) {
        if (c.length > keep) break;
        double ang = chart_angle(c);
        bool dup = false;
        for (const SegmentInfo& s : out)
            if (std::abs(angle_diff(s.dir_at_x, ang)) < opts_.dir_merge) {
                dup = true;
                break;
            }
        if (dup) continue;

        SegmentInfo s;
        s.length = c.length;
        s.dir_at_x = ang;
        s.window = c.window;
        s.via_vertex = c.corner;
        s.src_in_chart = c.src;
        if (c.window >= 0) {
            s.dir_at_y = source_direction(c.window, Vec2{c.cross_t, 0.0});
        } else if (c.corner >= 0) {
            int vw = vtx_window_[c.corner];
            if (vw >= 0) {
                s.dir_at_y =
                    source_direction(vw, vertex_in_window_frame(m, windows_[vw], c.corner));
            } else {
                // corner adjacent to the source chart: straight leg y -> corner
                int fy = source_.face;
                Vec2 yc = m.point2d(source_);
                bool found = false;
                if (yv >= 0 && c.corner != yv) {
                    for (int hh : vertex_ring(m, yv)) {
                        int ff = m.face_of(hh);
                        for (int kk = 0; kk < 3 && !found; ++kk)
                            if (m.faces[ff][kk] == c.corner) {
                                s.dir_at_y = source_chart_angle_of_vec(
                                    ff, m.corner2d[3 * ff + kk] - m.corner2d[hh]);
                                found = true;
                            }
                        if (found) break;
                    }
                } else {
                    for (int kk = 0; kk < 3 && !found; ++kk)
                        if (m.faces[fy][kk] == c.corner) {
                            s.dir_at_y =
                                source_chart_angle_of_vec(fy, m.corner2d[3 * fy + kk] - yc);
                            found = true;
                        }
                    int yhh = yh;
                    if (!found && yhh >= 0) {
                        int ft = m.face_of(m.twin[yhh]);
                        for (int kk = 0; kk < 3 && !found; ++kk)
                            if (m.faces[ft][kk] == c.corner) {
                                Vec2 q = m.from_face(yhh, yc);
                                Vec2 yc2 = m.to_face(m.twin[yhh], Vec2{m.len(yhh) - q.x, 0.0});
                                s.dir_at_y = source_chart_angle_of_vec(
                                    ft, m.corner2d[3 * ft + kk] - yc2);
                                found = true;
                            }
                    }
                }
                if (!found && c.corner == yv) s.dir_at_y = chart_angle(c); // degenerate x~y
            }
        } else {
            // direct in-face: leg from y toward x
            s.dir_at_y = source_chart_angle_of_vec(c.face, -c.dir);
        }
        out.push_back(s);
    }
    return out;
}

double DistanceField::distance_at(const SurfacePoint& x) const {
    auto segs = segments_at(x, 0.0);
    if (segs.empty()) return std::numeric_limits<double>::infinity();
    double best = segs[0].length;
    for (const auto& s : segs) best = std::min(best, s.length);
    return best;
}

std::vector<SurfacePoint> DistanceField::trace(const SurfacePoint& x, const SegmentInfo& seg) const {
    const TriMesh& m = *mesh_;
    std::vector<SurfacePoint> poly = {x};

    if (seg.window < 0 && seg.via_vertex < 0) {
        poly.push_back(source_);
        return poly;
    }
    int wid;
    Vec2 p;
    if (seg.via_vertex >= 0) {
        poly.push_back(vertex_point(m, seg.via_vertex));
        wid = vtx_window_[seg.via_vertex];
        if (wid < 0) {
            poly.push_back(source_);
            return poly;
        }
        p = vertex_in_window_frame(m, windows_[wid], seg.via_vertex);
    } else {
        wid = seg.window;
        const Window& w = windows_[wid];
        int hf = m.twin[w.halfedge];
        Vec2 xf;
        if (!point_in_face(m, x, m.face_of(hf), xf))
            fail(ErrorCode::InvalidArgument, "trace: window does not border the query face");
        Vec2 xe = m.from_face(hf, xf);
        p = Vec2{m.len(hf) - xe.x, -xe.y};
    }

    int guard = 0;
    while (true) {
        if (++guard > 1 << 22) fail(ErrorCode::InvalidArgument, "trace loop");
        const Window& w = windows_[wid];
        Vec2 S{w.sx, w.sy};
        double den = S.y - p.y;
        double tau = std::abs(den) < 1e-300
                         ? std::clamp(p.x, w.t0, w.t1)
                         : std::clamp(S.x + (p.x - S.x) * S.y / den, w.t0, w.t1);
        Vec2 cp = m.to_face(w.halfedge, Vec2{tau, 0.0});
        poly.push_back(bary_of(m, m.face_of(w.halfedge), cp));

        if (w.parent < 0) {
            if (w.src_vertex >= 0) poly.push_back(vertex_point(m, w.src_vertex));
            poly.push_back(source_);
            break;
        }
        const Window& wp = windows_[w.parent];
        if (w.src_vertex != wp.src_vertex) {
            poly.push_back(vertex_point(m, w.src_vertex));
            p = vertex_in_window_frame(m, wp, w.src_vertex);
            wid = w.parent;
            continue;
        }
        int hpt = m.twin[wp.halfedge];
        Vec2 in_tw = m.from_face(hpt, cp);
        p = Vec2{m.len(wp.halfedge) - in_tw.x, -in_tw.y};
        wid = w.parent;
    }
    return poly;
}

SegmentDirections segment_directions(const DistanceField& field, const SurfacePoint& x, double tol) {
    SegmentDirections sd;
    sd.segments = field.segments_at(x, tol);
    sd.count = int(sd.segments.size());
    sd.at_y.at = DirectionSet::At::Source;
    sd.at_x.at = DirectionSet::At::Target;
    for (const auto& s : sd.segments) {
        sd.at_y.angles.push_back(s.dir_at_y);
        sd.at_x.angles.push_back(s.dir_at_x);
    }
    std::sort(sd.at_y.angles.begin(), sd.at_y.angles.end());
    std::sort(sd.at_x.angles.begin(), sd.at_x.angles.end());
    return sd;
}

std::vector<SurfacePoint> trace_segment(const DistanceField& field, const SurfacePoint& x, int which,
                                        double tol) {
    auto segs = field.segments_at(x, tol);
    if (which < 0 || which >= int(segs.size()))
        fail(ErrorCode::IndexOutOfRange, "trace_segment: segment " + std::to_string(which) +
                                             " of " + std::to_string(segs.size()));
    return field.trace(x, segs[which]);
}

bool point_in_face(const TriMesh& m, const SurfacePoint& sp, int f, Vec2& out) {
    if (sp.face == f) {
        out = m.point2d(sp);
        return true;
    }
    int v = m.corner_vertex(sp);
    if (v >= 0) {
        for (int k = 0; k < 3; ++k)
            if (m.faces[f][k] == v) {
                out = m.corner2d[3 * f + k];
                return true;
            }
        return false;
    }
    int h = m.on_halfedge(sp);
    if (h >= 0 && m.face_of(m.twin[h]) == f) {
        Vec2 q = m.from_face(h, m.point2d(sp));
        out = m.to_face(m.twin[h], Vec2{m.len(h) - q.x, 0.0});
        return true;
    }
    return false;
}

double polyline_length(const TriMesh& m, const std::vector<SurfacePoint>& poly) {
    double total = 0.0;
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
        const SurfacePoint& a = poly[i];
        const SurfacePoint& b = poly[i + 1];
        Vec2 pa, pb;
        if (point_in_face(m, b, a.face, pb)) {
            total += dist(m.point2d(a), pb);
            continue;
        }
        if (point_in_face(m, a, b.face, pa)) {
            total += dist(pa, m.point2d(b));
            continue;
        }
        bool done = false;
        int v = m.corner_vertex(a);
        if (v >= 0) {
            for (int h : vertex_ring(m, v)) {
                int f = m.face_of(h);
                Vec2 qa, qb;
                if (point_in_face(m, a, f, qa) && point_in_face(m, b, f, qb)) {
                    total += dist(qa, qb);
                    done = true;
                    break;
                }
            }
        }
        if (!done) fail(ErrorCode::InvalidArgument, "polyline points not in adjacent faces");
    }
    return total;
}

} // namespace critloc
