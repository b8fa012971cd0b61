#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace critloc {

namespace {

void check_face_indices(const std::vector<Vec3>& pos, const std::vector<std::array<int, 3>>& faces) {
    int nv = int(pos.size());
    for (size_t f = 0; f < faces.size(); ++f) {
        const auto& fc = faces[f];
        for (int k = 0; k < 3; ++k)
            if (fc[k] < 0 || fc[k] >= nv)
                fail(ErrorCode::InvalidArgument,
                     "face " + std::to_string(f) + " references vertex " + std::to_string(fc[k]));
        if (fc[0] == fc[1] || fc[1] == fc[2] || fc[2] == fc[0])
            fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " repeats a vertex");
    }
}

TriMesh assemble(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces,
                 std::vector<std::array<double, 3>>* side_len) {
    check_face_indices(positions, faces);
    TriMesh m;
    m.positions = std::move(positions);
    m.faces = std::move(faces);
    int nh = 3 * m.n_faces();

    // pair halfedges over unordered vertex pairs
    std::map<std::pair<int, int>, std::vector<int>> bucket;
    for (int h = 0; h < nh; ++h) {
        int a = m.faces[h / 3][h % 3];
        int b = m.faces[h / 3][(h % 3 + 1) % 3];
        bucket[{std::min(a, b), std::max(a, b)}].push_back(h);
    }
    m.twin.assign(nh, -1);
    m.edge_of.assign(nh, -1);
    for (auto& [key, hs] : bucket) {
        if (hs.size() != 2)
            fail(ErrorCode::NonManifold, "edge (" + std::to_string(key.first) + "," +
                                             std::to_string(key.second) + ") borders " +
                                             std::to_string(hs.size()) + " faces");
        int h0 = hs[0], h1 = hs[1];
        int t0 = m.faces[h0 / 3][h0 % 3];
        int t1 = m.faces[h1 / 3][h1 % 3];
        if (t0 == t1)
            fail(ErrorCode::NonOrientable, "edge (" + std::to_string(key.first) + "," +
                                               std::to_string(key.second) +
                                               ") traversed twice in the same direction");
        m.twin[h0] = h1;
        m.twin[h1] = h0;
        int e = int(m.edge_halfedge.size());
        m.edge_halfedge.push_back(std::min(h0, h1));
        m.edge_of[h0] = e;
        m.edge_of[h1] = e;
    }

    // vertex umbrellas: all outgoing halfedges reachable by rotation
    int nv = m.n_vertices();
    m.vertex_out.assign(nv, -1);
    std::vector<int> out_count(nv, 0);
    for (int h = 0; h < nh; ++h) {
        int v = m.tail(h);
        m.vertex_out[v] = h;
        out_count[v]++;
    }
    for (int v = 0; v < nv; ++v) {
        if (m.vertex_out[v] < 0)
            fail(ErrorCode::InvalidArgument, "isolated vertex " + std::to_string(v));
        int h = m.vertex_out[v], steps = 0;
        do {
            h = m.twin[m.prev(h)];
            if (++steps > out_count[v]) break;
        } while (h != m.vertex_out[v]);
        if (steps != out_count[v])
            fail(ErrorCode::NonManifold, "vertex " + std::to_string(v) + " link is not a single cycle");
    }

    // connected?
    {
        std::vector<char> seen(m.n_faces(), 0);
        std::vector<int> stack = {0};
        seen[0] = 1;
        int cnt = 1;
        while (!stack.empty()) {
            int f = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                int g = m.face_of(m.twin[3 * f + k]);
                if (!seen[g]) {
                    seen[g] = 1;
                    cnt++;
                    stack.push_back(g);
                }
            }
        }
        if (cnt != m.n_faces()) fail(ErrorCode::InvalidArgument, "mesh is disconnected");
    }

    // edge lengths
    m.edge_len.assign(m.n_edges(), 0.0);
    if (side_len) {
        m.intrinsic = true;
        if (int(side_len->size()) != m.n_faces())
            fail(ErrorCode::InvalidArgument, "side_len count != face count");
        std::vector<char> set(m.n_edges(), 0);
        for (int f = 0; f < m.n_faces(); ++f)
            for (int k = 0; k < 3; ++k) {
                // side k is opposite corner k = edge from corner k+1 to k+2
                int h = 3 * f + (k + 1) % 3;
                double L = (*side_len)[f][k];
                if (!(L > 0.0)) fail(ErrorCode::InvalidArgument, "non-positive edge length");
                int e = m.edge_of[h];
                if (set[e]) {
                    if (std::abs(m.edge_len[e] - L) > 1e-9 * std::max(1.0, m.edge_len[e]))
                        fail(ErrorCode::InvalidArgument,
                             "inconsistent intrinsic lengths on edge " + std::to_string(e));
                } else {
                    m.edge_len[e] = L;
                    set[e] = 1;
                }
            }
    } else {
        for (int e = 0; e < m.n_edges(); ++e) {
            int h = m.edge_halfedge[e];
            m.edge_len[e] = dist(m.positions[m.tail(h)], m.positions[m.head(h)]);
            if (!(m.edge_len[e] > 0.0))
                fail(ErrorCode::DegenerateFace, "zero-length edge " + std::to_string(e));
        }
    }

    // per-face layout from lengths
    m.corner2d.assign(nh, Vec2{});
    m.corner_angle.assign(nh, 0.0);
    for (int f = 0; f < m.n_faces(); ++f) {
        double c = m.len(3 * f);     // |v0 v1|
        double a = m.len(3 * f + 1); // |v1 v2|
        double b = m.len(3 * f + 2); // |v2 v0|
        double x2 = (b * b + c * c - a * a) / (2.0 * c);
        double y2sq = b * b - x2 * x2;
        double scale2 = std::max({a, b, c});
        if (y2sq <= 1e-24 * scale2 * scale2)
            fail(ErrorCode::DegenerateFace, "face " + std::to_string(f) + " is (nearly) degenerate");
        m.corner2d[3 * f] = {0.0, 0.0};
        m.corner2d[3 * f + 1] = {c, 0.0};
        m.corner2d[3 * f + 2] = {x2, std::sqrt(y2sq)};
        for (int k = 0; k < 3; ++k) {
            Vec2 p = m.corner2d[3 * f + k];
            Vec2 u = m.corner2d[3 * f + (k + 1) % 3] - p;
            Vec2 w = m.corner2d[3 * f + (k + 2) % 3] - p;
            m.corner_angle[3 * f + k] = std::atan2(std::abs(cross(u, w)), dot(u, w));
        }
    }

    m.vertex_defect.assign(nv, kTwoPi);
    for (int h = 0; h < nh; ++h) m.vertex_defect[m.tail(h)] -= m.corner_angle[h];

    int chi = m.n_vertices() - m.n_edges() + m.n_faces();
    if (chi % 2 != 0 || chi > 2)
        fail(ErrorCode::InvalidArgument, "Euler characteristic " + std::to_string(chi));
    m.genus = (2 - chi) / 2;

    double tot = 0.0;
    for (double L : m.edge_len) tot += L;
    m.mean_edge_len = tot / std::max(1, m.n_edges());
    double area = 0.0;
    for (int f = 0; f < m.n_faces(); ++f) {
        Vec2 p1 = m.corner2d[3 * f + 1], p2 = m.corner2d[3 * f + 2];
        area += 0.5 * std::abs(cross(p1, p2));
    }
    m.diameter_hint = std::max(std::sqrt(area), 3.0 * m.mean_edge_len);
    return m;
}

} // namespace

TriMesh build_mesh(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces) {
    return assemble(std::move(positions), std::move(faces), nullptr);
}

TriMesh build_mesh_intrinsic(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces,
                             std::vector<std::array<double, 3>> side_len) {
    return assemble(std::move(positions), std::move(faces), &side_len);
}

int TriMesh::corner_vertex(const SurfacePoint& sp, double eps) const {
    if (sp.b0 >= 1.0 - eps) return faces[sp.face][0];
    if (sp.b1 >= 1.0 - eps) return faces[sp.face][1];
    if (sp.b2 >= 1.0 - eps) return faces[sp.face][2];
    return -1;
}

int TriMesh::on_halfedge(const SurfacePoint& sp, double eps) const {
    if (std::abs(sp.b2) <= eps) return 3 * sp.face;     // edge v0-v1
    if (std::abs(sp.b0) <= eps) return 3 * sp.face + 1; // edge v1-v2
    if (std::abs(sp.b1) <= eps) return 3 * sp.face + 2; // edge v2-v0
    return -1;
}

SurfacePoint vertex_point(const TriMesh& m, int v) {
    int h = m.vertex_out[v];
    SurfacePoint sp;
    sp.face = m.face_of(h);
    int k = m.slot_of(h);
    sp.b0 = k == 0 ? 1.0 : 0.0;
    sp.b1 = k == 1 ? 1.0 : 0.0;
    sp.b2 = k == 2 ? 1.0 : 0.0;
    return sp;
}

SurfacePoint face_point(const TriMesh& m, int f, double b0, double b1, double b2) {
    double s = b0 + b1 + b2;
    if (f < 0 || f >= m.n_faces() || s <= 0.0)
        fail(ErrorCode::InvalidArgument, "invalid surface point");
    return {f, b0 / s, b1 / s, b2 / s};
}

double vertex_total_angle(const TriMesh& m, int v) { return kTwoPi - m.vertex_defect[v]; }

std::vector<int> vertex_ring(const TriMesh& m, int v) {
    std::vector<int> ring;
    int h0 = m.vertex_out[v], h = h0;
    do {
        ring.push_back(h);
        h = m.twin[m.prev(h)]; // counterclockwise for CCW faces
    } while (h != h0);
    return ring;
}

TriMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    std::vector<Vec3> pos;
    std::vector<std::array<int, 3>> faces;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 p;
            ss >> p.x >> p.y >> p.z;
            pos.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                size_t slash = tok.find('/');
                idx.push_back(std::stoi(tok.substr(0, slash)) - 1);
            }
            if (idx.size() != 3)
                fail(ErrorCode::ParseError, "OBJ face with " + std::to_string(idx.size()) +
                                                " vertices (triangles only)");
            faces.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return build_mesh(std::move(pos), std::move(faces));
}

void save_obj(const std::string& path, const TriMesh& m,
              const std::vector<std::vector<Vec3>>* polylines,
              const std::vector<double>* vertex_scalar) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out.precision(17);
    for (int v = 0; v < m.n_vertices(); ++v) {
        const Vec3& p = m.positions[v];
        out << "v " << p.x << " " << p.y << " " << p.z;
        if (vertex_scalar) out << " " << (*vertex_scalar)[v];
        out << "\n";
    }
    for (const auto& f : m.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    if (polylines) {
        int base = m.n_vertices() + 1;
        for (const auto& poly : *polylines) {
            for (const Vec3& p : poly) out << "v " << p.x << " " << p.y << " " << p.z << "\n";
            out << "l";
            for (size_t i = 0; i < poly.size(); ++i) out << " " << base + int(i);
            out << "\n";
            base += int(poly.size());
        }
    }
}

TriMesh mesh_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::ParseError, std::string("mesh JSON: ") + e.what());
    }
    std::vector<Vec3> pos;
    for (const auto& p : j.at("vertices")) pos.push_back({p.at(0), p.at(1), p.size() > 2 ? double(p.at(2)) : 0.0});
    std::vector<std::array<int, 3>> faces;
    for (const auto& f : j.at("faces")) faces.push_back({f.at(0), f.at(1), f.at(2)});
    if (j.contains("side_lengths")) {
        std::vector<std::array<double, 3>> sl;
        for (const auto& s : j["side_lengths"]) sl.push_back({s.at(0), s.at(1), s.at(2)});
        return build_mesh_intrinsic(std::move(pos), std::move(faces), std::move(sl));
    }
    return build_mesh(std::move(pos), std::move(faces));
}

std::string mesh_to_json_text(const TriMesh& m) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const Vec3& p : m.positions) j["vertices"].push_back({p.x, p.y, p.z});
    j["faces"] = nlohmann::json::array();
    for (const auto& f : m.faces) j["faces"].push_back({f[0], f[1], f[2]});
    if (m.intrinsic) {
        nlohmann::json sl = nlohmann::json::array();
        for (int f = 0; f < m.n_faces(); ++f)
            sl.push_back({m.len(3 * f + 1), m.len(3 * f + 2), m.len(3 * f)});
        j["side_lengths"] = sl;
    }
    j["genus"] = m.genus;
    return j.dump(2);
}

} // namespace critloc
