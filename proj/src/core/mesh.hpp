#pragma once

#include <array>
#include <string>
#include <vector>

#include "types.hpp"
#include "vec.hpp"

namespace critloc {

// Closed oriented triangle mesh with intrinsic geometry. Halfedge h = 3*f + k
// runs from corner k to corner k+1 of face f; faces wind consistently, so
// every edge carries exactly two opposite halfedges. All geodesic machinery
// reads edge lengths only; positions may be a non-isometric diagram embedding
// (flat tori, hyperbolic gluings).
struct TriMesh {
    std::vector<Vec3> positions;
    std::vector<std::array<int, 3>> faces;

    // connectivity
    std::vector<int> twin;          // per halfedge
    std::vector<int> edge_of;       // halfedge -> edge
    std::vector<int> edge_halfedge; // edge -> canonical halfedge
    std::vector<int> vertex_out;    // vertex -> one outgoing halfedge

    // intrinsic geometry
    std::vector<double> edge_len;
    std::vector<Vec2> corner2d;          // per halfedge slot: layout of face corners
    std::vector<double> corner_angle;    // per halfedge slot: angle at corner k
    std::vector<double> vertex_defect;   // 2*pi - angle sum
    bool intrinsic = false;

    int genus = 0;
    double mean_edge_len = 0.0;
    double diameter_hint = 0.0; // crude scale estimate (bounding sum)

    int n_vertices() const { return int(positions.size()); }
    int n_faces() const { return int(faces.size()); }
    int n_edges() const { return int(edge_halfedge.size()); }
    int n_halfedges() const { return int(twin.size()); }

    int face_of(int h) const { return h / 3; }
    int slot_of(int h) const { return h % 3; }
    int next(int h) const { return 3 * (h / 3) + (h % 3 + 1) % 3; }
    int prev(int h) const { return 3 * (h / 3) + (h % 3 + 2) % 3; }
    int tail(int h) const { return faces[h / 3][h % 3]; }
    int head(int h) const { return faces[h / 3][(h % 3 + 1) % 3]; }
    double len(int h) const { return edge_len[edge_of[h]]; }

    // layout of halfedge h inside its face: origin and unit direction
    Vec2 h_origin(int h) const { return corner2d[h]; }
    Vec2 h_dir(int h) const { return normalized(corner2d[next(h)] - corner2d[h]); }

    // frame conversions between a halfedge frame (origin at tail, +x toward
    // head, face on the left) and the face layout
    Vec2 to_face(int h, const Vec2& p) const {
        Vec2 d = h_dir(h);
        return h_origin(h) + d * p.x + perp(d) * p.y;
    }
    Vec2 from_face(int h, const Vec2& p) const {
        Vec2 d = h_dir(h);
        Vec2 r = p - h_origin(h);
        return {dot(r, d), cross(d, r)};
    }
    Vec2 vec_to_face(int h, const Vec2& v) const {
        Vec2 d = h_dir(h);
        return d * v.x + perp(d) * v.y;
    }

    // point of barycentric coordinates in the face layout / in space
    Vec2 point2d(const SurfacePoint& sp) const {
        int f = sp.face;
        return corner2d[3 * f] * sp.b0 + corner2d[3 * f + 1] * sp.b1 + corner2d[3 * f + 2] * sp.b2;
    }
    Vec3 point3d(const SurfacePoint& sp) const {
        int f = sp.face;
        return positions[faces[f][0]] * sp.b0 + positions[faces[f][1]] * sp.b1 +
               positions[faces[f][2]] * sp.b2;
    }

    // nearest vertex if the point sits on a corner (bary ~ 1), else -1
    int corner_vertex(const SurfacePoint& sp, double eps = 1e-9) const;
    // halfedge of sp.face whose edge contains the point (bary ~ 0 opposite), else -1
    int on_halfedge(const SurfacePoint& sp, double eps = 1e-9) const;
};

// Validates and assembles connectivity + intrinsic data. Lengths from the
// embedding. Throws NonManifold / NonOrientable / DegenerateFace.
TriMesh build_mesh(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces);

// Same, with prescribed per-face side lengths: side k is the edge opposite
// corner k. Shared edges must agree.
TriMesh build_mesh_intrinsic(std::vector<Vec3> positions, std::vector<std::array<int, 3>> faces,
                             std::vector<std::array<double, 3>> side_len);

SurfacePoint vertex_point(const TriMesh& m, int v);
SurfacePoint face_point(const TriMesh& m, int f, double b0, double b1, double b2);

// Total corner angle around a vertex.
double vertex_total_angle(const TriMesh& m, int v);

// Outgoing halfedges around a vertex, in a fixed rotational order.
std::vector<int> vertex_ring(const TriMesh& m, int v);

// OBJ / JSON mesh I/O (triangles only; JSON carries intrinsic lengths).
TriMesh load_obj(const std::string& path);
void save_obj(const std::string& path, const TriMesh& m,
              const std::vector<std::vector<Vec3>>* polylines = nullptr,
              const std::vector<double>* vertex_scalar = nullptr);
TriMesh mesh_from_json_text(const std::string& text);
std::string mesh_to_json_text(const TriMesh& m);

} // namespace critloc
