#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mesh.hpp"
#include "types.hpp"

namespace critloc {

struct SolveOptions {
    double merge_tol = 1e-7;       // source-coincidence merge, relative to scale
    double dir_merge = 1e-3;       // angular merge of coincident segment classes
    double flat_defect_eps = 1e-6; // vertices with defect below this relay geodesics
    std::uint64_t max_windows = 0; // 0 = default cap (or CRITLOC_MAX_WINDOWS)
};

// Interval of a directed edge covered by one bundle of geodesics from a common
// (pseudo)source, unfolded into the halfedge frame. Geodesics cross from
// face(halfedge) into the opposite face.
struct Window {
    double t0 = 0.0, t1 = 0.0;
    double sx = 0.0, sy = 0.0; // unfolded source, sy >= 0
    double sigma = 0.0;        // pseudo-source offset distance
    int halfedge = -1;
    int parent = -1;     // window that produced this one
    int src_vertex = -1; // pseudo-source vertex (-1 for the true source)
    bool dead = false;

    double dist_at(double t) const { return sigma + std::hypot(t - sx, sy); }
    double min_dist() const { return dist_at(std::clamp(sx, t0, t1)); }
};

// One geodesic class reaching a query point.
struct SegmentInfo {
    double length = 0.0;
    double dir_at_x = 0.0; // angle in the query chart at x
    double dir_at_y = 0.0; // angle on the normalized tangent circle at the source
    int window = -1;       // arrival window (-1: direct in-face or via corner)
    int via_vertex = -1;   // corner vertex the geodesic arrives through, if any
    Vec2 src_in_chart;     // unfolded (pseudo)source in the arrival face layout
};

class DistanceField {
public:
    DistanceField(const TriMesh& mesh, SurfacePoint source, SolveOptions opts);

    const TriMesh& mesh() const { return *mesh_; }
    const SurfacePoint& source() const { return source_; }
    const SolveOptions& options() const { return opts_; }

    double vertex_distance(int v) const { return vtx_dist_[v]; }
    const std::vector<double>& vertex_distances() const { return vtx_dist_; }

    // All geodesic classes within tol*(1 + min length) of minimal.
    std::vector<SegmentInfo> segments_at(const SurfacePoint& x, double tol) const;
    double distance_at(const SurfacePoint& x) const;

    // Polyline of the segment realizing `seg`, from x back to the source.
    std::vector<SurfacePoint> trace(const SurfacePoint& x, const SegmentInfo& seg) const;

    const std::vector<Window>& windows() const { return windows_; }
    const std::vector<std::vector<int>>& edge_windows() const { return edge_windows_; }
    std::uint64_t windows_created() const { return created_; }

    // direction angle at the source for a geodesic arriving through `window`
    // at the point p expressed in that window's halfedge frame.
    double source_direction(int window, Vec2 p_in_hframe) const;

    void run();

private:
    struct QEntry {
        double key;
        int id;
        bool vertex;
    };

    void init_source();
    void add_window(Window w);
    void propagate(int wid);
    void touch_vertex(int v, double d, int via_window);
    void spawn_pseudo(int v);
    bool incoming_at_vertex(int v, int& face, Vec2& dir) const;
    void heap_push(QEntry e);
    bool heap_pop(QEntry& e);
    double chart_angle_at_source(int root_window, const Vec2& first_point_hframe) const;
    double source_chart_angle_of_vec(int face, Vec2 dir) const;

    const TriMesh* mesh_;
    SurfacePoint source_;
    SolveOptions opts_;

    std::vector<Window> windows_;
    std::vector<std::vector<int>> edge_windows_;
    std::vector<double> vtx_dist_;
    std::vector<int> vtx_window_;
    std::vector<char> vtx_spawned_;
    std::vector<QEntry> heap_;
    bool running_ = false;

    double scale_ = 1.0;
    std::uint64_t created_ = 0;
    std::uint64_t max_windows_ = 0;
};

DistanceField solve_distance(const TriMesh& mesh, const SurfacePoint& y,
                             const SolveOptions& opts = {});

// Segment multiplicity and tangent directions at both endpoints.
struct SegmentDirections {
    int count = 0;
    DirectionSet at_y;
    DirectionSet at_x;
    std::vector<SegmentInfo> segments;
};
SegmentDirections segment_directions(const DistanceField& field, const SurfacePoint& x, double tol);

std::vector<SurfacePoint> trace_segment(const DistanceField& field, const SurfacePoint& x, int which,
                                        double tol);

// Intrinsic length of a polyline of surface points (per-face straight pieces).
double polyline_length(const TriMesh& m, const std::vector<SurfacePoint>& poly);

// Position of sp in face f's layout when representable there (same face,
// shared edge unfolding, or shared corner).
bool point_in_face(const TriMesh& m, const SurfacePoint& sp, int f, Vec2& out);

} // namespace critloc
