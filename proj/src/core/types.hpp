#pragma once

#include <string>
#include <vector>

#include "vec.hpp"

namespace critloc {

// Point on a triangle mesh: face index plus barycentric coordinates.
struct SurfacePoint {
    int face = -1;
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;

    SurfacePoint() = default;
    SurfacePoint(int f, double a, double b, double c) : face(f), b0(a), b1(b), b2(c) {}
};

// Direction bundle on the tangent circle of a point, angles normalized so the
// full cone angle maps to 2*pi. Sorted ascending in [0, 2*pi).
struct DirectionSet {
    enum class At { Source, Target };
    At at = At::Source;
    std::vector<double> angles;
};

// Maximal circular gap between consecutive directions; 2*pi for a singleton.
inline double max_circular_gap(const std::vector<double>& sorted_angles) {
    if (sorted_angles.empty()) return kTwoPi;
    if (sorted_angles.size() == 1) return kTwoPi;
    double gap = 0.0;
    for (size_t i = 0; i + 1 < sorted_angles.size(); ++i)
        gap = std::max(gap, sorted_angles[i + 1] - sorted_angles[i]);
    gap = std::max(gap, sorted_angles.front() + kTwoPi - sorted_angles.back());
    return gap;
}

struct LocusNode {
    Vec2 uv;              // planar coordinates (exact torus backend / diagrams)
    SurfacePoint sp;      // mesh location (mesh backend)
    double dist = 0.0;    // rho(y, node)
    int degree = 0;       // degree in the full graph
    int cyclic_degree = 0;
    bool cyclic = false;
};

struct LocusEdge {
    int a = -1, b = -1;   // node indices
    std::vector<Vec2> poly_uv;
    std::vector<SurfacePoint> poly_sp;
    double length = 0.0;
    bool cyclic = false;
};

// Embedded cut-locus graph C(y). Loops and multi-edges allowed.
struct CutLocusGraph {
    std::vector<LocusNode> nodes;
    std::vector<LocusEdge> edges;
    bool from_mesh = false;
};

struct GraphStats {
    int n = 0;      // cyclic-part nodes of degree >= 3
    int m = 0;      // cyclic-part edges between them
    int q = 0;      // cycle rank m - n + 1
    int genus = 0;  // q / 2
};

struct CriticalSite {
    SurfacePoint location;      // mesh backend
    Vec2 uv;                    // planar representative (torus backend)
    double rho = 0.0;
    int seg_count = 0;
    int type = 0;               // 2 or 3
    DirectionSet dirs_at_y;
    enum class Kind { EdgeInterior, Ramification } kind = Kind::EdgeInterior;
    int locus_edge = -1;        // owning cut-locus edge (edge-interior sites)
    int locus_node = -1;        // owning node (ramification sites)
};

// Piece of a tangent cycle on T_y: either an arc of the circle (with a signed
// net sweep) or a straight chord between two directions.
struct CyclePiece {
    enum class Kind { Arc, Chord } kind = Kind::Chord;
    double from = 0.0;   // angle
    double to = 0.0;     // angle
    double sweep = 0.0;  // signed angular sweep (arcs only)
    int chord_node = -1; // locus node the chord belongs to (chords only)
};

struct TangentCycle {
    enum class Kind { Vertex, Edge } kind = Kind::Vertex;
    int locus_index = -1; // node index (vertex-cycle) or edge index (edge-cycle)
    std::vector<CyclePiece> pieces;
    int winding = 0;
    bool center_on_cycle = false;
};

// Direction data the tangent-cycle builder consumes, produced by either
// backend: per cyclic node the full direction set at y, per cyclic edge the
// two flank tracks (arc endpoints must be elements of the node sets).
struct FlankArc {
    double at_a = 0.0;  // direction limit at node a
    double at_b = 0.0;  // direction limit at node b
    double sweep = 0.0; // signed sweep going a -> b
};

struct EdgeTangentData {
    int edge = -1;
    FlankArc flank[2];
};

struct TangentData {
    std::vector<std::vector<double>> node_dirs; // per cyclic node, sorted
    std::vector<EdgeTangentData> edges;         // per cyclic edge
};

} // namespace critloc
