#pragma once

#include <vector>

#include "types.hpp"
#include "vec.hpp"

namespace critloc {

// Flat torus R^2 / L(u, v). Operations assume (and internally use) a
// Lagrange-reduced basis; construction through reduce_basis guarantees it.
struct FlatTorus {
    Vec2 u{1.0, 0.0};
    Vec2 v{0.0, 1.0};
    bool reduced = false;

    double det() const { return cross(u, v); }
};

// Point on the torus, stored as lattice coefficients p = a*u + b*v with
// a, b canonicalized into [0, 1).
struct TorusPoint {
    double a = 0.0, b = 0.0;

    TorusPoint() = default;
    TorusPoint(double a_, double b_) : a(a_), b(b_) {}
};

struct SegmentSet {
    TorusPoint target;
    double length = 0.0;
    std::vector<Vec2> reps;             // plane representatives q with |q - y| = length
    std::vector<double> directions_at_y; // sorted ascending
    std::vector<double> directions_at_x;
};

// Lagrange (Gauss) reduction. The returned basis spans the same lattice,
// satisfies |u| <= |v|, |dot(u,v)| <= |u|^2/2 and det > 0.
FlatTorus reduce_basis(const Vec2& u, const Vec2& v);

// Equivalent reduced torus (identity if already reduced).
FlatTorus reduced_of(const FlatTorus& t);

Vec2 torus_to_plane(const FlatTorus& t, const TorusPoint& p);
TorusPoint plane_to_torus(const FlatTorus& t, const Vec2& p);
TorusPoint canonical_point(const FlatTorus& t, const TorusPoint& p);

// True when the two points coincide on the torus within eps (plane metric).
bool torus_points_equal(const FlatTorus& t, const TorusPoint& p, const TorusPoint& q, double eps);

// Voronoi-relevant lattice vectors of the reduced lattice: 2 pairs for
// rectangular lattices, 3 otherwise. One representative per +- pair.
std::vector<Vec2> relevant_vectors(const FlatTorus& t);
bool is_rectangular(const FlatTorus& t);

// Vertices of the Voronoi cell of the origin (full set, antipodal pairs included).
std::vector<Vec2> voronoi_cell_vertices(const FlatTorus& t);

// Covering radius = max distance from any point to the lattice.
double covering_radius(const FlatTorus& t);

double torus_distance(const FlatTorus& t, const TorusPoint& y, const TorusPoint& x);

SegmentSet segments_between(const FlatTorus& t, const TorusPoint& y, const TorusPoint& x,
                            double tol = 1e-9);

// Cut locus C(y) as an embedded graph in the fundamental domain around y.
CutLocusGraph cut_locus_torus(const FlatTorus& t, const TorusPoint& y);

// Exact enumeration of Q_y^{-1}: Voronoi edge midpoints (type 2) and cell
// vertices passing the max-gap test (type 3), sorted by distance.
std::vector<CriticalSite> q_inverse_torus(const FlatTorus& t, const TorusPoint& y,
                                          double tol = 1e-9, double eps_theta = 1e-3);

// Farthest points from y (argmax of rho_y), deduplicated on the torus.
std::vector<TorusPoint> farthest_set_torus(const FlatTorus& t, const TorusPoint& y,
                                           double tol = 1e-9);

// Flank-arc / node direction data for the tangent-cycle construction,
// computed in closed form from the Voronoi cell. Requires the graph returned
// by cut_locus_torus (same node/edge order).
TangentData torus_tangent_data(const FlatTorus& t, const TorusPoint& y, const CutLocusGraph& g);

} // namespace critloc
