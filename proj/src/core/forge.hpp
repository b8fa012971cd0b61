#pragma once

#include <string>
#include <vector>

#include "geodesic.hpp"
#include "mesh.hpp"
#include "torus.hpp"

namespace critloc {

// Flat torus mesh on a res x res grid of the fundamental domain, cells split
// along the shorter diagonal. Intrinsic lengths are exact; all defects zero.
TriMesh make_torus_mesh(const FlatTorus& t, int res);

// Icosphere scaled to semi-axes (a, b, c); subdiv doubles edges each level.
TriMesh make_ellipsoid(double a, double b, double c, int subdiv);

// Boundary identification of a regular 6(2g-1)-gon with all angles 2*pi/3.
struct GluingScheme {
    int genus = 0;
    int sides = 0;
    std::vector<int> vertex_labels;
    std::vector<std::string> edge_labels;
};

// The 18-gon scheme for genus 2, and the inductive handle insertion g -> g+1.
GluingScheme d2_scheme();
GluingScheme dg_scheme(int genus);

void validate_scheme(const GluingScheme& s);

// Piecewise-flat approximation of the glued polygon: regular hyperbolic
// (genus >= 2) or Euclidean (genus 1) polygon triangulated in polar rings with
// exact geodesic edge lengths, boundary identified per the scheme. res = number
// of subdivisions per polygon side.
TriMesh make_polygon_gluing(const GluingScheme& scheme, int res);

// Circumradius of the regular n-gon with interior angle 2*pi/3 in curvature -1.
double hyperbolic_polygon_circumradius(int n);

struct BumpSpec {
    SurfacePoint center;
    double radius = 0.0;
    double height = 0.0;
};

// Rotationally symmetric C^1 cosine-cap bumps: edge lengths inside each disk
// are replaced by lifted arclengths; everything outside is untouched.
TriMesh apply_bump(const TriMesh& m, const BumpSpec& spec);
TriMesh apply_bumps(const TriMesh& m, const std::vector<BumpSpec>& specs);

// Radial arclength excess of a bump from apex to rim.
double bump_radial_excess(double radius, double height);
// Height whose radial excess equals the given value (monotone, bisection).
double bump_height_for_excess(double radius, double excess);

// Hexagonal-torus experiment: congruent bumps at y and the three edge
// midpoints, height tuned so the five distances from the y-apex agree.
struct HexBumpResult {
    TriMesh mesh;
    int apex_vertex = -1;
    double target_distance = 0.0;
    double height = 0.0;
    double radius = 0.0;
};
HexBumpResult make_bumped_hex_torus(int res, double radius = -1.0, double agree_tol = 1e-4);

} // namespace critloc
