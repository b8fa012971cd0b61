#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "core/error.hpp"
#include "core/forge.hpp"
#include "core/mesh.hpp"

using namespace critloc;

namespace {

void icosa(std::vector<Vec3>& v, std::vector<std::array<int, 3>>& f) {
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    v = {{-1, p, 0},  {1, p, 0},  {-1, -p, 0}, {1, -p, 0}, {0, -1, p},  {0, 1, p},
         {0, -1, -p}, {0, 1, -p}, {p, 0, -1},  {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
    f = {{0, 11, 5},  {0, 5, 1},  {0, 1, 7},  {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
         {3, 8, 9},   {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
}

} // namespace

TEST_CASE("icosahedron builds with genus 0") {
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> f;
    icosa(v, f);
    TriMesh m = build_mesh(v, f);
    CHECK(m.n_vertices() == 12);
    CHECK(m.n_edges() == 30);
    CHECK(m.n_faces() == 20);
    CHECK(m.genus == 0);
    double defect_sum = 0.0;
    for (int i = 0; i < m.n_vertices(); ++i) {
        CHECK(m.vertex_defect[i] > 0.0);
        defect_sum += m.vertex_defect[i];
    }
    // Gauss-Bonnet
    CHECK(defect_sum == doctest::Approx(4.0 * kPi).epsilon(1e-12));
}

TEST_CASE("vertex rings cover the umbrella and sum the cone angle") {
    std::vector<Vec3> v;
    std::vector<std::array<int, 3>> f;
    icosa(v, f);
    TriMesh m = build_mesh(v, f);
    for (int vtx = 0; vtx < m.n_vertices(); ++vtx) {
        auto ring = vertex_ring(m, vtx);
        CHECK(ring.size() == 5);
        double sum = 0.0;
        for (int h : ring) {
            CHECK(m.tail(h) == vtx);
            sum += m.corner_angle[h];
        }
        CHECK(sum == doctest::Approx(vertex_total_angle(m, vtx)).epsilon(1e-12));
    }
}

TEST_CASE("open and broken meshes are rejected") {
    // open disk: two triangles sharing an edge
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    std::vector<std::array<int, 3>> f = {{0, 1, 2}, {1, 3, 2}};
    try {
        build_mesh(v, f);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code == ErrorCode::NonManifold);
    }

    // flipped face -> inconsistent winding
    std::vector<Vec3> iv;
    std::vector<std::array<int, 3>> iff;
    icosa(iv, iff);
    std::swap(iff[3][0], iff[3][1]);
    try {
        build_mesh(iv, iff);
        CHECK(false);
    } catch (const Error& e) {
        CHECK((e.code == ErrorCode::NonOrientable || e.code == ErrorCode::NonManifold));
    }

    // repeated vertex in a face
    std::vector<std::array<int, 3>> dup = iff;
    dup[0] = {0, 0, 5};
    CHECK_THROWS_AS(build_mesh(iv, dup), Error);

    // degenerate (collinear) intrinsic triangle on tetrahedron connectivity
    std::vector<Vec3> tv = {{0, 0, 0}, {1, 0, 0}, {0.5, 1, 0}, {0.5, 0.5, 1}};
    std::vector<std::array<int, 3>> tf = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    std::vector<std::array<double, 3>> sl(4, {1.0, 1.0, 2.0});
    CHECK_THROWS_AS(build_mesh_intrinsic(tv, tf, sl), Error);
}

TEST_CASE("flat torus grid is genus 1 with zero defects") {
    TriMesh m = make_torus_mesh(reduce_basis({1, 0}, {0, 1}), 16);
    CHECK(m.n_vertices() == 256);
    CHECK(m.n_faces() == 512);
    CHECK(m.n_edges() == 768);
    CHECK(m.genus == 1);
    for (int v = 0; v < m.n_vertices(); ++v)
        CHECK(std::abs(m.vertex_defect[v]) < 1e-12);

    TriMesh hx = make_torus_mesh(reduce_basis({1, 0}, {0.5, std::sqrt(3.0) / 2}), 12);
    CHECK(hx.genus == 1);
    for (int v = 0; v < hx.n_vertices(); ++v)
        CHECK(std::abs(hx.vertex_defect[v]) < 1e-12);

    CHECK_THROWS_AS(make_torus_mesh(reduce_basis({1, 0}, {0, 1}), 4), Error);
}

TEST_CASE("ellipsoid forging") {
    TriMesh s = make_ellipsoid(1, 1, 1, 4);
    CHECK(s.genus == 0);
    CHECK(s.n_faces() == 20 * 16);
    for (int v = 0; v < s.n_vertices(); ++v)
        CHECK(norm(s.positions[v]) == doctest::Approx(1.0).epsilon(1e-12));

    TriMesh e = make_ellipsoid(1, 1, 3, 5);
    CHECK(e.genus == 0);
    CHECK_THROWS_AS(make_ellipsoid(1, 1, 0, 3), Error);
}

TEST_CASE("surface point helpers") {
    TriMesh m = make_ellipsoid(1, 1, 1, 2);
    SurfacePoint vp = vertex_point(m, 7);
    CHECK(m.corner_vertex(vp) == 7);
    SurfacePoint fp = face_point(m, 3, 0.2, 0.3, 0.5);
    CHECK(m.corner_vertex(fp) == -1);
    CHECK(m.on_halfedge(fp) == -1);
    SurfacePoint ep = face_point(m, 3, 0.5, 0.5, 0.0);
    CHECK(m.on_halfedge(ep) == 9); // edge v0-v1 of face 3
}

TEST_CASE("OBJ and JSON round trips") {
    TriMesh m = make_ellipsoid(1, 1, 2, 3);
    save_obj("roundtrip.obj", m);
    TriMesh m2 = load_obj("roundtrip.obj");
    CHECK(m2.n_vertices() == m.n_vertices());
    CHECK(m2.n_faces() == m.n_faces());
    CHECK(m2.genus == 0);
    std::remove("roundtrip.obj");

    TriMesh t = make_torus_mesh(reduce_basis({1, 0}, {0.5, std::sqrt(3.0) / 2}), 8);
    std::string js = mesh_to_json_text(t);
    TriMesh t2 = mesh_from_json_text(js);
    CHECK(t2.genus == 1);
    CHECK(t2.intrinsic);
    CHECK(t2.n_edges() == t.n_edges());
    for (int e = 0; e < t.n_edges(); ++e)
        CHECK(t2.edge_len[e] == doctest::Approx(t.edge_len[e]).epsilon(1e-12));

    CHECK_THROWS_AS(mesh_from_json_text("{not json"), Error);
}
