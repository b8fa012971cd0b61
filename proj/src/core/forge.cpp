#include "forge.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "error.hpp"

namespace critloc {

TriMesh make_torus_mesh(const FlatTorus& t_in, int res) {
    if (res < 8) fail(ErrorCode::InvalidArgument, "make_torus_mesh: res must be >= 8");
    FlatTorus t = reduced_of(t_in);
    Vec2 du = t.u / double(res), dv = t.v / double(res);
    double lu = norm(du), lv = norm(dv);
    bool split_bd = dot(t.u, t.v) > 0.0; // cut each cell along its shorter diagonal
    double ldiag = split_bd ? norm(dv - du) : norm(du + dv);

    std::vector<Vec3> pos(res * res);
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            Vec2 p = du * double(i) + dv * double(j);
            pos[i * res + j] = {p.x, p.y, 0.0};
        }
    auto vid = [&](int i, int j) { return ((i % res + res) % res) * res + ((j % res + res) % res); };

    std::vector<std::array<int, 3>> faces;
    std::vector<std::array<double, 3>> side;
    faces.reserve(2 * res * res);
    for (int i = 0; i < res; ++i)
        for (int j = 0; j < res; ++j) {
            int A = vid(i, j), B = vid(i + 1, j), C = vid(i + 1, j + 1), D = vid(i, j + 1);
            if (split_bd) {
                faces.push_back({A, B, D});
                side.push_back({ldiag, lv, lu}); // opposite A, B, D
                faces.push_back({B, C, D});
                side.push_back({lu, ldiag, lv});
            } else {
                faces.push_back({A, B, C});
                side.push_back({lv, ldiag, lu});
                faces.push_back({A, C, D});
                side.push_back({lu, lv, ldiag});
            }
        }
    return build_mesh_intrinsic(std::move(pos), std::move(faces), std::move(side));
}

namespace {

// base icosahedron, consistently wound outward
void icosahedron(std::vector<Vec3>& v, std::vector<std::array<int, 3>>& f) {
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    v = {{-1, p, 0}, {1, p, 0},  {-1, -p, 0}, {1, -p, 0}, {0, -1, p},  {0, 1, p},
         {0, -1, -p}, {0, 1, -p}, {p, 0, -1},  {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
    f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
         {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
         {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
}

} // namespace

TriMesh make_ellipsoid(double a, double b, double c, int subdiv) {
    if (!(a > 0.0 && b > 0.0 && c > 0.0))
        fail(ErrorCode::InvalidArgument, "make_ellipsoid: semi-axes must be positive");
    if (subdiv < 1) fail(ErrorCode::InvalidArgument, "make_ellipsoid: subdiv must be >= 1");

    std::vector<Vec3> base_v;
    std::vector<std::array<int, 3>> base_f;
    icosahedron(base_v, base_f);

    int k = subdiv;
    std::vector<Vec3> pos = base_v;
    std::map<std::pair<long long, long long>, int> edge_pts;
    auto edge_key = [](int u, int w) {
        return (long long)std::min(u, w) * 1000003LL + std::max(u, w);
    };
    auto edge_vertex = [&](int u, int w, int idx) {
        // idx in 1..k-1 measured from u; canonicalize to the smaller endpoint
        if (u > w) idx = k - idx;
        auto key = std::make_pair(edge_key(u, w), (long long)idx);
        auto it = edge_pts.find(key);
        if (it != edge_pts.end()) return it->second;
        int lo = std::min(u, w), hi = std::max(u, w);
        Vec3 p = base_v[lo] * (1.0 - double(idx) / k) + base_v[hi] * (double(idx) / k);
        pos.push_back(p);
        edge_pts[key] = int(pos.size()) - 1;
        return int(pos.size()) - 1;
    };

    std::vector<std::array<int, 3>> faces;
    for (const auto& tri : base_f) {
        // barycentric grid: row i = 0..k, column j = 0..i
        std::vector<std::vector<int>> grid(k + 1);
        for (int i = 0; i <= k; ++i) {
            grid[i].resize(i + 1);
            for (int j = 0; j <= i; ++j) {
                int b0 = k - i, b1 = i - j, b2 = j;
                if (b0 == k) grid[i][j] = tri[0];
                else if (b1 == k) grid[i][j] = tri[1];
                else if (b2 == k) grid[i][j] = tri[2];
                else if (b2 == 0) grid[i][j] = edge_vertex(tri[0], tri[1], i);
                else if (b1 == 0) grid[i][j] = edge_vertex(tri[0], tri[2], j);
                else if (b0 == 0) grid[i][j] = edge_vertex(tri[1], tri[2], j);
                else {
                    pos.push_back(base_v[tri[0]] * (double(b0) / k) + base_v[tri[1]] * (double(b1) / k) +
                                  base_v[tri[2]] * (double(b2) / k));
                    grid[i][j] = int(pos.size()) - 1;
                }
            }
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j <= i; ++j) {
                faces.push_back({grid[i][j], grid[i + 1][j], grid[i + 1][j + 1]});
                if (j < i) faces.push_back({grid[i][j], grid[i + 1][j + 1], grid[i][j + 1]});
            }
    }

    for (Vec3& p : pos) {
        Vec3 n = normalized(p);
        p = {a * n.x, b * n.y, c * n.z};
    }
    return build_mesh(std::move(pos), std::move(faces));
}

} // namespace critloc
