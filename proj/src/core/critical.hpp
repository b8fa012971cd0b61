#pragma once

#include <string>
#include <vector>

#include "locus.hpp"
#include "types.hpp"

namespace critloc {

// Max-gap criticality test: no circular gap between consecutive segment
// directions may exceed pi (closed condition, eps-slackened).
bool is_critical(const DirectionSet& dirs, double eps_theta);

struct EnumerateOptions {
    double tie_tol = -1.0;     // default 3 * mean edge length
    double eps_theta = -1.0;   // default 5 h / injectivity estimate
    double site_merge = -1.0;  // default 3 * mean edge length
    int min_edge_samples = 16;
};

struct EnumerationResult {
    std::vector<CriticalSite> sites;
    int sharp2 = 0;
    int sharp3 = 0;
    std::vector<std::string> diagnostics; // MultipleSitesPerEdge etc.
};

// Q_y^{-1} on the mesh backend: bisection on the diameter defect along each
// cyclic edge (tree edges for genus 0) plus direct tests at ramification
// nodes.
EnumerationResult enumerate_q_inverse(const TriMesh& mesh, const SurfacePoint& y,
                                      const CutLocusGraph& locus, const DistanceField& field,
                                      const EnumerateOptions& opts = {});

struct BoundReport {
    bool pass = false;
    int card = 0, sharp2 = 0, sharp3 = 0, genus = 0;
    int card_bound = 0, sharp2_bound = 0, sharp3_bound = 0;
    std::vector<std::string> violations;
};
BoundReport bound_check(const std::vector<CriticalSite>& sites, int genus);

// Tangent-cycle construction on T_y from flank/direction data. One
// vertex-cycle per cyclic node, one edge-cycle per cyclic edge.
std::vector<TangentCycle> build_tangent_cycles(const TangentData& data, const CutLocusGraph& cyclic,
                                               double eps_theta);

// Flank/direction data recovered from the mesh field by sampling cyclic edges.
TangentData mesh_tangent_data(const DistanceField& field, const CutLocusGraph& cyclic,
                              double tie_tol);

struct ParityReport {
    enum class Verdict { Pass, Fail, Informational, Skipped };
    Verdict verdict = Verdict::Skipped;
    std::string reason;
    int winding_sum = 0;
    int nonzero_cycles = 0;
    bool cubic = true;
    bool center_on_cycle = false;
    bool chord_double_cover = false;
    double arc_total = 0.0;                   // should be 2*pi
    std::vector<int> sites_per_nonzero_cycle; // aligned with nonzero cycle list
    bool each_nonzero_has_one_site = false;
};

// Mod-2 winding sum and per-cycle site counts (Theorem-style verification:
// informational when the locus is not cubic, skipped on CenterOnCycle).
ParityReport winding_parity(const std::vector<TangentCycle>& cycles, const CutLocusGraph& cyclic,
                            const std::vector<CriticalSite>& sites);

} // namespace critloc
