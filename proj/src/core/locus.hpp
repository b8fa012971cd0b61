#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geodesic.hpp"
#include "types.hpp"

namespace critloc {

struct ExtractOptions {
    double tie_tol = -1.0;          // default 3 * mean edge length
    double node_merge_radius = -1.0; // default 2 * mean edge length
};

// Cut locus of the field's source as an embedded graph: per-edge window
// boundary crossings chained through face interiors. Throws FragmentedLocus
// when the chained graph is disconnected.
CutLocusGraph extract_cut_locus(const DistanceField& field, const ExtractOptions& opts = {});

// Prunes degree-1 branches, marking cyclic flags on the input; returns the
// pruned graph. An empty result is the genus-0 outcome, not a failure.
CutLocusGraph cyclic_part(CutLocusGraph& g);

// n, m, q = m - n + 1 on the cyclic part (vertices = degree >= 3 nodes,
// degrees measured within the cyclic part). Throws OddCycleRank.
GraphStats graph_stats(const CutLocusGraph& cyclic);

struct CubicReport {
    bool m_equality = false;    // m == 3(q-1)
    bool n_equality = false;    // n == 2(q-1)
    bool all_degree_three = false;
    bool consistent = false;    // equalities agree with the degree predicate
};
CubicReport cubic_check(const GraphStats& s, const CutLocusGraph& cyclic);

struct DiskCertificate {
    int chi_complement = 0;
    bool euler_ok = false;          // chi == 1
    bool complement_connected = false;
    int complement_components = 0;
    bool ok() const { return euler_ok && complement_connected; }
};
// Certifies that removing the cyclic part leaves a single open disk.
DiskCertificate disk_certificate(const TriMesh& mesh, const CutLocusGraph& graph,
                                 bool cyclic_only = true);

// Total length of all edges (optionally cyclic-only).
double locus_length(const CutLocusGraph& g, bool cyclic_only = false);

} // namespace critloc
