#pragma once

// Admissible contraction graphs and their structure classes.
//
// An admissible graph indexes one Wick pairing of the order-k multiple
// commutator of quantized pair interactions (and optionally one-body
// potentials) against a p-particle observable.  Vertices are 0..k: vertex 0
// is the root with p slots per direction, an interaction vertex has 2 slots
// per direction, a potential vertex has 1.  Slots carry labels (v, d, i)
// with direction d in {a, c}; edges always join an a-slot to a c-slot.
//
// Graphs are generated by a growth process: vertex j (j = 1..k) connects
// either one of its slots (tree step) or both slots of one direction (loop
// step, interaction vertices only) to free slots of the opposite direction
// on vertices 0..j-1.  A graph with l loop steps has k + l edges and its
// elementary term acts on p + k - l - m particles, m being the number of
// potential vertices.
//
// Structures are equivalence classes under relabelings of the non-root
// vertices; the relabeling action is free on admissible graphs, so the
// orbit-extended graph set has exactly k! times as many elements as there
// are structures.

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mfl/counting.hpp"

namespace mfl {

enum class VertexKind : std::uint8_t { interaction, potential };

// One slot of a vertex: vertex index v (0 = root), direction d ('a' or 'c'),
// slot index i (1-based).
struct EdgeLabel {
    int v = 0;
    char d = 'a';
    int i = 1;
};

// An edge is stored packed as (a_v << 24) | (a_i << 16) | (c_v << 8) | c_i,
// i.e. the annihilation-side slot in the high half.  Edge lists are kept
// sorted ascending, which makes equality and lexicographic comparison of
// graphs plain vector comparisons.
std::uint32_t pack_edge(int a_v, int a_i, int c_v, int c_i);
std::pair<EdgeLabel, EdgeLabel> unpack_edge(std::uint32_t e);

struct AdmissibleGraph {
    int p = 0;
    int k = 0;
    int l = 0; // number of loop steps = |edges| - k
    int m = 0; // number of potential vertices
    std::vector<VertexKind> kinds;    // size k, kinds[j-1] is vertex j
    std::vector<std::uint32_t> edges; // sorted packed edges

    bool operator==(const AdmissibleGraph& o) const {
        return p == o.p && k == o.k && kinds == o.kinds && edges == o.edges;
    }
    bool operator<(const AdmissibleGraph& o) const {
        return std::tie(kinds, edges) < std::tie(o.kinds, o.edges);
    }
};

struct GraphLimits {
    int max_p = 3;
    int max_k = 5;
    // Cap on the predicted number of graphs (computed exactly from the
    // elementary-term recursion before any enumeration starts).
    std::uint64_t max_graphs = 2'000'000;
    bool force = false; // bypass the p/k ceiling, keep the size cap
};

// Exhaustive, duplicate-free enumeration of admissible graphs by the growth
// process.  With with_potential = true every vertex may independently be an
// interaction or a potential vertex.  Output is sorted (deterministic).
// Throws budget_error beyond the documented ceiling unless forced.
std::vector<AdmissibleGraph> enumerate_admissible(int p, int k, bool with_potential,
                                                  const GraphLimits& limits = {});

// Structural invariants of admissible graphs.
bool is_connected(const AdmissibleGraph& g);
bool slot_degrees_valid(const AdmissibleGraph& g); // degree <= 1, slot ranges
bool directions_opposite(const AdmissibleGraph& g);
// Loop-removal property: there exist l vertices with both slots of one
// direction occupied such that removing one of the two edges per vertex
// yields a tree in which the surviving edge lies on the path to the root.
bool loop_removal_property(const AdmissibleGraph& g);

// Lexicographically least representative of the structure class of g over
// all relabelings of vertices 1..k.
AdmissibleGraph canonical_structure(const AdmissibleGraph& g);

// Census of one enumeration: per (l, m), the number of admissible graphs and
// the number of distinct structures.
struct StructureCensus {
    std::map<std::pair<int, int>, std::uint64_t> graphs;     // (l,m) -> count
    std::map<std::pair<int, int>, std::uint64_t> structures; // (l,m) -> count
};
StructureCensus structure_census(int p, int k, bool with_potential,
                                 const GraphLimits& limits = {});

// Exact number of structures with l loops (interaction-only variant).
counting::BigInt count_structures(int p, int k, int l, const GraphLimits& limits = {});

// Verifies |orbit-extended graph set| == k! * |structures| by generating all
// relabelings of every admissible graph.
bool quotient_consistent(int p, int k, bool with_potential,
                         const GraphLimits& limits = {});

// JSON document {p, k, l, m, kinds, edges: [[[v,d,i],[v,d,i]], ...]}.
std::string graph_to_json(const AdmissibleGraph& g);

} // namespace mfl
