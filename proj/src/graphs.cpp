#include "mfl/graphs.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "json.hpp"

#include "mfl/errors.hpp"

namespace mfl {

namespace {

// Free slots are tracked per direction as packed (v << 8) | i.
using Slot = std::uint16_t;

Slot pack_slot(int v, int i) { return static_cast<Slot>((v << 8) | i); }

struct GrowthState {
    std::vector<Slot> free_a;
    std::vector<Slot> free_c;
    std::vector<VertexKind> kinds;
    std::vector<std::uint32_t> edges;
};

std::uint32_t edge_from(char new_dir, int j, int i, Slot target) {
    const int tv = target >> 8;
    const int ti = target & 0xff;
    // The new vertex's slot has direction new_dir; the target slot has the
    // opposite direction.
    if (new_dir == 'a') return pack_edge(j, i, tv, ti);
    return pack_edge(tv, ti, j, i);
}

void grow(int j, int k, bool with_potential, GrowthState& st,
          std::vector<AdmissibleGraph>& out, int p) {
    if (j > k) {
        AdmissibleGraph g;
        g.p = p;
        g.k = k;
        g.kinds = st.kinds;
        g.edges = st.edges;
        std::sort(g.edges.begin(), g.edges.end());
        g.l = static_cast<int>(g.edges.size()) - k;
        g.m = static_cast<int>(std::count(g.kinds.begin(), g.kinds.end(), VertexKind::potential));
        out.push_back(std::move(g));
        return;
    }
    const int n_kinds = with_potential ? 2 : 1;
    for (int kind_idx = 0; kind_idx < n_kinds; ++kind_idx) {
        const VertexKind kind = kind_idx == 0 ? VertexKind::interaction : VertexKind::potential;
        const int own_slots = kind == VertexKind::interaction ? 2 : 1;
        st.kinds.push_back(kind);
        for (char d : {'a', 'c'}) {
            auto& targets = d == 'a' ? st.free_c : st.free_a;
            // Tree step: one slot of direction d joins one free opposite slot.
            for (int i = 1; i <= own_slots; ++i) {
                for (std::size_t ti = 0; ti < targets.size(); ++ti) {
                    GrowthState next = st;
                    auto& ntargets = d == 'a' ? next.free_c : next.free_a;
                    auto& nsame = d == 'a' ? next.free_a : next.free_c;
                    next.edges.push_back(edge_from(d, j, i, targets[ti]));
                    ntargets.erase(ntargets.begin() + static_cast<std::ptrdiff_t>(ti));
                    // Unused slots of the new vertex become available.
                    if (kind == VertexKind::interaction) {
                        nsame.push_back(pack_slot(j, 3 - i));
                        ntargets.push_back(pack_slot(j, 1));
                        ntargets.push_back(pack_slot(j, 2));
                    } else {
                        ntargets.push_back(pack_slot(j, 1));
                    }
                    grow(j + 1, k, with_potential, next, out, p);
                }
            }
            // Loop step: both direction-d slots join an ordered pair of
            // distinct free opposite slots (interaction vertices only).
            if (kind == VertexKind::interaction) {
                for (std::size_t x = 0; x < targets.size(); ++x) {
                    for (std::size_t y = 0; y < targets.size(); ++y) {
                        if (x == y) continue;
                        GrowthState next = st;
                        auto& ntargets = d == 'a' ? next.free_c : next.free_a;
                        next.edges.push_back(edge_from(d, j, 1, targets[x]));
                        next.edges.push_back(edge_from(d, j, 2, targets[y]));
                        const Slot sx = targets[x];
                        const Slot sy = targets[y];
                        ntargets.erase(std::remove_if(ntargets.begin(), ntargets.end(),
                                                      [&](Slot s) { return s == sx || s == sy; }),
                                       ntargets.end());
                        ntargets.push_back(pack_slot(j, 1));
                        ntargets.push_back(pack_slot(j, 2));
                        grow(j + 1, k, with_potential, next, out, p);
                    }
                }
            }
        }
        st.kinds.pop_back();
    }
}

counting::BigInt predicted_graph_count(int p, int k, bool with_potential) {
    counting::BigInt total = 0;
    const int max_m = with_potential ? k : 0;
    for (int m = 0; m <= max_m; ++m) {
        counting::BigInt slot_factor = 1;
        for (int i = 0; i < k - m; ++i) slot_factor *= 2;
        for (int l = 0; l + m <= k; ++l)
            total += slot_factor * counting::count_elementary_terms(p, k, l, m);
    }
    return total;
}

// Union-find over vertices 0..k; returns false as soon as an edge closes a
// cycle (used for tree checks) or just merges (connectivity).
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

int slot_capacity(const AdmissibleGraph& g, int v) {
    if (v == 0) return g.p;
    return g.kinds[static_cast<std::size_t>(v - 1)] == VertexKind::interaction ? 2 : 1;
}

} // namespace

std::uint32_t pack_edge(int a_v, int a_i, int c_v, int c_i) {
    return (static_cast<std::uint32_t>(a_v) << 24) | (static_cast<std::uint32_t>(a_i) << 16) |
           (static_cast<std::uint32_t>(c_v) << 8) | static_cast<std::uint32_t>(c_i);
}

std::pair<EdgeLabel, EdgeLabel> unpack_edge(std::uint32_t e) {
    EdgeLabel a{static_cast<int>(e >> 24), 'a', static_cast<int>((e >> 16) & 0xff)};
    EdgeLabel c{static_cast<int>((e >> 8) & 0xff), 'c', static_cast<int>(e & 0xff)};
    return {a, c};
}

std::vector<AdmissibleGraph> enumerate_admissible(int p, int k, bool with_potential,
                                                  const GraphLimits& limits) {
    if (p < 1 || k < 0) throw config_error("enumerate_admissible: requires p >= 1, k >= 0");
    if (!limits.force && (p > limits.max_p || k > limits.max_k))
        throw budget_error("enumerate_admissible: beyond documented ceiling p <= " +
                           std::to_string(limits.max_p) + ", k <= " + std::to_string(limits.max_k) +
                           " (force to override)");
    const counting::BigInt predicted = predicted_graph_count(p, k, with_potential);
    if (predicted > counting::BigInt(limits.max_graphs))
        throw budget_error("enumerate_admissible: predicted " + predicted.str() +
                           " graphs exceeds cap " + std::to_string(limits.max_graphs));
    GrowthState st;
    for (int i = 1; i <= p; ++i) {
        st.free_a.push_back(pack_slot(0, i));
        st.free_c.push_back(pack_slot(0, i));
    }
    std::vector<AdmissibleGraph> out;
    out.reserve(static_cast<std::size_t>(predicted.convert_to<std::uint64_t>()));
    grow(1, k, with_potential, st, out, p);
    std::sort(out.begin(), out.end());
    return out;
}

bool is_connected(const AdmissibleGraph& g) {
    UnionFind uf(g.k + 1);
    int components = g.k + 1;
    for (auto e : g.edges) {
        auto [a, c] = unpack_edge(e);
        if (uf.merge(a.v, c.v)) --components;
    }
    return components == 1;
}

bool slot_degrees_valid(const AdmissibleGraph& g) {
    std::set<std::pair<int, std::pair<char, int>>> seen;
    for (auto e : g.edges) {
        auto [a, c] = unpack_edge(e);
        for (const auto& end : {a, c}) {
            if (end.v < 0 || end.v > g.k) return false;
            if (end.i < 1 || end.i > slot_capacity(g, end.v)) return false;
            if (!seen.insert({end.v, {end.d, end.i}}).second) return false; // degree > 1
        }
    }
    return true;
}

bool directions_opposite(const AdmissibleGraph& g) {
    // The packed representation stores every edge as an (a-slot, c-slot)
    // pair, so mixed-direction violations are unrepresentable; the check
    // validates that each edge decodes to one slot per direction.
    for (auto e : g.edges) {
        auto [a, c] = unpack_edge(e);
        if (a.d != 'a' || c.d != 'c') return false;
    }
    return true;
}

namespace {

bool is_tree(int k, const std::vector<std::uint32_t>& edges) {
    if (static_cast<int>(edges.size()) != k) return false;
    UnionFind uf(k + 1);
    for (auto e : edges) {
        auto [a, c] = unpack_edge(e);
        if (!uf.merge(a.v, c.v)) return false; // cycle (including multi-edges)
    }
    return true; // k+1 vertices, k edges, acyclic => connected tree
}

// Edge indices on the unique path from v to the root of a tree given as an
// edge list (assumes is_tree passed).
std::set<std::size_t> path_to_root(int k, const std::vector<std::uint32_t>& edges, int v) {
    std::vector<std::vector<std::pair<int, std::size_t>>> adj(static_cast<std::size_t>(k + 1));
    for (std::size_t idx = 0; idx < edges.size(); ++idx) {
        auto [a, c] = unpack_edge(edges[idx]);
        adj[static_cast<std::size_t>(a.v)].push_back({c.v, idx});
        adj[static_cast<std::size_t>(c.v)].push_back({a.v, idx});
    }
    std::vector<int> parent(static_cast<std::size_t>(k + 1), -1);
    std::vector<std::size_t> parent_edge(static_cast<std::size_t>(k + 1), 0);
    std::vector<int> stack{0};
    std::vector<bool> visited(static_cast<std::size_t>(k + 1), false);
    visited[0] = true;
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (auto [nb, idx] : adj[static_cast<std::size_t>(cur)]) {
            if (visited[static_cast<std::size_t>(nb)]) continue;
            visited[static_cast<std::size_t>(nb)] = true;
            parent[static_cast<std::size_t>(nb)] = cur;
            parent_edge[static_cast<std::size_t>(nb)] = idx;
            stack.push_back(nb);
        }
    }
    std::set<std::size_t> path;
    for (int cur = v; cur != 0; cur = parent[static_cast<std::size_t>(cur)])
        path.insert(parent_edge[static_cast<std::size_t>(cur)]);
    return path;
}

} // namespace

bool loop_removal_property(const AdmissibleGraph& g) {
    const int l = g.l;
    if (l == 0) return is_tree(g.k, g.edges);
    // Candidate (vertex, direction) pairs with both same-direction slots
    // occupied, together with the indices of those two edges.
    struct Candidate {
        int v;
        std::size_t e1, e2;
    };
    std::vector<std::vector<Candidate>> per_vertex(static_cast<std::size_t>(g.k + 1));
    for (int v = 1; v <= g.k; ++v) {
        if (g.kinds[static_cast<std::size_t>(v - 1)] != VertexKind::interaction) continue;
        for (char d : {'a', 'c'}) {
            std::vector<std::size_t> hits;
            for (std::size_t idx = 0; idx < g.edges.size(); ++idx) {
                auto [a, c] = unpack_edge(g.edges[idx]);
                const EdgeLabel& end = d == 'a' ? a : c;
                if (end.v == v) hits.push_back(idx);
            }
            if (hits.size() == 2) per_vertex[static_cast<std::size_t>(v)].push_back({v, hits[0], hits[1]});
        }
    }
    std::vector<int> qualifying;
    for (int v = 1; v <= g.k; ++v)
        if (!per_vertex[static_cast<std::size_t>(v)].empty()) qualifying.push_back(v);
    if (static_cast<int>(qualifying.size()) < l) return false;

    // Choose l vertices, a direction per vertex, and one of the two edges to
    // remove per vertex; accept if some choice leaves a tree in which each
    // surviving partner edge lies on the path from its vertex to the root.
    auto try_subset = [&](const std::vector<Candidate*>& chosen) -> bool {
        for (std::uint32_t mask = 0; mask < (1u << l); ++mask) {
            std::set<std::size_t> removed;
            for (int i = 0; i < l; ++i)
                removed.insert((mask >> i) & 1u ? chosen[static_cast<std::size_t>(i)]->e1
                                                : chosen[static_cast<std::size_t>(i)]->e2);
            if (static_cast<int>(removed.size()) != l) continue;
            // Candidates may share edges; each must lose exactly one edge and
            // keep the other.
            bool valid = true;
            for (int i = 0; i < l && valid; ++i) {
                const Candidate* cand = chosen[static_cast<std::size_t>(i)];
                valid = removed.count(cand->e1) + removed.count(cand->e2) == 1;
            }
            if (!valid) continue;
            std::vector<std::uint32_t> kept;
            std::vector<std::size_t> kept_index; // original index per kept edge
            for (std::size_t idx = 0; idx < g.edges.size(); ++idx) {
                if (removed.count(idx)) continue;
                kept.push_back(g.edges[idx]);
                kept_index.push_back(idx);
            }
            if (!is_tree(g.k, kept)) continue;
            bool ok = true;
            for (int i = 0; i < l && ok; ++i) {
                const Candidate* cand = chosen[static_cast<std::size_t>(i)];
                const std::size_t survivor = removed.count(cand->e1) ? cand->e2 : cand->e1;
                std::size_t kept_pos = 0;
                while (kept_index[kept_pos] != survivor) ++kept_pos;
                auto path = path_to_root(g.k, kept, cand->v);
                ok = path.count(kept_pos) > 0;
            }
            if (ok) return true;
        }
        return false;
    };
    // Enumerate size-l subsets of qualifying vertices and per-vertex
    // direction candidates.
    std::vector<Candidate*> chosen(static_cast<std::size_t>(l));
    auto rec = [&](auto&& self, std::size_t start, int depth) -> bool {
        if (depth == l) return try_subset(chosen);
        for (std::size_t q = start; q < qualifying.size(); ++q) {
            auto& cands = per_vertex[static_cast<std::size_t>(qualifying[q])];
            for (auto& cand : cands) {
                chosen[static_cast<std::size_t>(depth)] = &cand;
                if (self(self, q + 1, depth + 1)) return true;
            }
        }
        return false;
    };
    return rec(rec, 0, 0);
}

AdmissibleGraph canonical_structure(const AdmissibleGraph& g) {
    std::vector<int> perm(static_cast<std::size_t>(g.k));
    std::iota(perm.begin(), perm.end(), 1);
    AdmissibleGraph best = g;
    bool first = true;
    do {
        std::vector<VertexKind> kinds(static_cast<std::size_t>(g.k));
        for (int v = 1; v <= g.k; ++v)
            kinds[static_cast<std::size_t>(perm[static_cast<std::size_t>(v - 1)] - 1)] =
                g.kinds[static_cast<std::size_t>(v - 1)];
        std::vector<std::uint32_t> edges;
        edges.reserve(g.edges.size());
        auto map_v = [&](int v) { return v == 0 ? 0 : perm[static_cast<std::size_t>(v - 1)]; };
        for (auto e : g.edges) {
            auto [a, c] = unpack_edge(e);
            edges.push_back(pack_edge(map_v(a.v), a.i, map_v(c.v), c.i));
        }
        std::sort(edges.begin(), edges.end());
        if (first || std::tie(kinds, edges) < std::tie(best.kinds, best.edges)) {
            best.kinds = std::move(kinds);
            best.edges = std::move(edges);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

StructureCensus structure_census(int p, int k, bool with_potential, const GraphLimits& limits) {
    const auto graphs = enumerate_admissible(p, k, with_potential, limits);
    StructureCensus census;
    std::map<std::pair<int, int>, std::set<AdmissibleGraph>> canon;
    for (const auto& g : graphs) {
        const auto key = std::make_pair(g.l, g.m);
        ++census.graphs[key];
        canon[key].insert(canonical_structure(g));
    }
    for (const auto& [key, set] : canon) census.structures[key] = set.size();
    return census;
}

counting::BigInt count_structures(int p, int k, int l, const GraphLimits& limits) {
    const auto census = structure_census(p, k, false, limits);
    const auto it = census.structures.find({l, 0});
    return it == census.structures.end() ? counting::BigInt(0) : counting::BigInt(it->second);
}

bool quotient_consistent(int p, int k, bool with_potential, const GraphLimits& limits) {
    const auto graphs = enumerate_admissible(p, k, with_potential, limits);
    // Extend each admissible graph by all relabelings of 1..k and compare the
    // per-(l,m) orbit totals with k! times the structure counts.
    std::map<std::pair<int, int>, std::set<AdmissibleGraph>> extended;
    std::map<std::pair<int, int>, std::set<AdmissibleGraph>> canon;
    for (const auto& g : graphs) {
        const auto key = std::make_pair(g.l, g.m);
        canon[key].insert(canonical_structure(g));
        std::vector<int> perm(static_cast<std::size_t>(k));
        std::iota(perm.begin(), perm.end(), 1);
        do {
            AdmissibleGraph image = g;
            for (int v = 1; v <= k; ++v)
                image.kinds[static_cast<std::size_t>(perm[static_cast<std::size_t>(v - 1)] - 1)] =
                    g.kinds[static_cast<std::size_t>(v - 1)];
            auto map_v = [&](int v) { return v == 0 ? 0 : perm[static_cast<std::size_t>(v - 1)]; };
            image.edges.clear();
            for (auto e : g.edges) {
                auto [a, c] = unpack_edge(e);
                image.edges.push_back(pack_edge(map_v(a.v), a.i, map_v(c.v), c.i));
            }
            std::sort(image.edges.begin(), image.edges.end());
            extended[key].insert(std::move(image));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    const counting::BigInt kfact = counting::factorial_big(k);
    for (const auto& [key, orbit] : extended) {
        const counting::BigInt expected = kfact * counting::BigInt(canon[key].size());
        if (counting::BigInt(orbit.size()) != expected) return false;
    }
    return true;
}

std::string graph_to_json(const AdmissibleGraph& g) {
    nlohmann::json doc;
    doc["p"] = g.p;
    doc["k"] = g.k;
    doc["l"] = g.l;
    doc["m"] = g.m;
    doc["kinds"] = nlohmann::json::array();
    for (auto kind : g.kinds)
        doc["kinds"].push_back(kind == VertexKind::interaction ? "W" : "V");
    doc["edges"] = nlohmann::json::array();
    for (auto e : g.edges) {
        auto [a, c] = unpack_edge(e);
        doc["edges"].push_back({{a.v, std::string(1, a.d), a.i}, {c.v, std::string(1, c.d), c.i}});
    }
    return doc.dump();
}

} // namespace mfl
