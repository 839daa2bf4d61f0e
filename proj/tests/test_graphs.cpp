#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>

#include "mfl/counting.hpp"
#include "mfl/errors.hpp"
#include "mfl/graphs.hpp"

using mfl::AdmissibleGraph;
using mfl::VertexKind;
using mfl::counting::BigInt;

namespace {

BigInt pow2(int k) {
    BigInt r = 1;
    for (int i = 0; i < k; ++i) r *= 2;
    return r;
}

void check_all_properties(const std::vector<AdmissibleGraph>& graphs, int k) {
    for (const auto& g : graphs) {
        CHECK(mfl::is_connected(g));
        CHECK(mfl::slot_degrees_valid(g));
        CHECK(mfl::directions_opposite(g));
        CHECK(mfl::loop_removal_property(g));
        CHECK(g.l == static_cast<int>(g.edges.size()) - k);
        CHECK(g.m == static_cast<int>(std::count(g.kinds.begin(), g.kinds.end(),
                                                 VertexKind::potential)));
    }
}

std::map<std::pair<int, int>, std::size_t> census_by_type(const std::vector<AdmissibleGraph>& gs) {
    std::map<std::pair<int, int>, std::size_t> counts;
    for (const auto& g : gs) ++counts[{g.l, g.m}];
    return counts;
}

} // namespace

TEST_CASE("bare root and single-vertex enumerations") {
    const auto g0 = mfl::enumerate_admissible(1, 0, false);
    REQUIRE(g0.size() == 1);
    CHECK(g0[0].edges.empty());
    CHECK(g0[0].l == 0);
    CHECK(g0[0].m == 0);

    // p=1, k=1: the vertex can attach either of its two same-direction slots
    // to the single opposite root slot, for each direction: 4 tree graphs.
    // A loop step needs two free opposite slots, so there are no loop graphs.
    const auto g1 = mfl::enumerate_admissible(1, 1, false);
    CHECK(g1.size() == 4);
    for (const auto& g : g1) CHECK(g.l == 0);
    check_all_properties(g1, 1);
}

TEST_CASE("admissible graph counts match the elementary-term recursion") {
    // |admissible(p,k,l,m)| = 2^(k-m) * c(p,k,l,m): every interaction vertex
    // carries one factor-2 slot labelling relative to the commutator count.
    struct Range {
        int p, k;
        bool with_potential;
    };
    const Range ranges[] = {{1, 1, false}, {1, 2, false}, {2, 2, false}, {1, 3, false},
                            {2, 3, false}, {1, 1, true},  {1, 2, true},  {2, 2, true}};
    for (const auto& r : ranges) {
        const auto graphs = mfl::enumerate_admissible(r.p, r.k, r.with_potential);
        const auto counts = census_by_type(graphs);
        // Every (l,m) cell, including absent ones, matches the recursion.
        const int max_m = r.with_potential ? r.k : 0;
        for (int m = 0; m <= max_m; ++m)
            for (int l = 0; l + m <= r.k; ++l) {
                const BigInt expected =
                    pow2(r.k - m) * mfl::counting::count_elementary_terms(r.p, r.k, l, m);
                const auto it = counts.find({l, m});
                const BigInt actual = it == counts.end() ? 0 : BigInt(it->second);
                CHECK(actual == expected);
            }
        // No duplicates: the growth process yields each graph exactly once.
        std::set<AdmissibleGraph> dedup(graphs.begin(), graphs.end());
        CHECK(dedup.size() == graphs.size());
        check_all_properties(graphs, r.k);
    }
}

TEST_CASE("frozen census at p=1, k=2 with potential vertices") {
    const auto graphs = mfl::enumerate_admissible(1, 2, true);
    const auto counts = census_by_type(graphs);
    // Hand count: (l,m)=(0,0): 32, (1,0): 16, (0,1): 24, (0,2): 4.
    CHECK(graphs.size() == 76);
    CHECK(counts.at({0, 0}) == 32);
    CHECK(counts.at({1, 0}) == 16);
    CHECK(counts.at({0, 1}) == 24);
    CHECK(counts.at({0, 2}) == 4);
    CHECK(counts.size() == 4);
}

TEST_CASE("structure counts match the closed tree formula") {
    CHECK(mfl::count_structures(1, 0, 0) == 1);
    CHECK(mfl::count_structures(1, 1, 0) == 4);
    CHECK(mfl::count_structures(1, 1, 1) == 0);
    CHECK(mfl::count_structures(1, 2, 0) == 28);
    CHECK(mfl::count_structures(2, 2, 0) == 72);
    for (int p = 1; p <= 2; ++p)
        for (int k = 0; k <= 3; ++k)
            CHECK(mfl::count_structures(p, k, 0) == mfl::counting::tree_structure_count(p, k));
}

TEST_CASE("loop structure counts stay below the published bounds") {
    // p=1, k=2, l=1: 16 one-loop graphs, all with the loop step at vertex 2.
    // The 8 graphs whose loop targets the root plus vertex 1 have admissible
    // swap images (4 two-admissible orbits); the 8 targeting only vertex 1 do
    // not, so |Q| = 4 + 8 = 12.
    CHECK(mfl::count_structures(1, 2, 1) == 12);
    CHECK(mfl::count_structures(1, 2, 1) <= mfl::counting::loop_structure_bound(1, 2, 1));
    for (int p = 1; p <= 2; ++p)
        for (int k = 0; k <= 3; ++k) {
            const auto census = mfl::structure_census(p, k, false);
            for (const auto& [key, cnt] : census.structures) {
                CHECK(BigInt(cnt) <= mfl::counting::loop_structure_bound(p, k, key.first));
                // Graph counts are 2^k elementary terms each; the term count
                // itself obeys the factorial-type bound.
                const BigInt graphs(census.graphs.at(key));
                CHECK(graphs % pow2(k) == 0);
                CHECK(graphs / pow2(k) <=
                      mfl::counting::elementary_term_bound(p, k, key.first));
            }
        }
    // Potential-variant structures stay below the four-factor bound.
    for (int k = 0; k <= 2; ++k) {
        const auto census = mfl::structure_census(1, k, true);
        for (const auto& [key, cnt] : census.structures)
            CHECK(BigInt(cnt) <=
                  mfl::counting::potential_structure_bound(1, k, key.first, key.second));
    }
}

TEST_CASE("relabeling orbits have full size") {
    CHECK(mfl::quotient_consistent(1, 2, false));
    CHECK(mfl::quotient_consistent(2, 2, false));
    CHECK(mfl::quotient_consistent(1, 3, false));
    CHECK(mfl::quotient_consistent(2, 3, false));
    CHECK(mfl::quotient_consistent(1, 2, true));
    CHECK(mfl::quotient_consistent(2, 2, true));
}

TEST_CASE("canonical structure is a relabeling invariant") {
    const auto graphs = mfl::enumerate_admissible(2, 2, false);
    for (const auto& g : graphs) {
        const auto canon = mfl::canonical_structure(g);
        // Idempotent and never larger than the input.
        CHECK(mfl::canonical_structure(canon) == canon);
        CHECK(!(g < canon));
        CHECK(canon.l == g.l);
        CHECK(canon.m == g.m);
        // The canonical form of the swapped graph is the same.
        AdmissibleGraph swapped = g;
        swapped.kinds = {g.kinds[1], g.kinds[0]};
        swapped.edges.clear();
        auto swap_v = [](int v) { return v == 0 ? 0 : 3 - v; };
        for (auto e : g.edges) {
            auto [a, c] = mfl::unpack_edge(e);
            swapped.edges.push_back(mfl::pack_edge(swap_v(a.v), a.i, swap_v(c.v), c.i));
        }
        std::sort(swapped.edges.begin(), swapped.edges.end());
        CHECK(mfl::canonical_structure(swapped) == canon);
    }
}

TEST_CASE("property checks reject defective graphs") {
    // Disconnected: k=2 but only vertex 1 is attached.
    AdmissibleGraph disconnected;
    disconnected.p = 1;
    disconnected.k = 2;
    disconnected.l = -1; // |edges| - k
    disconnected.m = 0;
    disconnected.kinds = {VertexKind::interaction, VertexKind::interaction};
    disconnected.edges = {mfl::pack_edge(1, 1, 0, 1)};
    CHECK(!mfl::is_connected(disconnected));

    // Root c-slot used twice.
    AdmissibleGraph doubled = disconnected;
    doubled.edges = {mfl::pack_edge(1, 1, 0, 1), mfl::pack_edge(2, 1, 0, 1)};
    doubled.l = 0;
    CHECK(mfl::is_connected(doubled));
    CHECK(!mfl::slot_degrees_valid(doubled));

    // Slot index beyond the vertex capacity.
    AdmissibleGraph overslot = disconnected;
    overslot.edges = {mfl::pack_edge(1, 3, 0, 1), mfl::pack_edge(2, 1, 1, 1)};
    overslot.l = 0;
    CHECK(!mfl::slot_degrees_valid(overslot));

    // A one-loop graph whose cycle uses one slot per direction at the only
    // non-root vertex: no vertex has both same-direction slots occupied, so
    // the loop-removal property has no candidate set.
    AdmissibleGraph bad_loop;
    bad_loop.p = 1;
    bad_loop.k = 1;
    bad_loop.m = 0;
    bad_loop.kinds = {VertexKind::interaction};
    bad_loop.edges = {mfl::pack_edge(1, 1, 0, 1), mfl::pack_edge(0, 1, 1, 1)};
    std::sort(bad_loop.edges.begin(), bad_loop.edges.end());
    bad_loop.l = 1;
    CHECK(mfl::is_connected(bad_loop));
    CHECK(mfl::slot_degrees_valid(bad_loop));
    CHECK(!mfl::loop_removal_property(bad_loop));

    // Multigraph double edge plus an isolated vertex: right edge count for a
    // tree but neither acyclic nor connected.
    AdmissibleGraph forest;
    forest.p = 2;
    forest.k = 2;
    forest.l = 0;
    forest.m = 0;
    forest.kinds = {VertexKind::interaction, VertexKind::interaction};
    forest.edges = {mfl::pack_edge(1, 1, 0, 1), mfl::pack_edge(1, 2, 0, 2)};
    CHECK(!mfl::loop_removal_property(forest));
}

TEST_CASE("json serialization") {
    const auto g0 = mfl::enumerate_admissible(1, 0, false);
    CHECK(mfl::graph_to_json(g0[0]) == R"({"edges":[],"k":0,"kinds":[],"l":0,"m":0,"p":1})");
    const auto g1 = mfl::enumerate_admissible(1, 1, true);
    bool saw_potential = false;
    for (const auto& g : g1) {
        const auto doc = mfl::graph_to_json(g);
        CHECK(doc.find("\"p\":1") != std::string::npos);
        CHECK(doc.find("\"k\":1") != std::string::npos);
        if (g.m == 1) {
            saw_potential = true;
            CHECK(doc.find("\"V\"") != std::string::npos);
        }
    }
    CHECK(saw_potential);
}

TEST_CASE("enumeration guards") {
    CHECK_THROWS_AS(mfl::enumerate_admissible(1, 6, false), mfl::budget_error);
    CHECK_THROWS_AS(mfl::enumerate_admissible(4, 1, false), mfl::budget_error);
    CHECK_THROWS_AS(mfl::enumerate_admissible(0, 1, false), mfl::config_error);
    mfl::GraphLimits tight;
    tight.max_k = 2;
    CHECK_THROWS_AS(mfl::enumerate_admissible(1, 3, false, tight), mfl::budget_error);
    tight.force = true;
    CHECK(mfl::enumerate_admissible(1, 3, false, tight).size() ==
          (pow2(3) * (mfl::counting::count_elementary_terms(1, 3, 0) +
                      mfl::counting::count_elementary_terms(1, 3, 1) +
                      mfl::counting::count_elementary_terms(1, 3, 2) +
                      mfl::counting::count_elementary_terms(1, 3, 3)))
              .convert_to<std::size_t>());
    mfl::GraphLimits capped;
    capped.max_graphs = 10;
    CHECK_THROWS_AS(mfl::enumerate_admissible(2, 2, false, capped), mfl::budget_error);
}
