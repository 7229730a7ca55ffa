#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "graphopt/dag.hpp"
#include "graphopt/errors.hpp"
#include "test_util.hpp"

using namespace graphopt;

namespace {

Dag chain3() { return build_dag(std::vector<Edge>{{0, 1}, {1, 2}}, std::vector<std::int64_t>{1, 1, 1}); }

Dag diamond() {
    return build_dag(std::vector<Edge>{{0, 1}, {0, 2}, {1, 3}, {2, 3}},
                     std::vector<std::int64_t>{1, 1, 1, 1});
}

/// Longest path in nodes by exhaustive DFS; independent of alap_layers.
std::size_t longest_chain(const Dag &d) {
    std::size_t best = d.node_count() > 0 ? 1 : 0;
    std::vector<NodeId> path;
    auto walk = [&](auto &&self, NodeId v) -> void {
        path.push_back(v);
        best = std::max(best, path.size());
        for (NodeId s : d.successors(v))
            self(self, s);
        path.pop_back();
    };
    for (NodeId v = 0; v < d.node_count(); ++v)
        walk(walk, v);
    return best;
}

} // namespace

TEST_CASE("build_dag accepts a chain") {
    Dag d = chain3();
    CHECK(d.node_count() == 3);
    CHECK(d.edge_count() == 2);
    CHECK(d.successors(0).size() == 1);
    CHECK(d.predecessors(2).front() == 1);
}

TEST_CASE("build_dag rejects a 2-cycle") {
    CHECK_THROWS_AS(build_dag(std::vector<Edge>{{0, 1}, {1, 0}}, std::vector<std::int64_t>{1, 1}),
                    CycleDetected);
}

TEST_CASE("build_dag records both directions of a join") {
    Dag d = build_dag(std::vector<Edge>{{0, 2}, {1, 2}, {2, 3}},
                      std::vector<std::int64_t>{1, 1, 2, 1});
    auto preds = d.predecessors(2);
    CHECK(std::vector<NodeId>(preds.begin(), preds.end()) == std::vector<NodeId>{0, 1});
    CHECK(d.node_weight(2) == 2);
}

TEST_CASE("build_dag rejects malformed input") {
    std::vector<std::int64_t> w{1, 1};
    CHECK_THROWS_AS(build_dag(std::vector<Edge>{{0, 5}}, w), BadEdge);
    CHECK_THROWS_AS(build_dag(std::vector<Edge>{{1, 1}}, w), BadEdge);
    CHECK_THROWS_AS(build_dag(std::vector<Edge>{{0, 1}, {0, 1}}, w), BadEdge);
    CHECK_THROWS_AS(build_dag({}, std::vector<std::int64_t>{0}), Error);
}

TEST_CASE("alap layers of a chain") {
    LayerAssignment la = alap_layers(chain3());
    CHECK(la.num_layers == 3);
    CHECK(la.layer == std::vector<std::int32_t>{0, 1, 2});
}

TEST_CASE("alap pins isolated sinks to the top layer") {
    Dag d = build_dag(std::vector<Edge>{{0, 1}, {1, 2}}, std::vector<std::int64_t>{1, 1, 1, 1});
    LayerAssignment la = alap_layers(d);
    CHECK(la.num_layers == 3);
    CHECK(la.layer[3] == 2);
    // Independent check: no node can move one layer up and stay valid.
    for (NodeId v = 0; v < d.node_count(); ++v) {
        std::int32_t bumped = la.layer[v] + 1;
        bool valid = bumped < la.num_layers;
        for (NodeId s : d.successors(v))
            valid = valid && bumped < la.layer[s];
        CHECK_FALSE(valid);
    }
}

TEST_CASE("alap layers of a diamond") {
    LayerAssignment la = alap_layers(diamond());
    CHECK(la.layer == std::vector<std::int32_t>{0, 1, 1, 2});
}

TEST_CASE("alap properties on random dags") {
    testutil::Rng rng(42);
    for (int iter = 0; iter < 30; ++iter) {
        Dag d = testutil::random_forward_dag(1 + rng.below(120), 2.0, rng);
        LayerAssignment la = alap_layers(d);
        CHECK(la.num_layers == static_cast<std::int32_t>(longest_chain(d)));
        for (NodeId u = 0; u < d.node_count(); ++u) {
            CHECK(la.layer[u] >= 0);
            CHECK(la.layer[u] < la.num_layers);
            if (d.out_degree(u) == 0) {
                CHECK(la.layer[u] == la.num_layers - 1);
            } else {
                std::int32_t lowest_succ = la.num_layers;
                for (NodeId v : d.successors(u)) {
                    CHECK(la.layer[u] < la.layer[v]);
                    lowest_succ = std::min(lowest_succ, la.layer[v]);
                }
                CHECK(la.layer[u] == lowest_succ - 1);
            }
        }
    }
}

TEST_CASE("connected components of a chain") {
    Dag d = chain3();
    auto comps = connected_components(d, NodeSet::all(d));
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].size() == 3);
}

TEST_CASE("removing the middle node disconnects a chain") {
    Dag d = chain3();
    auto comps = connected_components(d, NodeSet::of(d, {0, 2}));
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].size() == 1);
    CHECK(comps[1].size() == 1);
}

TEST_CASE("components are ordered by weight") {
    // Two disjoint chains, total weights 5 and 3.
    Dag d = build_dag(std::vector<Edge>{{0, 1}, {2, 3}},
                      std::vector<std::int64_t>{2, 3, 1, 2});
    auto comps = connected_components(d, NodeSet::all(d));
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].total_weight() == 5);
    CHECK(comps[1].total_weight() == 3);
    std::int64_t recomputed = 0;
    for (NodeId v : comps[0].ids())
        recomputed += d.node_weight(v);
    CHECK(recomputed == comps[0].total_weight());
}

TEST_CASE("components partition the query set") {
    testutil::Rng rng(7);
    for (int iter = 0; iter < 20; ++iter) {
        Dag d = testutil::random_forward_dag(1 + rng.below(80), 1.0, rng);
        std::vector<NodeId> subset;
        for (NodeId v = 0; v < d.node_count(); ++v)
            if (rng.below(2) == 0)
                subset.push_back(v);
        NodeSet within = NodeSet::of(d, subset);
        auto comps = connected_components(d, within);
        std::set<NodeId> seen;
        for (const auto &c : comps)
            for (NodeId v : c.ids()) {
                CHECK(within.contains(v));
                CHECK(seen.insert(v).second);
            }
        CHECK(seen.size() == within.size());
    }
}

TEST_CASE("induced subgraph keeps exactly the inner edges") {
    Dag d = diamond();
    SubDag sub = induced_subgraph(d, NodeSet::of(d, {0, 1, 3}));
    CHECK(sub.dag.node_count() == 3);
    CHECK(sub.dag.edge_count() == 2); // (0,1) and (1,3)
    CHECK(sub.to_parent == std::vector<NodeId>{0, 1, 3});

    SubDag empty = induced_subgraph(d, NodeSet::of(d, {}));
    CHECK(empty.dag.node_count() == 0);

    SubDag full = induced_subgraph(d, NodeSet::all(d));
    CHECK(full.dag.edge_count() == d.edge_count());
    for (NodeId v = 0; v < d.node_count(); ++v)
        CHECK(full.to_parent[v] == v);
}

TEST_CASE("induced subgraph edge set matches a brute-force filter") {
    testutil::Rng rng(99);
    for (int iter = 0; iter < 15; ++iter) {
        Dag d = testutil::random_forward_dag(1 + rng.below(100), 2.5, rng);
        std::vector<NodeId> subset;
        for (NodeId v = 0; v < d.node_count(); ++v)
            if (rng.below(3) != 0)
                subset.push_back(v);
        NodeSet within = NodeSet::of(d, subset);
        SubDag sub = induced_subgraph(d, within);

        std::set<std::pair<NodeId, NodeId>> expected;
        for (NodeId u = 0; u < d.node_count(); ++u)
            for (NodeId v : d.successors(u))
                if (within.contains(u) && within.contains(v))
                    expected.insert({u, v});
        std::set<std::pair<NodeId, NodeId>> got;
        for (NodeId u = 0; u < sub.dag.node_count(); ++u)
            for (NodeId v : sub.dag.successors(u))
                got.insert({sub.to_parent[u], sub.to_parent[v]});
        CHECK(got == expected);
    }
}

TEST_CASE("fingerprint tracks content") {
    Dag a = chain3();
    Dag b = chain3();
    CHECK(a.fingerprint() == b.fingerprint());
    Dag c = build_dag(std::vector<Edge>{{0, 1}, {1, 2}}, std::vector<std::int64_t>{1, 2, 1});
    CHECK(a.fingerprint() != c.fingerprint());
}
