#include "graphopt/coarsen.hpp"

#include <algorithm>
#include <bit>
#include <cassert>

#include "graphopt/errors.hpp"

namespace graphopt {

CoarsenThresholds CoarsenThresholds::for_graph(std::size_t n, std::size_t target) {
    CoarsenThresholds th;
    th.target_coarse_nodes = std::max<std::size_t>(1, target);
    th.size_threshold = std::max<std::size_t>(1, n / th.target_coarse_nodes);
    th.depth_threshold = std::max<std::int32_t>(
        1, static_cast<std::int32_t>(std::bit_width(th.size_threshold) - 1));
    th.degree_threshold = 10;
    return th;
}

void CoarsenThresholds::validate() const {
    if (size_threshold < 1 || depth_threshold < 1 || degree_threshold < 1 ||
        target_coarse_nodes < 1)
        throw Error("coarsening thresholds must be positive");
}

DfsTraversal dfs_traversal(const Dag &dag) {
    const std::size_t n = dag.node_count();
    DfsTraversal t;
    t.order.reserve(n);
    t.depth.reserve(n);
    t.outdeg.reserve(n);

    std::vector<bool> visited(n, false);
    std::vector<std::pair<NodeId, std::int32_t>> stack;
    for (NodeId root = 0; root < n; ++root) {
        if (dag.in_degree(root) != 0 || visited[root])
            continue;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto [u, d] = stack.back();
            stack.pop_back();
            if (visited[u])
                continue;
            visited[u] = true;
            t.order.push_back(u);
            t.depth.push_back(d);
            t.outdeg.push_back(static_cast<std::uint32_t>(dag.out_degree(u)));
            auto succ = dag.successors(u);
            for (std::size_t i = succ.size(); i > 0; --i)
                if (!visited[succ[i - 1]])
                    stack.emplace_back(succ[i - 1], d + 1);
        }
    }
    assert(t.order.size() == n); // every DAG node is reachable from a source
    return t;
}

namespace {

/// Cluster ids of the quotient's cyclic core: peel zero in-degree and zero
/// out-degree nodes until a fixpoint; whatever survives contains every
/// quotient cycle.
std::vector<bool> cyclic_core(std::size_t k, const std::vector<std::pair<NodeId, NodeId>> &qedges) {
    std::vector<std::size_t> indeg(k, 0), outdeg(k, 0);
    for (auto [a, b] : qedges) {
        ++outdeg[a];
        ++indeg[b];
    }
    std::vector<bool> alive(k, true);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::size_t> in2(k, 0), out2(k, 0);
        for (auto [a, b] : qedges)
            if (alive[a] && alive[b]) {
                ++out2[a];
                ++in2[b];
            }
        for (std::size_t c = 0; c < k; ++c)
            if (alive[c] && (in2[c] == 0 || out2[c] == 0)) {
                alive[c] = false;
                changed = true;
            }
    }
    return alive;
}

} // namespace

Coarsening cluster(const Dag &dag, const CoarsenThresholds &th) {
    th.validate();
    const std::size_t n = dag.node_count();
    DfsTraversal t = dfs_traversal(dag);

    std::vector<std::vector<NodeId>> runs;
    std::vector<NodeId> run;
    for (std::size_t i = 0; i < n; ++i) {
        run.push_back(t.order[i]);
        bool brk = run.size() >= th.size_threshold;
        brk = brk || t.outdeg[i] > th.degree_threshold;
        if (i + 1 < n) {
            std::int32_t jump = t.depth[i + 1] - t.depth[i];
            brk = brk || std::abs(jump) > th.depth_threshold;
            brk = brk || t.depth[i + 1] == 0; // next position starts a new DFS run
        }
        if (brk) {
            runs.push_back(std::move(run));
            run.clear();
        }
    }
    if (!run.empty())
        runs.push_back(std::move(run));

    // Contiguous DFS runs can close cycles in the quotient graph. Split the
    // offending clusters at a position where a core cluster's edge enters
    // until the quotient is acyclic; singleton-only cycles cannot occur in a
    // DAG, so every pass splits at least one cluster.
    std::vector<std::uint32_t> cluster_of(n);
    std::vector<std::pair<NodeId, NodeId>> qedges;
    while (true) {
        for (std::uint32_t c = 0; c < runs.size(); ++c)
            for (NodeId v : runs[c])
                cluster_of[v] = c;
        qedges.clear();
        for (NodeId u = 0; u < n; ++u)
            for (NodeId v : dag.successors(u))
                if (cluster_of[u] != cluster_of[v])
                    qedges.emplace_back(cluster_of[u], cluster_of[v]);
        std::sort(qedges.begin(), qedges.end());
        qedges.erase(std::unique(qedges.begin(), qedges.end()), qedges.end());

        std::vector<bool> core = cyclic_core(runs.size(), qedges);
        if (std::find(core.begin(), core.end(), true) == core.end())
            break;

        std::vector<std::vector<NodeId>> next;
        next.reserve(runs.size() + 8);
        for (std::uint32_t c = 0; c < runs.size(); ++c) {
            auto &r = runs[c];
            if (!core[c] || r.size() < 2) {
                next.push_back(std::move(r));
                continue;
            }
            std::size_t split = 1;
            for (std::size_t p = 1; p < r.size(); ++p) {
                bool enters = false;
                for (NodeId u : dag.predecessors(r[p]))
                    if (cluster_of[u] != c && core[cluster_of[u]]) {
                        enters = true;
                        break;
                    }
                if (enters) {
                    split = p;
                    break;
                }
            }
            next.emplace_back(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(split));
            next.emplace_back(r.begin() + static_cast<std::ptrdiff_t>(split), r.end());
        }
        runs = std::move(next);
    }

    Coarsening c;
    c.members = std::move(runs);
    c.cluster_of = std::move(cluster_of);

    std::vector<std::int64_t> weights(c.members.size(), 0);
    for (std::uint32_t k = 0; k < c.members.size(); ++k)
        for (NodeId v : c.members[k])
            weights[k] += dag.node_weight(v);
    std::vector<Edge> edges;
    edges.reserve(qedges.size());
    for (auto [a, b] : qedges)
        edges.push_back(Edge{a, b});
    c.coarse = build_dag(edges, weights);
    return c;
}

TwoWayProblem coarsen_problem(const TwoWayProblem &problem, const Coarsening &c) {
    assert(c.cluster_of.size() == problem.graph.node_count());
    TwoWayProblem cp;
    cp.graph = c.coarse;
    cp.size_weight = problem.size_weight;
    cp.crossing_weight = problem.crossing_weight;
    cp.left_threads = problem.left_threads;
    cp.right_threads = problem.right_threads;
    cp.vin_edges.reserve(problem.vin_edges.size());
    for (const VinEdge &e : problem.vin_edges)
        cp.vin_edges.push_back(VinEdge{e.source_part, c.cluster_of[e.dst]});
    return cp;
}

std::vector<PartLabel> project(const Coarsening &c, std::span<const PartLabel> coarse_part) {
    assert(coarse_part.size() == c.members.size());
    std::vector<PartLabel> fine(c.cluster_of.size());
    for (std::size_t v = 0; v < fine.size(); ++v)
        fine[v] = coarse_part[c.cluster_of[v]];
    return fine;
}

} // namespace graphopt
