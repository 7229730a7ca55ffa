#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphopt/dag.hpp"
#include "graphopt/partition_model.hpp"

namespace graphopt {

/// Cluster break criteria for depth-first coarsening.
struct CoarsenThresholds {
    std::size_t size_threshold = 1;    // max fine nodes per cluster
    std::int32_t depth_threshold = 1;  // max depth jump between consecutive list entries
    std::size_t degree_threshold = 10; // out-degree forcing a break after a node
    std::size_t target_coarse_nodes = 1000;

    /// Thresholds for one graph: size = n / target, depth = log2(size),
    /// degree = 10, all clamped to stay positive.
    static CoarsenThresholds for_graph(std::size_t n, std::size_t target = 1000);

    void validate() const;
};

/// Preorder depth-first traversal from each unvisited source (sources and
/// successors in ascending id). depth/outdeg are per list position.
struct DfsTraversal {
    std::vector<NodeId> order;
    std::vector<std::int32_t> depth;
    std::vector<std::uint32_t> outdeg;
};

DfsTraversal dfs_traversal(const Dag &dag);

/// Fine-to-coarse clustering. Clusters are contiguous runs of the DFS
/// order; the coarse graph carries summed member weights and one edge per
/// crossing fine adjacency, and is acyclic (runs that close quotient
/// cycles are split until it is).
struct Coarsening {
    std::vector<std::uint32_t> cluster_of;    // fine node -> cluster id
    std::vector<std::vector<NodeId>> members; // per cluster, DFS order
    Dag coarse;
};

Coarsening cluster(const Dag &dag, const CoarsenThresholds &th);

/// Rewrites a fine problem over the coarse graph; vin edges are retargeted
/// to the containing cluster, one entry per fine edge.
TwoWayProblem coarsen_problem(const TwoWayProblem &problem, const Coarsening &c);

/// Expands a coarse assignment to fine nodes (each node takes its
/// cluster's label). Feasible coarse assignments stay feasible.
std::vector<PartLabel> project(const Coarsening &c, std::span<const PartLabel> coarse_part);

} // namespace graphopt
