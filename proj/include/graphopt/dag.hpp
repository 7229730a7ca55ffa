#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace graphopt {

using NodeId = std::uint32_t;

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    friend bool operator==(const Edge &, const Edge &) = default;
};

/// Immutable weighted directed acyclic graph. Node ids are dense in [0,n);
/// adjacency is stored CSR-style in both directions with neighbor lists
/// sorted ascending. Acyclicity, edge consistency and positive weights are
/// checked at construction.
class Dag {
  public:
    Dag() = default;

    std::size_t node_count() const { return node_w_.size(); }
    std::size_t edge_count() const { return succ_adj_.size(); }

    std::span<const NodeId> successors(NodeId v) const {
        return {succ_adj_.data() + succ_off_[v], succ_off_[v + 1] - succ_off_[v]};
    }
    std::span<const NodeId> predecessors(NodeId v) const {
        return {pred_adj_.data() + pred_off_[v], pred_off_[v + 1] - pred_off_[v]};
    }
    std::size_t out_degree(NodeId v) const { return succ_off_[v + 1] - succ_off_[v]; }
    std::size_t in_degree(NodeId v) const { return pred_off_[v + 1] - pred_off_[v]; }

    std::int64_t node_weight(NodeId v) const { return node_w_[v]; }
    std::span<const std::int64_t> node_weights() const { return node_w_; }
    std::int64_t total_weight() const { return total_w_; }

    /// Optional external identifiers (matrix row, circuit node id); empty when unused.
    std::span<const std::int64_t> ext_labels() const { return ext_label_; }

    /// Content hash over node count, weights and edges; stable across runs.
    std::uint64_t fingerprint() const { return fingerprint_; }

    friend Dag build_dag(std::span<const Edge> edges, std::span<const std::int64_t> node_weights,
                         std::vector<std::int64_t> ext_labels);

    /// Trusted constructor for graphs that are acyclic by construction
    /// (induced subgraphs of a valid Dag). Adjacency must be consistent.
    static Dag from_sorted_csr(std::vector<std::size_t> succ_off, std::vector<NodeId> succ_adj,
                               std::vector<std::int64_t> node_weights);

  private:
    std::vector<std::size_t> succ_off_{0};
    std::vector<NodeId> succ_adj_;
    std::vector<std::size_t> pred_off_{0};
    std::vector<NodeId> pred_adj_;
    std::vector<std::int64_t> node_w_;
    std::vector<std::int64_t> ext_label_;
    std::int64_t total_w_ = 0;
    std::uint64_t fingerprint_ = 0;

    void finish_build();
};

/// Subset of a Dag's nodes with its cached total weight. Ids are kept
/// sorted ascending and unique.
class NodeSet {
  public:
    NodeSet() = default;

    static NodeSet of(const Dag &dag, std::vector<NodeId> ids);
    static NodeSet all(const Dag &dag);

    std::size_t size() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }
    std::span<const NodeId> ids() const { return ids_; }
    std::int64_t total_weight() const { return total_w_; }
    bool contains(NodeId v) const;

  private:
    std::vector<NodeId> ids_;
    std::int64_t total_w_ = 0;
};

/// layer[v] is the as-late-as-possible depth of v: every node sits one layer
/// below its lowest successor and sinks share the top layer.
struct LayerAssignment {
    std::vector<std::int32_t> layer;
    std::int32_t num_layers = 0;
};

struct SubDag {
    Dag dag;
    std::vector<NodeId> to_parent; // local id -> parent id
};

/// Validates and builds a Dag. Throws BadEdge for out-of-range ids,
/// self-loops and duplicate edges; CycleDetected for cyclic input;
/// Error for non-positive weights.
Dag build_dag(std::span<const Edge> edges, std::span<const std::int64_t> node_weights,
              std::vector<std::int64_t> ext_labels = {});

/// ALAP layering. num_layers equals the critical path length in nodes;
/// runs in O(|V|+|E|).
LayerAssignment alap_layers(const Dag &dag);

/// One topological order of the Dag (Kahn, lowest id first among ready nodes).
std::vector<NodeId> topological_order(const Dag &dag);

/// Weakly connected components of the subgraph induced by `within`,
/// ordered by descending total weight, ties by smallest member id.
std::vector<NodeSet> connected_components(const Dag &dag, const NodeSet &within);

/// Subgraph keeping exactly the edges with both endpoints in `within`,
/// with a back-mapping to parent ids. Local ids follow ascending parent id.
SubDag induced_subgraph(const Dag &dag, const NodeSet &within);

} // namespace graphopt
