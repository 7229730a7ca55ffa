#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphopt/dag.hpp"
#include "graphopt/partition_model.hpp"

namespace graphopt {

struct PartitionConfig {
    int threads = 1;                  // P
    int alpha = 4;                    // window size multiplier
    std::int64_t size_weight = 10;    // objective weight on the smaller partition
    std::int64_t crossing_weight = 1; // objective weight on crossing edges
    std::size_t exact_threshold = 20; // largest instance handed to the exact solver
    std::size_t coarsen_above = 2000; // coarsen instances with more nodes than this
    double margin = 1.1;              // balance slack before truncation
    std::uint64_t seed = 0;
    int move_budget = 0; // 0 = proportional to each solver instance

    // Scalability switches; all on by default. Turning them off reproduces
    // the brute-force pipeline (whole unmapped graph, no component split,
    // no coarsening), which is only viable for small graphs.
    bool limit_layers = true;
    bool split_components = true;
    bool coarsen_large = true;

    std::optional<std::chrono::milliseconds> time_budget;

    void validate() const;
};

/// One barrier-delimited layer: P mutually independent partitions, each an
/// ordered node list (a topological order of the partition).
struct SuperLayer {
    std::vector<std::vector<NodeId>> partitions;
    std::vector<std::int64_t> weights;

    std::int64_t total_weight() const;
    std::size_t node_count() const;
};

struct NodePlace {
    std::int32_t layer = -1;
    std::int32_t thread = -1;
    std::int32_t pos = -1;
};

struct Schedule {
    int threads = 0;
    std::vector<SuperLayer> layers; // bottom to top
    std::vector<NodePlace> placement;
    std::uint64_t graph_fingerprint = 0;
};

/// Threads of nodes already committed to earlier super layers; -1 = unmapped.
struct Placement {
    std::vector<std::int32_t> thread;

    Placement() = default;
    explicit Placement(std::size_t n) : thread(n, -1) {}
};

/// Lowest unmapped layers whose accumulated weight reaches
/// alpha * prev_layer_weight; always contains every unmapped node of the
/// lowest unmapped layer. Callers bootstrap prev_layer_weight with
/// P * (total weight / number of layers) on the first iteration.
NodeSet select_window(const Dag &dag, const LayerAssignment &layers, const NodeSet &unmapped,
                      std::int64_t prev_layer_weight, int alpha);

struct RecursiveParts {
    std::vector<NodeSet> per_thread; // index 0 <-> thread_lo
    NodeSet unallocated;
};

/// Recursive two-way splitting of `window` onto threads [thread_lo,
/// thread_hi]. Disconnected pieces are routed separately: a piece lighter
/// than total/x goes wholly to the lighter side, the rest are solved with
/// the two-way model (coarsened first above cfg.coarsen_above nodes).
RecursiveParts recursive_partition(const Dag &dag, const NodeSet &window, int thread_lo,
                                   int thread_hi, const Placement &prior,
                                   const PartitionConfig &cfg, const Deadline &deadline = {});

struct BalanceResult {
    SuperLayer layer;
    NodeSet returned; // nodes pushed back to the unmapped pool
};

/// Workload balancing: repeatedly merge and re-split the heaviest and
/// lightest partitions while the smallest grows, then truncate partitions
/// still above margin * smallest by dropping their topologically latest
/// nodes (never below the reference smallest, never to empty).
BalanceResult balance_super_layer(const Dag &dag, const LayerAssignment &layers,
                                  const std::vector<NodeSet> &partitions, const Placement &prior,
                                  const PartitionConfig &cfg, const Deadline &deadline = {});

/// Full pipeline: window, recursive partitioning, balancing, layer by layer
/// until every node is placed. Deterministic for a fixed config. Throws
/// PartitionTimeout when cfg.time_budget runs out and
/// InternalInvariantViolation if a built layer fails validation.
Schedule build_schedule(const Dag &dag, const PartitionConfig &cfg);

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::vector<std::int64_t>> layer_weights;
    std::int64_t crossing_edges = 0; // edges whose endpoints run on different threads
    int barrier_count = 0;

    bool ok() const { return violations.empty(); }
};

/// Structural checks: node coverage, partition independence, intra-partition
/// order, layer monotonicity over edges, recorded weights, fingerprint.
ValidationReport validate_schedule(const Dag &dag, const Schedule &schedule);

} // namespace graphopt
