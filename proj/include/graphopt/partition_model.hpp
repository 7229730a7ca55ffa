#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "graphopt/dag.hpp"

namespace graphopt {

/// Partition label: 0 = unallocated, 1 and 2 = the two output partitions.
using PartLabel = std::uint8_t;

/// Incoming edge from a node that is already placed in an earlier super
/// layer. Only the side of the source matters, so the edge carries the
/// source's partition tag (1 = left thread group, 2 = right) and the
/// destination inside the current graph.
struct VinEdge {
    PartLabel source_part = 1;
    NodeId dst = 0;
    friend bool operator==(const VinEdge &, const VinEdge &) = default;
};

/// One instance of the two-way partitioning model: split `graph` into two
/// independent partitions plus an unallocated remainder, maximizing
///   size_weight * min(part sizes) - crossing_weight * (crossing vin edges).
struct TwoWayProblem {
    Dag graph;
    std::vector<VinEdge> vin_edges;
    std::int64_t size_weight = 10;     // w_s
    std::int64_t crossing_weight = 1;  // w_c
    int left_threads = 1;              // threads the label-1 side stands for
    int right_threads = 1;

    void validate() const; // throws Error on a malformed instance
};

struct TwoWaySolution {
    std::vector<PartLabel> part;
    std::int64_t part1_size = 0;
    std::int64_t part2_size = 0;
    std::int64_t crossings = 0;
    std::int64_t objective = 0;
};

/// First edge (src,dst) whose labels violate the dependency constraint
/// part[dst] == part[src] || part[dst] == 0.
struct InfeasibleEdge {
    NodeId src = 0;
    NodeId dst = 0;
};

using EvalResult = std::variant<TwoWaySolution, InfeasibleEdge>;

/// Scores an assignment against the model, or reports the first violated
/// edge (nodes scanned ascending, successors ascending).
EvalResult evaluate(const TwoWayProblem &problem, std::span<const PartLabel> part);

bool is_feasible(const EvalResult &r);

/// Wall-clock cutoff threaded through the solvers; unset means unlimited.
struct Deadline {
    std::optional<std::chrono::steady_clock::time_point> at;

    static Deadline after(std::chrono::milliseconds budget) {
        return Deadline{std::chrono::steady_clock::now() + budget};
    }
    bool expired() const {
        return at.has_value() && std::chrono::steady_clock::now() >= *at;
    }
};

/// Feasible assignment built greedily along a topological order: a node
/// joins a side only when all its predecessors are there, sources pick the
/// lighter side. Never unassigns, so partitions are unions of
/// source-rooted subtrees.
std::vector<PartLabel> grow_seed(const TwoWayProblem &problem);

/// Globally optimal solution by branch and bound over all 3^|V|
/// assignments. Ties broken toward more allocated weight, then the
/// lexicographically smallest part vector. Throws TooLarge above
/// node_budget.
TwoWaySolution solve_exact(const TwoWayProblem &problem, std::size_t node_budget = 24,
                           const Deadline &deadline = {});

/// Local search: grow-only seed, then hill climbing with single-node and
/// connected-group relabelings that keep the dependency constraint,
/// accepting only strict score improvements. Deterministic for a fixed
/// seed; the result never scores below the seed assignment. A move budget
/// of 0 scales the accepted-move cap with the instance size.
TwoWaySolution solve_heuristic(const TwoWayProblem &problem, std::uint64_t seed = 0,
                               int move_budget = 0, const Deadline &deadline = {});

struct SolverConfig {
    std::size_t exact_threshold = 20;
    std::uint64_t seed = 0;
    int move_budget = 0; // 0 = proportional to the instance
    Deadline deadline{};
};

/// Dispatch: exact below cfg.exact_threshold nodes, heuristic above. If the
/// winning solution allocates nothing, falls back to placing the
/// minimal-id source of the graph in partition 1 so callers always make
/// progress.
TwoWaySolution solve(const TwoWayProblem &problem, const SolverConfig &cfg = {});

} // namespace graphopt
