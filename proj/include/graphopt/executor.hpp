#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "graphopt/dag.hpp"
#include "graphopt/ingest.hpp"
#include "graphopt/pipeline.hpp"

namespace graphopt {

struct ExecOptions {
    int reps = 100;     // timed repetitions; one untimed warm-up runs first
    bool check = false; // compare against the sequential reference
};

struct RunStats {
    std::vector<double> wall_seconds; // per timed repetition
    int barrier_count = 0;            // super layers - 1
    std::vector<std::vector<std::int64_t>> layer_thread_weight;
    std::optional<double> max_rel_error; // set on checked runs
    bool pinned = false;                 // thread pinning was available

    double min_seconds() const;
    double mean_seconds() const;
};

/// Forward substitution in row order.
std::vector<double> sptrsv_reference(const TriangularSystem &sys);

/// Topological evaluation: leaf = input, sum/product over children.
std::vector<double> circuit_reference(const Circuit &circuit, std::span<const double> input);

/// value[v] = weight[v] + sum of predecessor values; a plain-DAG kernel for
/// timing edge-list workloads.
std::vector<double> dag_sum_reference(const Dag &dag);

struct SptrsvRun {
    std::vector<double> x;
    RunStats stats;
};

struct CircuitRun {
    std::vector<double> values;
    RunStats stats;
};

struct DagSumRun {
    std::vector<double> values;
    RunStats stats;
};

/// Runs the schedule on P OS threads with a full barrier between super
/// layers. The schedule must carry the workload dag's fingerprint and pass
/// the static race check (operands produced in earlier layers or earlier in
/// the same partition).
SptrsvRun execute_schedule(const TriangularSystem &sys, const Schedule &schedule,
                           const ExecOptions &opt = {});
CircuitRun execute_schedule(const Circuit &circuit, std::span<const double> input,
                            const Schedule &schedule, const ExecOptions &opt = {});
DagSumRun execute_schedule(const Dag &dag, const Schedule &schedule, const ExecOptions &opt = {});

/// Baseline: one super layer per ALAP layer, nodes spread over threads by
/// greedy weight balancing (heaviest first onto the lightest thread).
Schedule layerwise_schedule(const Dag &dag, int threads);

} // namespace graphopt
