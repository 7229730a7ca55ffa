#include "graphopt/executor.hpp"

#include <algorithm>
#include <barrier>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <thread>

#include "graphopt/errors.hpp"

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace graphopt {

namespace {

using Clock = std::chrono::steady_clock;

void require_executable(const Dag &dag, const Schedule &s) {
    if (s.graph_fingerprint != dag.fingerprint())
        throw FingerprintMismatch(dag.fingerprint(), s.graph_fingerprint);
    if (s.placement.size() != dag.node_count())
        throw InternalInvariantViolation("schedule placement table missing");
    // Static race check: every operand must be produced in a strictly
    // earlier super layer or earlier in the consumer's own partition.
    for (NodeId u = 0; u < dag.node_count(); ++u) {
        const NodePlace &pu = s.placement[u];
        if (pu.layer < 0)
            throw InternalInvariantViolation("node " + std::to_string(u) + " is unscheduled");
        for (NodeId v : dag.successors(u)) {
            const NodePlace &pv = s.placement[v];
            bool ordered = pu.layer < pv.layer ||
                           (pu.layer == pv.layer && pu.thread == pv.thread && pu.pos < pv.pos);
            if (!ordered)
                throw InternalInvariantViolation("edge (" + std::to_string(u) + "," +
                                                 std::to_string(v) + ") is not ordered");
        }
    }
}

bool pin_to_core(int index) {
#if defined(__linux__)
    cpu_set_t set;
    CPU_ZERO(&set);
    unsigned cores = std::max(1u, std::thread::hardware_concurrency());
    CPU_SET(static_cast<unsigned>(index) % cores, &set);
    return pthread_setaffinity_np(pthread_self(), sizeof set, &set) == 0;
#else
    (void)index;
    return false;
#endif
}

void fill_layer_weights(const Dag &dag, const Schedule &s, RunStats &stats) {
    stats.layer_thread_weight.clear();
    for (const SuperLayer &layer : s.layers) {
        std::vector<std::int64_t> row(layer.partitions.size(), 0);
        for (std::size_t t = 0; t < layer.partitions.size(); ++t)
            for (NodeId v : layer.partitions[t])
                row[t] += dag.node_weight(v);
        stats.layer_thread_weight.push_back(std::move(row));
    }
    stats.barrier_count = s.layers.empty() ? 0 : static_cast<int>(s.layers.size()) - 1;
}

/// Runs `reps`+1 repetitions of the whole schedule (first one untimed) with
/// a barrier after every super layer. node_fn(v) must write only v's slot.
template <typename NodeFn>
RunStats run_parallel(const Schedule &s, int reps, NodeFn node_fn) {
    const int P = s.threads;
    RunStats stats;
    stats.wall_seconds.assign(static_cast<std::size_t>(reps), 0.0);

    std::barrier bar(P);
    std::vector<char> pin_ok(static_cast<std::size_t>(P), 0);
    Clock::time_point t0;

    auto worker = [&](int t) {
        pin_ok[static_cast<std::size_t>(t)] = pin_to_core(t) ? 1 : 0;
        for (int rep = 0; rep <= reps; ++rep) {
            bar.arrive_and_wait();
            if (t == 0)
                t0 = Clock::now();
            for (const SuperLayer &layer : s.layers) {
                for (NodeId v : layer.partitions[static_cast<std::size_t>(t)])
                    node_fn(v);
                bar.arrive_and_wait();
            }
            if (t == 0 && rep > 0)
                stats.wall_seconds[static_cast<std::size_t>(rep - 1)] =
                    std::chrono::duration<double>(Clock::now() - t0).count();
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(P - 1));
    for (int t = 1; t < P; ++t)
        pool.emplace_back(worker, t);
    worker(0);
    pool.clear();

    stats.pinned = std::all_of(pin_ok.begin(), pin_ok.end(), [](char c) { return c != 0; });
    return stats;
}

double max_rel_error(std::span<const double> got, std::span<const double> want) {
    assert(got.size() == want.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        // Bitwise-equal values (including inf and NaN payloads) agree
        // exactly; |inf - inf| would otherwise poison the maximum.
        if (std::memcmp(&got[i], &want[i], sizeof(double)) == 0)
            continue;
        double denom = std::max(std::abs(want[i]), 1e-30);
        worst = std::max(worst, std::abs(got[i] - want[i]) / denom);
    }
    return worst;
}

} // namespace

double RunStats::min_seconds() const {
    return wall_seconds.empty() ? 0.0 : *std::min_element(wall_seconds.begin(), wall_seconds.end());
}

double RunStats::mean_seconds() const {
    if (wall_seconds.empty())
        return 0.0;
    return std::accumulate(wall_seconds.begin(), wall_seconds.end(), 0.0) /
           static_cast<double>(wall_seconds.size());
}

std::vector<double> sptrsv_reference(const TriangularSystem &sys) {
    std::vector<double> x(sys.n, 0.0);
    for (std::size_t i = 0; i < sys.n; ++i) {
        double acc = sys.b[i];
        for (const auto &[col, val] : sys.rows[i])
            acc -= val * x[col];
        x[i] = acc / sys.diag[i];
    }
    return x;
}

std::vector<double> circuit_reference(const Circuit &circuit, std::span<const double> input) {
    if (input.size() != circuit.num_inputs)
        throw Error("input vector has " + std::to_string(input.size()) + " entries, circuit needs " +
                    std::to_string(circuit.num_inputs));
    std::vector<double> values(circuit.nodes.size(), 0.0);
    for (NodeId v = 0; v < circuit.nodes.size(); ++v) {
        const Circuit::Node &node = circuit.nodes[v];
        switch (node.kind) {
        case Circuit::Kind::Leaf:
            values[v] = input[static_cast<std::size_t>(node.input_index)];
            break;
        case Circuit::Kind::Sum: {
            double acc = 0.0;
            for (NodeId c : node.children)
                acc += values[c];
            values[v] = acc;
            break;
        }
        case Circuit::Kind::Product: {
            double acc = 1.0;
            for (NodeId c : node.children)
                acc *= values[c];
            values[v] = acc;
            break;
        }
        }
    }
    return values;
}

std::vector<double> dag_sum_reference(const Dag &dag) {
    std::vector<double> values(dag.node_count(), 0.0);
    for (NodeId v : topological_order(dag)) {
        double acc = static_cast<double>(dag.node_weight(v));
        for (NodeId u : dag.predecessors(v))
            acc += values[u];
        values[v] = acc;
    }
    return values;
}

SptrsvRun execute_schedule(const TriangularSystem &sys, const Schedule &schedule,
                           const ExecOptions &opt) {
    require_executable(sys.dag, schedule);
    SptrsvRun run;
    run.x.assign(sys.n, 0.0);
    double *x = run.x.data();
    run.stats = run_parallel(schedule, opt.reps, [&sys, x](NodeId i) {
        double acc = sys.b[i];
        for (const auto &[col, val] : sys.rows[i])
            acc -= val * x[col];
        x[i] = acc / sys.diag[i];
    });
    fill_layer_weights(sys.dag, schedule, run.stats);
    if (opt.check)
        run.stats.max_rel_error = max_rel_error(run.x, sptrsv_reference(sys));
    return run;
}

CircuitRun execute_schedule(const Circuit &circuit, std::span<const double> input,
                            const Schedule &schedule, const ExecOptions &opt) {
    require_executable(circuit.dag, schedule);
    if (input.size() != circuit.num_inputs)
        throw Error("input vector has " + std::to_string(input.size()) + " entries, circuit needs " +
                    std::to_string(circuit.num_inputs));
    CircuitRun run;
    run.values.assign(circuit.nodes.size(), 0.0);
    double *values = run.values.data();
    const Circuit::Node *nodes = circuit.nodes.data();
    const double *in = input.data();
    run.stats = run_parallel(schedule, opt.reps, [nodes, values, in](NodeId v) {
        const Circuit::Node &node = nodes[v];
        switch (node.kind) {
        case Circuit::Kind::Leaf:
            values[v] = in[node.input_index];
            break;
        case Circuit::Kind::Sum: {
            double acc = 0.0;
            for (NodeId c : node.children)
                acc += values[c];
            values[v] = acc;
            break;
        }
        case Circuit::Kind::Product: {
            double acc = 1.0;
            for (NodeId c : node.children)
                acc *= values[c];
            values[v] = acc;
            break;
        }
        }
    });
    fill_layer_weights(circuit.dag, schedule, run.stats);
    if (opt.check)
        run.stats.max_rel_error = max_rel_error(run.values, circuit_reference(circuit, input));
    return run;
}

DagSumRun execute_schedule(const Dag &dag, const Schedule &schedule, const ExecOptions &opt) {
    require_executable(dag, schedule);
    DagSumRun run;
    run.values.assign(dag.node_count(), 0.0);
    double *values = run.values.data();
    run.stats = run_parallel(schedule, opt.reps, [&dag, values](NodeId v) {
        double acc = static_cast<double>(dag.node_weight(v));
        for (NodeId u : dag.predecessors(v))
            acc += values[u];
        values[v] = acc;
    });
    fill_layer_weights(dag, schedule, run.stats);
    if (opt.check)
        run.stats.max_rel_error = max_rel_error(run.values, dag_sum_reference(dag));
    return run;
}

Schedule layerwise_schedule(const Dag &dag, int threads) {
    if (threads < 1)
        throw Error("thread count must be >= 1");
    const std::size_t n = dag.node_count();
    LayerAssignment layers = alap_layers(dag);

    Schedule s;
    s.threads = threads;
    s.graph_fingerprint = dag.fingerprint();
    s.placement.assign(n, NodePlace{});
    if (n == 0)
        return s;

    std::vector<std::vector<NodeId>> by_layer(static_cast<std::size_t>(layers.num_layers));
    for (NodeId v = 0; v < n; ++v)
        by_layer[static_cast<std::size_t>(layers.layer[v])].push_back(v);

    for (std::int32_t l = 0; l < layers.num_layers; ++l) {
        auto &nodes = by_layer[static_cast<std::size_t>(l)];
        std::sort(nodes.begin(), nodes.end(), [&](NodeId a, NodeId b) {
            if (dag.node_weight(a) != dag.node_weight(b))
                return dag.node_weight(a) > dag.node_weight(b);
            return a < b;
        });
        SuperLayer layer;
        layer.partitions.resize(static_cast<std::size_t>(threads));
        layer.weights.assign(static_cast<std::size_t>(threads), 0);
        for (NodeId v : nodes) {
            std::size_t lightest = 0;
            for (std::size_t t = 1; t < layer.weights.size(); ++t)
                if (layer.weights[t] < layer.weights[lightest])
                    lightest = t;
            s.placement[v] = NodePlace{l, static_cast<std::int32_t>(lightest),
                                       static_cast<std::int32_t>(layer.partitions[lightest].size())};
            layer.partitions[lightest].push_back(v);
            layer.weights[lightest] += dag.node_weight(v);
        }
        s.layers.push_back(std::move(layer));
    }
    return s;
}

} // namespace graphopt
