#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "graphopt/errors.hpp"
#include "graphopt/executor.hpp"
#include "graphopt/ingest.hpp"
#include "test_util.hpp"

using namespace graphopt;

namespace {

TriangularSystem tiny_system() {
    // L = [[2,0],[3,4]]
    TriangularSystem sys;
    sys.n = 2;
    sys.rows = {{}, {{0, 3.0}}};
    sys.diag = {2.0, 4.0};
    sys.b = {2.0, 10.0};
    sys.dag = build_dag(std::vector<Edge>{{0, 1}}, std::vector<std::int64_t>{1, 2});
    return sys;
}

} // namespace

TEST_CASE("forward substitution on hand cases") {
    SUBCASE("identity") {
        TriangularSystem sys;
        sys.n = 2;
        sys.rows = {{}, {}};
        sys.diag = {1.0, 1.0};
        sys.b = {1.0, 1.0};
        sys.dag = build_dag({}, std::vector<std::int64_t>{1, 1});
        CHECK(sptrsv_reference(sys) == std::vector<double>{1.0, 1.0});
    }
    SUBCASE("2x2 with one off-diagonal") {
        std::vector<double> x = sptrsv_reference(tiny_system());
        CHECK(x[0] == doctest::Approx(1.0));
        CHECK(x[1] == doctest::Approx(7.0 / 4.0));
    }
    SUBCASE("diagonal matrix divides elementwise") {
        TriangularSystem sys;
        sys.n = 3;
        sys.rows = {{}, {}, {}};
        sys.diag = {2.0, 4.0, 8.0};
        sys.b = {2.0, 2.0, 2.0};
        sys.dag = build_dag({}, std::vector<std::int64_t>{1, 1, 1});
        CHECK(sptrsv_reference(sys) == std::vector<double>{1.0, 0.5, 0.25});
    }
}

TEST_CASE("circuit reference on hand cases") {
    Circuit prod = parse_circuit("l 0 0\nl 1 1\np 2 0 1\n");
    std::vector<double> in{2.0, 3.0};
    CHECK(circuit_reference(prod, in)[2] == 6.0);

    Circuit dup = parse_circuit("l 0 0\ns 1 0 0\n");
    std::vector<double> one{5.0};
    CHECK(circuit_reference(dup, one)[1] == 10.0);
}

TEST_CASE("circuit reference equals the memoized recursive oracle") {
    testutil::Rng rng(12);
    Circuit c = testutil::random_circuit(50, rng);
    std::vector<double> input(c.num_inputs);
    for (auto &x : input)
        x = 0.5 + rng.unit();
    std::vector<double> got = circuit_reference(c, input);
    std::vector<double> memo(c.nodes.size());
    std::vector<bool> done(c.nodes.size(), false);
    for (NodeId v = 0; v < c.nodes.size(); ++v)
        CHECK(got[v] == testutil::circuit_oracle(c, input, v, memo, done));
}

TEST_CASE("parallel sptrsv is exact on the identity") {
    TriangularSystem sys;
    sys.n = 8;
    sys.rows.assign(8, {});
    sys.diag.assign(8, 1.0);
    sys.b.assign(8, 3.0);
    sys.dag = build_dag({}, std::vector<std::int64_t>(8, 1));
    PartitionConfig cfg;
    cfg.threads = 4;
    Schedule s = build_schedule(sys.dag, cfg);
    SptrsvRun run = execute_schedule(sys, s, ExecOptions{2, true});
    CHECK(run.x == sys.b);
    CHECK(run.stats.max_rel_error.value() == 0.0);
}

TEST_CASE("parallel sptrsv matches the reference on a random system") {
    testutil::Rng rng(3);
    TriangularSystem sys = testutil::random_system(500, 0.02 * 500, rng);
    PartitionConfig cfg;
    cfg.threads = 4;
    Schedule s = build_schedule(sys.dag, cfg);
    SptrsvRun run = execute_schedule(sys, s, ExecOptions{2, true});
    REQUIRE(run.stats.max_rel_error.has_value());
    CHECK(*run.stats.max_rel_error <= 1e-10);
}

TEST_CASE("single-thread single-layer schedule reproduces the reference bitwise") {
    testutil::Rng rng(4);
    TriangularSystem sys = testutil::random_system(100, 2.0, rng);
    Schedule s;
    s.threads = 1;
    s.graph_fingerprint = sys.dag.fingerprint();
    SuperLayer layer;
    layer.partitions.resize(1);
    for (NodeId v = 0; v < sys.n; ++v)
        layer.partitions[0].push_back(v); // row order is a topological order
    layer.weights = {sys.dag.total_weight()};
    s.layers.push_back(layer);
    s.placement.assign(sys.n, NodePlace{});
    for (NodeId v = 0; v < sys.n; ++v)
        s.placement[v] = NodePlace{0, 0, static_cast<std::int32_t>(v)};

    SptrsvRun run = execute_schedule(sys, s, ExecOptions{1, false});
    std::vector<double> ref = sptrsv_reference(sys);
    CHECK(run.x == ref);
}

TEST_CASE("parallel circuit evaluation matches the reference") {
    testutil::Rng rng(5);
    Circuit c = testutil::random_circuit(800, rng);
    std::vector<double> input(c.num_inputs, 1.0);
    PartitionConfig cfg;
    cfg.threads = 4;
    Schedule s = build_schedule(c.dag, cfg);
    CircuitRun run = execute_schedule(c, input, s, ExecOptions{2, true});
    REQUIRE(run.stats.max_rel_error.has_value());
    CHECK(*run.stats.max_rel_error <= 1e-12);
}

TEST_CASE("dag sum workload runs and checks") {
    testutil::Rng rng(6);
    Dag d = testutil::random_forward_dag(300, 2.0, rng, 3);
    PartitionConfig cfg;
    cfg.threads = 2;
    Schedule s = build_schedule(d, cfg);
    DagSumRun run = execute_schedule(d, s, ExecOptions{2, true});
    CHECK(*run.stats.max_rel_error <= 1e-12);
}

TEST_CASE("barrier accounting follows the layer count") {
    testutil::Rng rng(7);
    Dag d = testutil::random_forward_dag(200, 2.0, rng);
    PartitionConfig cfg;
    cfg.threads = 2;
    Schedule s = build_schedule(d, cfg);
    DagSumRun run = execute_schedule(d, s, ExecOptions{1, false});
    CHECK(run.stats.barrier_count == static_cast<int>(s.layers.size()) - 1);
    CHECK(run.stats.wall_seconds.size() == 1);
}

TEST_CASE("executor rejects a schedule for a different workload") {
    testutil::Rng rng(8);
    Dag d = testutil::random_forward_dag(50, 1.5, rng);
    PartitionConfig cfg;
    cfg.threads = 2;
    Schedule s = build_schedule(d, cfg);

    TriangularSystem sys = testutil::random_system(50, 1.0, rng);
    CHECK_THROWS_AS(execute_schedule(sys, s, ExecOptions{1, false}), FingerprintMismatch);
}

TEST_CASE("executor rejects a misordered schedule") {
    Dag d = build_dag(std::vector<Edge>{{0, 1}}, std::vector<std::int64_t>{1, 1});
    Schedule s;
    s.threads = 1;
    s.graph_fingerprint = d.fingerprint();
    SuperLayer layer;
    layer.partitions = {{1, 0}}; // consumer before producer
    layer.weights = {2};
    s.layers.push_back(layer);
    s.placement = {NodePlace{0, 0, 1}, NodePlace{0, 0, 0}};
    CHECK_THROWS_AS(execute_schedule(d, s, ExecOptions{1, false}), InternalInvariantViolation);
}

TEST_CASE("layerwise baseline: chain of five") {
    std::vector<Edge> edges;
    for (NodeId i = 0; i + 1 < 5; ++i)
        edges.push_back({i, i + 1});
    Dag d = build_dag(edges, std::vector<std::int64_t>(5, 1));
    Schedule s = layerwise_schedule(d, 2);
    CHECK(s.layers.size() == 5);
    CHECK(validate_schedule(d, s).ok());
    DagSumRun run = execute_schedule(d, s, ExecOptions{1, false});
    CHECK(run.stats.barrier_count == 4);
}

TEST_CASE("layerwise baseline balances within a layer") {
    Dag d = build_dag({}, std::vector<std::int64_t>(8, 1));
    Schedule s = layerwise_schedule(d, 4);
    REQUIRE(s.layers.size() == 1);
    CHECK(s.layers[0].weights == std::vector<std::int64_t>{2, 2, 2, 2});
}

TEST_CASE("layerwise baseline always has one super layer per ALAP layer") {
    testutil::Rng rng(9);
    for (int iter = 0; iter < 10; ++iter) {
        Dag d = testutil::random_forward_dag(1 + rng.below(400), 2.0, rng, 3);
        Schedule s = layerwise_schedule(d, 3);
        CHECK(s.layers.size() == static_cast<std::size_t>(alap_layers(d).num_layers));
        CHECK(validate_schedule(d, s).ok());
    }
}
