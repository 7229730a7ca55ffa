// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Criteria 5 and 8 are cross-cutting
// invariants checked over every schedule the suite builds.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "graphopt/errors.hpp"
#include "graphopt/executor.hpp"
#include "graphopt/generators.hpp"
#include "graphopt/ingest.hpp"
#include "graphopt/partition_model.hpp"
#include "graphopt/pipeline.hpp"
#include "test_util.hpp"

using namespace graphopt;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
    int failures = 0;

    // collected across all schedules the suite builds
    long dominance_checked = 0;
    long dominance_bad = 0;
    long balance_layers_checked = 0;
    long balance_bad = 0;

    void report(int idx, const char *name, bool pass, const std::string &detail) {
        std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", idx, name, detail.c_str());
        std::fflush(stdout);
        if (!pass)
            ++failures;
    }

    void observe(const Dag &dag, const Schedule &s, double margin) {
        ++dominance_checked;
        if (s.layers.size() > static_cast<std::size_t>(alap_layers(dag).num_layers))
            ++dominance_bad;
        for (const SuperLayer &layer : s.layers) {
            bool all_nonempty = true;
            std::int64_t max_w = 0, min_w = 0, max_node = 0;
            for (std::size_t t = 0; t < layer.partitions.size(); ++t) {
                if (layer.partitions[t].empty()) {
                    all_nonempty = false;
                    break;
                }
                max_w = std::max(max_w, layer.weights[t]);
                min_w = min_w == 0 ? layer.weights[t] : std::min(min_w, layer.weights[t]);
                for (NodeId v : layer.partitions[t])
                    max_node = std::max(max_node, dag.node_weight(v));
            }
            if (!all_nonempty)
                continue;
            ++balance_layers_checked;
            if (static_cast<double>(max_w) >
                margin * static_cast<double>(min_w) + static_cast<double>(max_node))
                ++balance_bad;
        }
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *pattern, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

TwoWayProblem nine_node_instance() {
    TwoWayProblem p;
    p.graph = build_dag(
        std::vector<Edge>{{0, 4}, {1, 4}, {2, 5}, {3, 5}, {4, 6}, {5, 7}, {6, 8}, {7, 8}},
        std::vector<std::int64_t>(9, 1));
    p.vin_edges = {VinEdge{1, 0}, VinEdge{1, 6}, VinEdge{1, 1},
                   VinEdge{2, 2}, VinEdge{2, 7}, VinEdge{2, 3}};
    p.left_threads = 2;
    p.right_threads = 2;
    return p;
}

void criterion_1(Harness &h) {
    auto t0 = Clock::now();
    TwoWayProblem p = nine_node_instance();
    TwoWaySolution s = solve_exact(p);
    auto [best_obj, best_alloc] = testutil::enumerate_best(p);

    bool pass = s.part[8] == 0;
    for (NodeId v : {0u, 1u, 4u, 6u})
        pass = pass && s.part[v] == 1;
    for (NodeId v : {2u, 3u, 5u, 7u})
        pass = pass && s.part[v] == 2;
    pass = pass && s.objective == best_obj && s.part1_size + s.part2_size == best_alloc;
    double dt = seconds_since(t0);
    pass = pass && dt < 1.0;
    h.report(1, "two-way golden instance", pass,
             fmt("objective %g (brute-force optimum %g), %.3f s", double(s.objective),
                 double(best_obj), dt));
}

void criterion_2(Harness &h) {
    auto t0 = Clock::now();
    testutil::Rng rng(20260808);
    int mismatches = 0;
    for (int iter = 0; iter < 200; ++iter) {
        TwoWayProblem p = testutil::random_problem(8, rng);
        TwoWaySolution s = solve_exact(p);
        auto [best_obj, best_alloc] = testutil::enumerate_best(p);
        if (s.objective != best_obj || s.part1_size + s.part2_size != best_alloc)
            ++mismatches;
    }
    double dt = seconds_since(t0);
    h.report(2, "exact solver vs enumeration", mismatches == 0 && dt < 30.0,
             fmt("%g/200 mismatches, %.2f s", double(mismatches), dt));
}

void criterion_3(Harness &h) {
    auto t0 = Clock::now();
    testutil::Rng rng(31337);
    int bad = 0, built = 0;
    for (int g = 0; g < 100; ++g) {
        Dag dag = [&]() {
            std::size_t n = 1 + rng.below(5000);
            switch (g % 3) {
            case 0:
                return testutil::random_forward_dag(n, 1.0 + 3.0 * rng.unit(), rng, 4);
            case 1:
                return parse_edgelist(
                    gen_layered(n, 4 + rng.below(40), 1 + rng.below(3), rng.next()));
            default:
                return testutil::random_forward_dag(std::max<std::size_t>(2, n / 4), 0.8, rng, 8);
            }
        }();
        for (int P : {2, 3, 4, 8}) {
            PartitionConfig cfg;
            cfg.threads = P;
            cfg.seed = static_cast<std::uint64_t>(g);
            Schedule s = build_schedule(dag, cfg);
            ValidationReport r = validate_schedule(dag, s);
            ++built;
            if (!r.ok()) {
                ++bad;
                if (bad == 1)
                    std::fprintf(stderr, "first violation: %s\n", r.violations.front().c_str());
            }
            h.observe(dag, s, cfg.margin);
        }
    }
    double dt = seconds_since(t0);
    h.report(3, "schedule validity sweep", bad == 0 && dt < 600.0,
             fmt("%g/%g schedules invalid, %.1f s", double(bad), double(built), dt));
}

void criterion_4(Harness &h) {
    Dag dag = parse_edgelist(gen_layered(10000, 16, 2, 7));
    PartitionConfig cfg;
    cfg.threads = 8;
    Schedule s = build_schedule(dag, cfg);
    h.observe(dag, s, cfg.margin);
    int alap = alap_layers(dag).num_layers;
    double ratio = static_cast<double>(s.layers.size()) / static_cast<double>(alap);
    h.report(4, "barrier reduction >= 80%", ratio <= 0.20,
             fmt("%g super layers vs %g ALAP layers (%.1f%% reduction)",
                 double(s.layers.size()), double(alap), 100.0 * (1.0 - ratio)));
}

void criterion_5(Harness &h) {
    h.report(5, "barrier dominance invariant", h.dominance_bad == 0 && h.dominance_checked > 0,
             fmt("%g violations over %g schedules", double(h.dominance_bad),
                 double(h.dominance_checked)));
}

void criterion_6(Harness &h) {
    testutil::Rng rng(606);
    double worst = 0.0;
    bool pass = true;
    for (int i = 0; i < 20; ++i) {
        std::size_t n = 200 + rng.below(4800);
        TriangularSystem sys = testutil::random_system(n, 1.0 + 3.0 * rng.unit(), rng);
        for (int P : {2, 4}) {
            PartitionConfig cfg;
            cfg.threads = P;
            cfg.seed = static_cast<std::uint64_t>(i);
            Schedule s = build_schedule(sys.dag, cfg);
            h.observe(sys.dag, s, cfg.margin);
            SptrsvRun run = execute_schedule(sys, s, ExecOptions{1, true});
            worst = std::max(worst, run.stats.max_rel_error.value());
            pass = pass && run.stats.max_rel_error.value() <= 1e-10;
        }
    }
    h.report(6, "sptrsv numerical agreement", pass, fmt("max rel err %.3g (bound 1e-10)", worst));
}

void criterion_7(Harness &h) {
    testutil::Rng rng(707);
    double worst = 0.0;
    bool pass = true;
    for (int i = 0; i < 20; ++i) {
        Circuit c = testutil::random_circuit(500 + rng.below(9500), rng);
        std::vector<double> input(c.num_inputs);
        for (auto &x : input)
            x = 0.25 + 0.75 * rng.unit(); // keep products in a sane range
        PartitionConfig cfg;
        cfg.threads = 4;
        cfg.seed = static_cast<std::uint64_t>(i);
        Schedule s = build_schedule(c.dag, cfg);
        h.observe(c.dag, s, cfg.margin);
        CircuitRun run = execute_schedule(c, input, s, ExecOptions{1, false});

        std::vector<double> memo(c.nodes.size());
        std::vector<bool> done(c.nodes.size(), false);
        for (NodeId v = 0; v < c.nodes.size(); ++v) {
            double want = testutil::circuit_oracle(c, input, v, memo, done);
            double got = run.values[v];
            if (std::memcmp(&got, &want, sizeof(double)) == 0)
                continue; // bitwise identical, including overflowed values
            double denom = std::max(std::abs(want), 1e-30);
            double rel = std::abs(got - want) / denom;
            worst = std::max(worst, rel);
            pass = pass && rel <= 1e-12;
        }
    }
    h.report(7, "circuit numerical agreement", pass, fmt("max rel err %.3g (bound 1e-12)", worst));
}

void criterion_8(Harness &h) {
    h.report(8, "per-layer balance invariant",
             h.balance_bad == 0 && h.balance_layers_checked > 0,
             fmt("%g violations over %g full layers", double(h.balance_bad),
                 double(h.balance_layers_checked)));
}

void criterion_9(Harness &h) {
    std::printf("       ... generating the 1M-node graph\n");
    std::fflush(stdout);
    Dag dag = parse_edgelist(gen_layered(1000000, 64, 2, 7));

    auto t0 = Clock::now();
    PartitionConfig cfg;
    cfg.threads = 16; // upper end of the evaluated thread range; the
                      // recursion is deepest and the ablation starkest here
    Schedule s = build_schedule(dag, cfg);
    double enabled_s = seconds_since(t0);
    bool enabled_ok = enabled_s < 600.0 && validate_schedule(dag, s).ok();
    h.observe(dag, s, cfg.margin);

    PartitionConfig off = cfg;
    off.limit_layers = false;
    off.split_components = false;
    off.coarsen_large = false;
    off.time_budget = std::chrono::milliseconds(60000);
    auto t1 = Clock::now();
    bool capped = false;
    try {
        Schedule slow = build_schedule(dag, off);
        (void)slow; // finished inside the cap: the techniques did not matter
    } catch (const PartitionTimeout &) {
        capped = true;
    }
    double disabled_s = seconds_since(t1);
    bool disabled_ok = capped && disabled_s >= 59.0;

    h.report(9, "scalability techniques matter", enabled_ok && disabled_ok,
             fmt("enabled: %.1f s for 1M nodes; disabled: hit 60 s cap after %.1f s", enabled_s,
                 disabled_s));
}

void criterion_10(Harness &h) {
    char templ[] = "/tmp/graphopt_acc_XXXXXX";
    const char *dir = mkdtemp(templ);
    if (!dir) {
        h.report(10, "cmd_partition determinism", false, "could not create temp dir");
        return;
    }
    std::string base(dir);
    auto shell = [](const std::string &cmd) {
        int status = std::system(cmd.c_str());
        return WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const std::string &path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const std::string cli = GRAPHOPT_CLI_PATH;
    bool ok = shell(cli + " gen layered 20000 32 2 9 -o " + base + "/g.el");
    ok = ok && shell(cli + " partition --format edgelist --threads 8 --seed 5 -o " + base +
                     "/s1.sched " + base + "/g.el > /dev/null");
    ok = ok && shell(cli + " partition --format edgelist --threads 8 --seed 5 -o " + base +
                     "/s2.sched " + base + "/g.el > /dev/null");
    std::string s1 = slurp(base + "/s1.sched");
    bool identical = ok && !s1.empty() && s1 == slurp(base + "/s2.sched");
    h.report(10, "cmd_partition determinism", identical,
             identical ? "two runs produced byte-identical schedules"
                       : "outputs differ or command failed");
}

} // namespace

int main() {
    Harness h;
    criterion_1(h);
    criterion_2(h);
    criterion_3(h);
    criterion_4(h);
    criterion_6(h);
    criterion_7(h);
    criterion_9(h);
    criterion_5(h); // cross-cutting: uses every schedule built above
    criterion_8(h);
    criterion_10(h);

    if (h.failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", h.failures);
    return h.failures == 0 ? 0 : 1;
}
