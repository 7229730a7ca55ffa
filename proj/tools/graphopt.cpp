#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "graphopt/errors.hpp"
#include "graphopt/executor.hpp"
#include "graphopt/generators.hpp"
#include "graphopt/ingest.hpp"
#include "graphopt/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;     // unreadable or unparsable input
constexpr int kExitInternal = 2;  // internal invariant violation
constexpr int kExitCheck = 3;     // --check comparison failed
constexpr int kExitFingerprint = 4;
constexpr int kExitUsage = 64;

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw graphopt::Error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw graphopt::Error("cannot write " + path);
    out << text;
}

struct CommonOpts {
    graphopt::PartitionConfig cfg;
    std::string format = "edgelist";
    int reps = 100;
    bool csv = false;
};

void add_partition_flags(CLI::App *cmd, CommonOpts &o) {
    cmd->add_option("--threads,-p", o.cfg.threads, "parallel partitions / worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", o.cfg.alpha, "window size multiplier")->check(CLI::PositiveNumber);
    cmd->add_option("--ws", o.cfg.size_weight, "objective weight on the smaller partition size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--wc", o.cfg.crossing_weight, "objective weight on crossing edges")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--thresh-g", o.cfg.coarsen_above, "coarsen subproblems above this many nodes");
    cmd->add_option("--margin", o.cfg.margin, "balance slack before truncation")
        ->check(CLI::Range(1.0, 1e9));
    cmd->add_option("--seed", o.cfg.seed, "random seed");
}

graphopt::Dag load_dag(const std::string &format, const std::string &text) {
    if (format == "mtx")
        return graphopt::parse_matrix_market(text).dag;
    if (format == "edgelist")
        return graphopt::parse_edgelist(text);
    if (format == "circuit")
        return graphopt::parse_circuit(text).dag;
    throw graphopt::Error("unknown format " + format);
}

void print_run_stats(const graphopt::RunStats &stats, bool csv) {
    if (csv) {
        std::printf("superlayers,barriers,reps,min_s,mean_s,pinned\n");
        std::printf("%zu,%d,%zu,%.9f,%.9f,%d\n", stats.layer_thread_weight.size(),
                    stats.barrier_count, stats.wall_seconds.size(), stats.min_seconds(),
                    stats.mean_seconds(), stats.pinned ? 1 : 0);
    } else {
        std::printf("super layers: %zu   barriers: %d\n", stats.layer_thread_weight.size(),
                    stats.barrier_count);
        std::printf("time over %zu reps: min %.6f s   mean %.6f s   (pinning %s)\n",
                    stats.wall_seconds.size(), stats.min_seconds(), stats.mean_seconds(),
                    stats.pinned ? "on" : "unavailable");
    }
}

int report_check(const graphopt::RunStats &stats, double tolerance) {
    if (!stats.max_rel_error)
        return kExitOk;
    if (*stats.max_rel_error <= tolerance) {
        std::printf("CHECK PASS (max rel err %.3g, tolerance %.3g)\n", *stats.max_rel_error,
                    tolerance);
        return kExitOk;
    }
    std::printf("CHECK FAIL (max rel err %.3g, tolerance %.3g)\n", *stats.max_rel_error,
                tolerance);
    return kExitCheck;
}

int cmd_partition(const CommonOpts &o, const std::string &input, const std::string &output) {
    graphopt::Dag dag = load_dag(o.format, read_file(input));
    graphopt::LayerAssignment layers = graphopt::alap_layers(dag);
    graphopt::Schedule schedule = graphopt::build_schedule(dag, o.cfg);
    write_file(output, graphopt::write_schedule(schedule));

    const auto superlayers = schedule.layers.size();
    const int barriers = superlayers == 0 ? 0 : static_cast<int>(superlayers) - 1;
    const double reduction =
        layers.num_layers == 0
            ? 0.0
            : 100.0 * (1.0 - static_cast<double>(superlayers) /
                                 static_cast<double>(layers.num_layers));
    if (o.csv) {
        std::printf("n,m,threads,alap_layers,superlayers,barriers,reduction_pct\n");
        std::printf("%zu,%zu,%d,%d,%zu,%d,%.2f\n", dag.node_count(), dag.edge_count(),
                    o.cfg.threads, layers.num_layers, superlayers, barriers, reduction);
    } else {
        std::printf("graph: %zu nodes, %zu edges, %d ALAP layers\n", dag.node_count(),
                    dag.edge_count(), layers.num_layers);
        std::printf("schedule: %zu super layers, %d barriers (%.1f%% fewer layers than ALAP)\n",
                    superlayers, barriers, reduction);
        for (std::size_t li = 0; li < schedule.layers.size(); ++li) {
            const auto &w = schedule.layers[li].weights;
            std::int64_t lo = 0, hi = 0, total = 0;
            for (std::int64_t x : w) {
                total += x;
                hi = std::max(hi, x);
                if (x > 0)
                    lo = lo == 0 ? x : std::min(lo, x);
            }
            std::printf("  layer %zu: weight %lld, per-thread min %lld max %lld\n", li,
                        static_cast<long long>(total), static_cast<long long>(lo),
                        static_cast<long long>(hi));
        }
        std::printf("wrote %s\n", output.c_str());
    }
    return kExitOk;
}

int cmd_run_sptrsv(const CommonOpts &o, const std::string &matrix_path,
                   const std::string &schedule_path, std::optional<int> threads, bool check) {
    graphopt::TriangularSystem sys = graphopt::parse_matrix_market(read_file(matrix_path));
    graphopt::Schedule schedule = graphopt::read_schedule(read_file(schedule_path), sys.dag);
    if (threads && *threads != schedule.threads) {
        std::fprintf(stderr, "--threads %d does not match schedule (threads %d)\n", *threads,
                     schedule.threads);
        return kExitUsage;
    }
    graphopt::ExecOptions opt{o.reps, check};
    graphopt::SptrsvRun run = graphopt::execute_schedule(sys, schedule, opt);
    print_run_stats(run.stats, o.csv);
    return report_check(run.stats, 1e-10);
}

int cmd_run_circuit(const CommonOpts &o, const std::string &circuit_path,
                    const std::string &schedule_path, const std::string &input_kind,
                    std::optional<int> threads, bool check) {
    graphopt::Circuit circuit = graphopt::parse_circuit(read_file(circuit_path));
    graphopt::Schedule schedule = graphopt::read_schedule(read_file(schedule_path), circuit.dag);
    if (threads && *threads != schedule.threads) {
        std::fprintf(stderr, "--threads %d does not match schedule (threads %d)\n", *threads,
                     schedule.threads);
        return kExitUsage;
    }

    std::vector<double> input(circuit.num_inputs, 1.0);
    if (input_kind == "random") {
        for (std::size_t i = 0; i < input.size(); ++i)
            input[i] = static_cast<double>(graphopt::splitmix64(o.cfg.seed + i) >> 11) * 0x1.0p-53;
    } else if (input_kind != "ones") {
        std::fprintf(stderr, "--input must be 'ones' or 'random'\n");
        return kExitUsage;
    }

    graphopt::ExecOptions opt{o.reps, check};
    graphopt::CircuitRun run = graphopt::execute_schedule(circuit, input, schedule, opt);
    print_run_stats(run.stats, o.csv);
    for (graphopt::NodeId v = 0; v < circuit.dag.node_count(); ++v)
        if (circuit.dag.out_degree(v) == 0)
            std::printf("root %u = %.17g\n", v, run.values[v]);
    return report_check(run.stats, 1e-12);
}

int cmd_compare(const CommonOpts &o, const std::string &input) {
    const std::string text = read_file(input);

    struct Row {
        const char *method;
        std::size_t superlayers;
        int barriers;
        double min_s;
        double mean_s;
    };
    std::vector<Row> rows;

    auto run_both = [&](const auto &workload, const graphopt::Dag &dag, auto &&exec) {
        graphopt::Schedule super = graphopt::build_schedule(dag, o.cfg);
        graphopt::Schedule layer = graphopt::layerwise_schedule(dag, o.cfg.threads);
        graphopt::ExecOptions opt{o.reps, false};
        auto super_stats = exec(workload, super, opt);
        auto layer_stats = exec(workload, layer, opt);
        rows.push_back(Row{"superlayer", super.layers.size(), super_stats.barrier_count,
                           super_stats.min_seconds(), super_stats.mean_seconds()});
        rows.push_back(Row{"layerwise", layer.layers.size(), layer_stats.barrier_count,
                           layer_stats.min_seconds(), layer_stats.mean_seconds()});
    };

    if (o.format == "mtx") {
        graphopt::TriangularSystem sys = graphopt::parse_matrix_market(text);
        run_both(sys, sys.dag, [](const auto &wl, const auto &s, const auto &opt) {
            return graphopt::execute_schedule(wl, s, opt).stats;
        });
    } else if (o.format == "circuit") {
        graphopt::Circuit circuit = graphopt::parse_circuit(text);
        std::vector<double> input(circuit.num_inputs, 1.0);
        run_both(circuit, circuit.dag, [&input](const auto &wl, const auto &s, const auto &opt) {
            return graphopt::execute_schedule(wl, input, s, opt).stats;
        });
    } else {
        graphopt::Dag dag = graphopt::parse_edgelist(text);
        run_both(dag, dag, [](const auto &wl, const auto &s, const auto &opt) {
            return graphopt::execute_schedule(wl, s, opt).stats;
        });
    }

    const Row &sup = rows[0];
    const Row &lay = rows[1];
    const double reduction =
        lay.barriers == 0 ? 0.0
                          : 100.0 * (1.0 - static_cast<double>(sup.barriers) /
                                               static_cast<double>(lay.barriers));
    const double ratio = sup.min_s == 0.0 ? 0.0 : lay.min_s / sup.min_s;

    if (o.csv) {
        std::printf("method,threads,superlayers,barriers,min_s,mean_s\n");
        for (const Row &r : rows)
            std::printf("%s,%d,%zu,%d,%.9f,%.9f\n", r.method, o.cfg.threads, r.superlayers,
                        r.barriers, r.min_s, r.mean_s);
    } else {
        for (const Row &r : rows)
            std::printf("%-10s P=%d  layers=%zu barriers=%d  min %.6f s  mean %.6f s\n", r.method,
                        o.cfg.threads, r.superlayers, r.barriers, r.min_s, r.mean_s);
        std::printf("barrier reduction: %.1f%%   speedup vs layerwise: %.2fx\n", reduction, ratio);
    }
    return kExitOk;
}

int run_cli(int argc, char **argv) {
    CLI::App app{"super-layer DAG partitioner and parallel schedule runner"};
    app.require_subcommand(1);

    // partition
    CommonOpts part_opts;
    std::string part_input, part_output;
    CLI::App *partition = app.add_subcommand("partition", "build a super-layer schedule");
    add_partition_flags(partition, part_opts);
    partition->add_option("--format", part_opts.format, "input format")
        ->check(CLI::IsMember({"mtx", "edgelist", "circuit"}));
    partition->add_flag("--csv", part_opts.csv, "machine-readable summary");
    partition->add_option("input", part_input, "input file")->required();
    partition->add_option("-o,--output", part_output, "schedule output path")->required();

    // run
    CLI::App *run = app.add_subcommand("run", "execute a schedule");
    run->require_subcommand(1);

    CommonOpts sptrsv_opts;
    std::string sptrsv_matrix, sptrsv_schedule;
    std::optional<int> sptrsv_threads;
    bool sptrsv_check = false;
    CLI::App *run_sptrsv = run->add_subcommand("sptrsv", "sparse lower-triangular solve");
    run_sptrsv->add_option("--matrix", sptrsv_matrix, "Matrix Market input")->required();
    run_sptrsv->add_option("--schedule", sptrsv_schedule, "schedule file")->required();
    run_sptrsv->add_option("--threads,-p", sptrsv_threads, "expected thread count")
        ->check(CLI::PositiveNumber);
    run_sptrsv->add_option("--reps", sptrsv_opts.reps, "timed repetitions")
        ->check(CLI::PositiveNumber);
    run_sptrsv->add_flag("--check", sptrsv_check, "compare against forward substitution");
    run_sptrsv->add_flag("--csv", sptrsv_opts.csv, "machine-readable stats");

    CommonOpts circ_opts;
    std::string circ_path, circ_schedule, circ_input = "ones";
    std::optional<int> circ_threads;
    bool circ_check = false;
    CLI::App *run_circuit = run->add_subcommand("circuit", "arithmetic circuit evaluation");
    run_circuit->add_option("--circuit", circ_path, "circuit input")->required();
    run_circuit->add_option("--schedule", circ_schedule, "schedule file")->required();
    run_circuit->add_option("--input", circ_input, "leaf inputs: ones | random");
    run_circuit->add_option("--threads,-p", circ_threads, "expected thread count")
        ->check(CLI::PositiveNumber);
    run_circuit->add_option("--seed", circ_opts.cfg.seed, "seed for random inputs");
    run_circuit->add_option("--reps", circ_opts.reps, "timed repetitions")
        ->check(CLI::PositiveNumber);
    run_circuit->add_flag("--check", circ_check, "compare against reference evaluation");
    run_circuit->add_flag("--csv", circ_opts.csv, "machine-readable stats");

    // compare
    CommonOpts cmp_opts;
    std::string cmp_input;
    CLI::App *compare =
        app.add_subcommand("compare", "super-layer schedule vs layer-wise baseline");
    add_partition_flags(compare, cmp_opts);
    compare->add_option("--format", cmp_opts.format, "input format")
        ->check(CLI::IsMember({"mtx", "edgelist", "circuit"}));
    compare->add_option("--reps", cmp_opts.reps, "timed repetitions")->check(CLI::PositiveNumber);
    compare->add_flag("--csv", cmp_opts.csv, "machine-readable stats");
    compare->add_option("input", cmp_input, "input file")->required();

    // gen
    CLI::App *gen = app.add_subcommand("gen", "emit synthetic inputs");
    gen->require_subcommand(1);
    std::string gen_output;
    std::size_t gen_n = 0, gen_width = 0, gen_density = 0, gen_bw = 0;
    std::uint64_t gen_seed = 0;

    CLI::App *gen_chain_cmd = gen->add_subcommand("chain", "chain DAG edge list");
    gen_chain_cmd->add_option("n", gen_n)->required();
    gen_chain_cmd->add_option("-o,--output", gen_output);

    CLI::App *gen_indep_cmd = gen->add_subcommand("indep", "independent nodes edge list");
    gen_indep_cmd->add_option("n", gen_n)->required();
    gen_indep_cmd->add_option("-o,--output", gen_output);

    CLI::App *gen_layered_cmd = gen->add_subcommand("layered", "random layered DAG edge list");
    gen_layered_cmd->add_option("n", gen_n)->required();
    gen_layered_cmd->add_option("width", gen_width)->required();
    gen_layered_cmd->add_option("density", gen_density)->required();
    gen_layered_cmd->add_option("seed", gen_seed)->required();
    gen_layered_cmd->add_option("-o,--output", gen_output);

    CLI::App *gen_band_cmd = gen->add_subcommand("band", "banded lower-triangular Matrix Market");
    gen_band_cmd->add_option("n", gen_n)->required();
    gen_band_cmd->add_option("bandwidth", gen_bw)->required();
    gen_band_cmd->add_option("-o,--output", gen_output);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (partition->parsed())
            return cmd_partition(part_opts, part_input, part_output);
        if (run_sptrsv->parsed())
            return cmd_run_sptrsv(sptrsv_opts, sptrsv_matrix, sptrsv_schedule, sptrsv_threads,
                                  sptrsv_check);
        if (run_circuit->parsed())
            return cmd_run_circuit(circ_opts, circ_path, circ_schedule, circ_input, circ_threads,
                                   circ_check);
        if (compare->parsed())
            return cmd_compare(cmp_opts, cmp_input);
        if (gen->parsed()) {
            std::string text;
            if (gen_chain_cmd->parsed())
                text = graphopt::gen_chain(gen_n);
            else if (gen_indep_cmd->parsed())
                text = graphopt::gen_indep(gen_n);
            else if (gen_layered_cmd->parsed())
                text = graphopt::gen_layered(gen_n, gen_width, gen_density, gen_seed);
            else
                text = graphopt::gen_band(gen_n, gen_bw);
            if (gen_output.empty())
                std::fwrite(text.data(), 1, text.size(), stdout);
            else
                write_file(gen_output, text);
            return kExitOk;
        }
    } catch (const graphopt::FingerprintMismatch &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFingerprint;
    } catch (const graphopt::InternalInvariantViolation &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInternal;
    } catch (const graphopt::Error &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }
    return kExitUsage;
}

} // namespace

int main(int argc, char **argv) { return run_cli(argc, argv); }
