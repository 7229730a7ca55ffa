#include "graphopt/pipeline.hpp"

#include <algorithm>
#include <cassert>
#include <numeric>

#include "graphopt/coarsen.hpp"
#include "graphopt/errors.hpp"

namespace graphopt {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::pair<std::int32_t, NodeId> order_key(const LayerAssignment &layers, NodeId v) {
    return {layers.layer[v], v};
}

/// (ALAP layer, id) sorting gives a valid execution order: every edge
/// strictly increases the layer.
std::vector<NodeId> ordered_list(const LayerAssignment &layers, std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end(), [&](NodeId a, NodeId b) {
        return order_key(layers, a) < order_key(layers, b);
    });
    return ids;
}

// -----------------------------------------------------------------------
// Recursive two-way partitioning over a window-local subgraph.
// -----------------------------------------------------------------------
class RecursiveSplitter {
  public:
    RecursiveSplitter(const Dag &dag, const NodeSet &window, int thread_lo, int thread_hi,
             const Placement &prior, const PartitionConfig &cfg, const Deadline &deadline)
        : cfg_(cfg), deadline_(deadline), thread_lo_(thread_lo),
          sub_(induced_subgraph(dag, window)) {
        const std::size_t ln = sub_.dag.node_count();
        out_.assign(static_cast<std::size_t>(thread_hi - thread_lo + 1), {});

        // Incoming edges from nodes committed to earlier super layers, kept
        // as source threads; the 1/2 tag depends on the recursion's range.
        vin_off_.assign(ln + 1, 0);
        for (NodeId local = 0; local < ln; ++local) {
            for (NodeId p : dag.predecessors(sub_.to_parent[local]))
                if (prior.thread[p] >= 0)
                    vin_thread_.push_back(prior.thread[p]);
            vin_off_[local + 1] = vin_thread_.size();
        }

        stamp_of_.assign(ln, 0);

        std::vector<NodeId> all(ln);
        std::iota(all.begin(), all.end(), 0u);
        recurse(std::move(all), thread_lo, thread_hi);
    }

    RecursiveParts result(const Dag &dag) && {
        RecursiveParts r;
        r.per_thread.reserve(out_.size());
        for (auto &ids : out_) {
            for (NodeId &v : ids)
                v = sub_.to_parent[v];
            r.per_thread.push_back(NodeSet::of(dag, std::move(ids)));
        }
        for (NodeId &v : unallocated_)
            v = sub_.to_parent[v];
        r.unallocated = NodeSet::of(dag, std::move(unallocated_));
        return r;
    }

  private:
    void recurse(std::vector<NodeId> ids, int lo, int hi) {
        if (ids.empty())
            return;
        if (deadline_.expired())
            throw PartitionTimeout();
        const int x = hi - lo + 1;
        if (x == 1) {
            auto &slot = out_[static_cast<std::size_t>(lo - thread_lo_)];
            slot.insert(slot.end(), ids.begin(), ids.end());
            return;
        }
        const int mid = lo + (x + 1) / 2; // left gets ceil(x/2) threads

        std::vector<std::vector<NodeId>> comps = components(ids);

        std::int64_t total = 0;
        for (NodeId v : ids)
            total += sub_.dag.node_weight(v);

        std::vector<NodeId> left, right;
        std::int64_t left_w = 0, right_w = 0;
        for (auto &comp : comps) {
            std::int64_t comp_w = 0;
            for (NodeId v : comp)
                comp_w += sub_.dag.node_weight(v);

            // Proportional thread share of this piece; a share of one thread
            // or less cannot be split two ways, so it is routed whole to the
            // lighter half.
            if (cfg_.split_components && comp_w * x < 2 * total) {
                if (left_w <= right_w) {
                    left.insert(left.end(), comp.begin(), comp.end());
                    left_w += comp_w;
                } else {
                    right.insert(right.end(), comp.begin(), comp.end());
                    right_w += comp_w;
                }
                continue;
            }

            std::vector<PartLabel> labels = split_component(comp, lo, mid, hi);
            for (std::size_t i = 0; i < comp.size(); ++i) {
                if (labels[i] == 1) {
                    left.push_back(comp[i]);
                    left_w += sub_.dag.node_weight(comp[i]);
                } else if (labels[i] == 2) {
                    right.push_back(comp[i]);
                    right_w += sub_.dag.node_weight(comp[i]);
                } else {
                    unallocated_.push_back(comp[i]);
                }
            }
        }

        recurse(std::move(left), lo, mid - 1);
        recurse(std::move(right), mid, hi);
    }

    /// Two-way split of one connected component; returns per-node labels in
    /// component order.
    std::vector<PartLabel> split_component(const std::vector<NodeId> &comp, int lo, int mid,
                                           int hi) {
        NodeSet comp_set = NodeSet::of(sub_.dag, comp);
        SubDag cg = induced_subgraph(sub_.dag, comp_set);

        TwoWayProblem problem;
        problem.size_weight = cfg_.size_weight;
        problem.crossing_weight = cfg_.crossing_weight;
        problem.left_threads = mid - lo;
        problem.right_threads = hi - mid + 1;
        for (NodeId local = 0; local < cg.dag.node_count(); ++local) {
            NodeId wv = cg.to_parent[local];
            for (std::size_t i = vin_off_[wv]; i < vin_off_[wv + 1]; ++i) {
                int t = vin_thread_[i];
                if (t >= lo && t < mid)
                    problem.vin_edges.push_back(VinEdge{1, local});
                else if (t >= mid && t <= hi)
                    problem.vin_edges.push_back(VinEdge{2, local});
                // Threads outside [lo,hi] always cross; their edges are dropped.
            }
        }

        SolverConfig scfg;
        scfg.exact_threshold = cfg_.exact_threshold;
        scfg.seed = mix_seed(cfg_.seed, solve_counter_++);
        scfg.move_budget = cfg_.move_budget;
        scfg.deadline = deadline_;

        std::vector<PartLabel> fine;
        const std::size_t cn = cg.dag.node_count();
        if (cfg_.coarsen_large && cn > cfg_.coarsen_above) {
            problem.graph = std::move(cg.dag);
            Coarsening co =
                cluster(problem.graph, CoarsenThresholds::for_graph(problem.graph.node_count()));
            TwoWayProblem coarse = coarsen_problem(problem, co);
            TwoWaySolution sol = solve(coarse, scfg);
            fine = project(co, sol.part);
        } else {
            problem.graph = std::move(cg.dag);
            fine = solve(problem, scfg).part;
        }

        // comp is sorted, so component-local ids line up with comp order.
        assert(cg.to_parent == comp);
        return fine;
    }

    /// Weakly connected components within `ids`, heaviest first, ties by
    /// smallest member. With component splitting disabled the whole set is
    /// treated as one piece.
    std::vector<std::vector<NodeId>> components(const std::vector<NodeId> &ids) {
        if (!cfg_.split_components)
            return {ids};

        ++stamp_base_;
        const std::uint32_t in_set = stamp_base_;
        for (NodeId v : ids)
            stamp_of_[v] = in_set;

        std::vector<std::vector<NodeId>> comps;
        std::vector<NodeId> queue;
        for (NodeId start : ids) {
            if (stamp_of_[start] != in_set)
                continue;
            std::vector<NodeId> comp;
            stamp_of_[start] = in_set + 1;
            queue.clear();
            queue.push_back(start);
            while (!queue.empty()) {
                NodeId u = queue.back();
                queue.pop_back();
                comp.push_back(u);
                for (NodeId v : sub_.dag.successors(u))
                    if (stamp_of_[v] == in_set) {
                        stamp_of_[v] = in_set + 1;
                        queue.push_back(v);
                    }
                for (NodeId v : sub_.dag.predecessors(u))
                    if (stamp_of_[v] == in_set) {
                        stamp_of_[v] = in_set + 1;
                        queue.push_back(v);
                    }
            }
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
        ++stamp_base_; // consume the "visited" stamp as well

        std::sort(comps.begin(), comps.end(),
                  [&](const std::vector<NodeId> &a, const std::vector<NodeId> &b) {
                      std::int64_t wa = 0, wb = 0;
                      for (NodeId v : a)
                          wa += sub_.dag.node_weight(v);
                      for (NodeId v : b)
                          wb += sub_.dag.node_weight(v);
                      if (wa != wb)
                          return wa > wb;
                      return a.front() < b.front();
                  });
        return comps;
    }

    const PartitionConfig &cfg_;
    Deadline deadline_;
    int thread_lo_;
    SubDag sub_;
    std::vector<std::size_t> vin_off_;
    std::vector<int> vin_thread_;
    std::vector<std::vector<NodeId>> out_;
    std::vector<NodeId> unallocated_;
    std::vector<std::uint32_t> stamp_of_;
    std::uint32_t stamp_base_ = 0;
    std::uint64_t solve_counter_ = 0;
};

} // namespace

void PartitionConfig::validate() const {
    if (threads < 1)
        throw Error("thread count must be >= 1");
    if (alpha < 1)
        throw Error("alpha must be >= 1");
    if (margin < 1.0)
        throw Error("margin must be >= 1");
    if (size_weight <= 0 || crossing_weight < 0)
        throw Error("objective weights must satisfy size_weight > 0, crossing_weight >= 0");
    if (move_budget < 0)
        throw Error("move_budget must be >= 0");
}

std::int64_t SuperLayer::total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), std::int64_t{0});
}

std::size_t SuperLayer::node_count() const {
    std::size_t n = 0;
    for (const auto &p : partitions)
        n += p.size();
    return n;
}

NodeSet select_window(const Dag &dag, const LayerAssignment &layers, const NodeSet &unmapped,
                      std::int64_t prev_layer_weight, int alpha) {
    assert(!unmapped.empty());
    const std::int64_t target = std::max<std::int64_t>(1, prev_layer_weight * alpha);

    std::vector<std::int64_t> layer_w(static_cast<std::size_t>(layers.num_layers), 0);
    std::int32_t lowest = layers.num_layers;
    for (NodeId v : unmapped.ids()) {
        layer_w[static_cast<std::size_t>(layers.layer[v])] += dag.node_weight(v);
        lowest = std::min(lowest, layers.layer[v]);
    }

    std::int32_t cutoff = layers.num_layers;
    std::int64_t acc = 0;
    for (std::int32_t l = lowest; l < layers.num_layers; ++l) {
        acc += layer_w[static_cast<std::size_t>(l)];
        if (acc >= target) {
            cutoff = l + 1;
            break;
        }
    }

    std::vector<NodeId> ids;
    for (NodeId v : unmapped.ids())
        if (layers.layer[v] < cutoff)
            ids.push_back(v);
    return NodeSet::of(dag, std::move(ids));
}

RecursiveParts recursive_partition(const Dag &dag, const NodeSet &window, int thread_lo,
                                   int thread_hi, const Placement &prior,
                                   const PartitionConfig &cfg, const Deadline &deadline) {
    assert(thread_lo <= thread_hi);
    assert(prior.thread.size() == dag.node_count());
    return RecursiveSplitter(dag, window, thread_lo, thread_hi, prior, cfg, deadline).result(dag);
}

BalanceResult balance_super_layer(const Dag &dag, const LayerAssignment &layers,
                                  const std::vector<NodeSet> &partitions, const Placement &prior,
                                  const PartitionConfig &cfg, const Deadline &deadline) {
    const int P = static_cast<int>(partitions.size());
    std::vector<std::vector<NodeId>> parts(partitions.size());
    std::vector<std::int64_t> weights(partitions.size(), 0);
    for (int t = 0; t < P; ++t) {
        parts[t] = ordered_list(layers, {partitions[t].ids().begin(), partitions[t].ids().end()});
        weights[t] = partitions[t].total_weight();
    }
    std::vector<NodeId> returned;

    // Merge-and-resplit rounds: largest with smallest, kept only while the
    // smallest partition strictly grows.
    std::uint64_t round = 0;
    while (P >= 2) {
        if (deadline.expired())
            throw PartitionTimeout();
        int imax = 0, imin = 0;
        for (int t = 1; t < P; ++t) {
            if (weights[t] > weights[imax])
                imax = t;
            if (weights[t] < weights[imin])
                imin = t;
        }
        if (imax == imin || weights[imax] == weights[imin])
            break;

        std::vector<NodeId> merged = parts[imax];
        merged.insert(merged.end(), parts[imin].begin(), parts[imin].end());
        NodeSet merged_set = NodeSet::of(dag, std::move(merged));
        SubDag sg = induced_subgraph(dag, merged_set);

        TwoWayProblem problem;
        problem.size_weight = cfg.size_weight;
        problem.crossing_weight = cfg.crossing_weight;
        for (NodeId local = 0; local < sg.dag.node_count(); ++local)
            for (NodeId p : dag.predecessors(sg.to_parent[local])) {
                if (prior.thread[p] == imax)
                    problem.vin_edges.push_back(VinEdge{1, local});
                else if (prior.thread[p] == imin)
                    problem.vin_edges.push_back(VinEdge{2, local});
            }
        problem.graph = std::move(sg.dag);

        SolverConfig scfg;
        scfg.exact_threshold = cfg.exact_threshold;
        scfg.seed = mix_seed(cfg.seed, 0xba1a5ce + round++);
        scfg.move_budget = cfg.move_budget;
        scfg.deadline = deadline;
        TwoWaySolution sol = solve(problem, scfg);

        if (std::min(sol.part1_size, sol.part2_size) <= weights[imin])
            break;

        std::vector<NodeId> to_max, to_min;
        for (NodeId local = 0; local < sol.part.size(); ++local) {
            NodeId v = sg.to_parent[local];
            if (sol.part[local] == 1)
                to_max.push_back(v);
            else if (sol.part[local] == 2)
                to_min.push_back(v);
            else
                returned.push_back(v);
        }
        parts[imax] = ordered_list(layers, std::move(to_max));
        parts[imin] = ordered_list(layers, std::move(to_min));
        weights[imax] = sol.part1_size;
        weights[imin] = sol.part2_size;
    }

    // Truncation: partitions above margin * smallest shed their latest
    // nodes. Never drop below the reference smallest and never empty a
    // partition, so the layer keeps max <= margin * min + max node weight.
    std::int64_t smallest = 0;
    for (int t = 0; t < P; ++t)
        if (weights[t] > 0 && (smallest == 0 || weights[t] < smallest))
            smallest = weights[t];
    if (smallest > 0) {
        const double bound = cfg.margin * static_cast<double>(smallest);
        for (int t = 0; t < P; ++t) {
            while (static_cast<double>(weights[t]) > bound && parts[t].size() > 1) {
                std::int64_t w = dag.node_weight(parts[t].back());
                if (weights[t] - w < smallest)
                    break;
                returned.push_back(parts[t].back());
                parts[t].pop_back();
                weights[t] -= w;
            }
        }
    }

    BalanceResult out;
    out.layer.partitions = std::move(parts);
    out.layer.weights = std::move(weights);
    out.returned = NodeSet::of(dag, std::move(returned));
    return out;
}

Schedule build_schedule(const Dag &dag, const PartitionConfig &cfg) {
    cfg.validate();
    const std::size_t n = dag.node_count();
    const Deadline deadline =
        cfg.time_budget ? Deadline::after(*cfg.time_budget) : Deadline{};

    Schedule s;
    s.threads = cfg.threads;
    s.graph_fingerprint = dag.fingerprint();
    s.placement.assign(n, NodePlace{});
    if (n == 0)
        return s;

    const LayerAssignment layers = alap_layers(dag);
    const std::int32_t num_layers = layers.num_layers;

    // Per-layer buckets of not-yet-mapped nodes, compacted lazily.
    std::vector<std::vector<NodeId>> bucket(static_cast<std::size_t>(num_layers));
    for (NodeId v = 0; v < n; ++v)
        bucket[static_cast<std::size_t>(layers.layer[v])].push_back(v);

    std::vector<bool> mapped(n, false);
    std::vector<std::uint32_t> in_layer(n, 0);
    std::vector<std::int32_t> part_of(n, -1);
    std::uint32_t layer_stamp = 0;
    Placement prior(n);
    std::size_t mapped_count = 0;
    std::int32_t lowest = 0;
    std::int64_t prev_weight =
        std::max<std::int64_t>(1, cfg.threads * dag.total_weight() / num_layers);

    auto compact = [&](std::int32_t l) -> std::int64_t {
        auto &b = bucket[static_cast<std::size_t>(l)];
        std::size_t keep = 0;
        std::int64_t w = 0;
        for (NodeId v : b)
            if (!mapped[v]) {
                b[keep++] = v;
                w += dag.node_weight(v);
            }
        b.resize(keep);
        return w;
    };

    while (mapped_count < n) {
        if (deadline.expired())
            throw PartitionTimeout();

        while (lowest < num_layers && compact(lowest) == 0)
            ++lowest;
        assert(lowest < num_layers);
        const std::int32_t window_base = lowest;

        // Same rule as select_window, evaluated over the layer buckets.
        const std::int64_t target = std::max<std::int64_t>(1, prev_weight * cfg.alpha);
        std::vector<NodeId> window_ids;
        std::int64_t acc = 0;
        for (std::int32_t l = lowest; l < num_layers; ++l) {
            acc += compact(l);
            const auto &b = bucket[static_cast<std::size_t>(l)];
            window_ids.insert(window_ids.end(), b.begin(), b.end());
            if (cfg.limit_layers && acc >= target)
                break;
        }
        NodeSet window = NodeSet::of(dag, std::move(window_ids));

        RecursiveParts m1 =
            recursive_partition(dag, window, 0, cfg.threads - 1, prior, cfg, deadline);
        BalanceResult m2 =
            balance_super_layer(dag, layers, m1.per_thread, prior, cfg, deadline);
        SuperLayer layer = std::move(m2.layer);

        // Completion pass: a window node that fell out of the layer has no
        // successor inside it (unallocation propagates downstream), so it
        // can rejoin whenever its predecessors are already placed - freely
        // when they all sit in earlier layers, pinned to their partition
        // when some are in this one. Placement is greedy by (layer, id)
        // with the balance bound as a guard. Nodes of the lowest unmapped
        // layer are always free, so that layer is fully absorbed and the
        // super-layer count stays within the ALAP layer count.
        {
            ++layer_stamp;
            for (std::size_t t = 0; t < layer.partitions.size(); ++t)
                for (NodeId v : layer.partitions[t]) {
                    in_layer[v] = layer_stamp;
                    part_of[v] = static_cast<std::int32_t>(t);
                }

            std::vector<NodeId> pool(window.ids().begin(), window.ids().end());
            std::sort(pool.begin(), pool.end(), [&](NodeId a, NodeId b) {
                return order_key(layers, a) < order_key(layers, b);
            });
            std::int64_t max_node_w = 1; // over current layer members only
            for (const auto &p : layer.partitions)
                for (NodeId v : p)
                    max_node_w = std::max(max_node_w, dag.node_weight(v));
            std::vector<std::vector<NodeId>> added(layer.partitions.size());

            // Balance guard: adding u to partition t must keep
            // max <= margin * min + max node weight whenever it would leave
            // every partition nonempty (the invariant is vacuous otherwise).
            auto guard_ok = [&](int t, NodeId u) {
                std::int64_t w_new =
                    layer.weights[static_cast<std::size_t>(t)] + dag.node_weight(u);
                std::int64_t max_w = w_new, min_w = 0;
                for (int q = 0; q < cfg.threads; ++q) {
                    std::int64_t w = q == t ? w_new : layer.weights[static_cast<std::size_t>(q)];
                    if (w == 0)
                        return true;
                    max_w = std::max(max_w, w);
                    min_w = min_w == 0 ? w : std::min(min_w, w);
                }
                return static_cast<double>(max_w) <=
                       cfg.margin * static_cast<double>(min_w) +
                           static_cast<double>(std::max(max_node_w, dag.node_weight(u)));
            };
            auto place = [&](int t, NodeId u) {
                added[static_cast<std::size_t>(t)].push_back(u);
                layer.weights[static_cast<std::size_t>(t)] += dag.node_weight(u);
                max_node_w = std::max(max_node_w, dag.node_weight(u));
                in_layer[u] = layer_stamp;
                part_of[u] = t;
            };

            for (NodeId u : pool) {
                if (in_layer[u] == layer_stamp)
                    continue;
                std::int32_t pinned = -1;
                bool eligible = true;
                for (NodeId p : dag.predecessors(u)) {
                    if (prior.thread[p] >= 0)
                        continue; // already in an earlier super layer
                    if (in_layer[p] == layer_stamp && (pinned < 0 || pinned == part_of[p])) {
                        pinned = part_of[p];
                        continue;
                    }
                    eligible = false;
                    break;
                }
                if (!eligible)
                    continue;

                if (pinned >= 0) {
                    if (guard_ok(pinned, u))
                        place(pinned, u);
                    continue;
                }
                int lightest = 0, lightest_nonempty = -1;
                for (int t = 0; t < cfg.threads; ++t) {
                    if (layer.weights[t] < layer.weights[lightest])
                        lightest = t;
                    if (layer.weights[t] > 0 &&
                        (lightest_nonempty < 0 ||
                         layer.weights[t] < layer.weights[lightest_nonempty]))
                        lightest_nonempty = t;
                }
                if (guard_ok(lightest, u))
                    place(lightest, u);
                else if (lightest_nonempty >= 0)
                    // Filling the last empty partition would break the
                    // balance bound; keeping it empty leaves the bound
                    // vacuous for this layer.
                    place(lightest_nonempty, u);
            }

            // Splice the additions in, keeping each partition sorted by
            // (layer, id). The pool is processed in that order already.
            for (std::size_t t = 0; t < layer.partitions.size(); ++t) {
                if (added[t].empty())
                    continue;
                auto &list = layer.partitions[t];
                std::size_t old_len = list.size();
                list.insert(list.end(), added[t].begin(), added[t].end());
                std::inplace_merge(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(old_len),
                                   list.end(), [&](NodeId a, NodeId b) {
                                       return order_key(layers, a) < order_key(layers, b);
                                   });
            }
        }

        const std::size_t before = mapped_count;
        const auto layer_idx = static_cast<std::int32_t>(s.layers.size());
        for (int t = 0; t < cfg.threads; ++t) {
            const auto &list = layer.partitions[static_cast<std::size_t>(t)];
            for (std::size_t pos = 0; pos < list.size(); ++pos) {
                NodeId v = list[pos];
                if (mapped[v])
                    throw InternalInvariantViolation("node mapped twice");
                mapped[v] = true;
                ++mapped_count;
                prior.thread[v] = t;
                s.placement[v] =
                    NodePlace{layer_idx, t, static_cast<std::int32_t>(pos)};
            }
        }
        if (mapped_count == before)
            throw InternalInvariantViolation("super layer mapped no nodes");
        if (compact(window_base) != 0)
            throw InternalInvariantViolation("lowest unmapped layer not fully absorbed");

        prev_weight = std::max<std::int64_t>(1, layer.total_weight());
        s.layers.push_back(std::move(layer));
    }

    if (s.layers.size() > static_cast<std::size_t>(num_layers))
        throw InternalInvariantViolation("more super layers than ALAP layers");

    ValidationReport report = validate_schedule(dag, s);
    if (!report.ok())
        throw InternalInvariantViolation(report.violations.front());
    return s;
}

ValidationReport validate_schedule(const Dag &dag, const Schedule &schedule) {
    ValidationReport r;
    const std::size_t n = dag.node_count();
    r.barrier_count = schedule.layers.empty() ? 0 : static_cast<int>(schedule.layers.size()) - 1;

    auto complain = [&](const std::string &what) {
        if (r.violations.size() < 64)
            r.violations.push_back(what);
    };

    if (schedule.graph_fingerprint != dag.fingerprint())
        complain("schedule fingerprint does not match the graph");
    if (schedule.threads < 1)
        complain("schedule has no threads");

    std::vector<NodePlace> place(n);
    std::size_t seen = 0;
    for (std::size_t li = 0; li < schedule.layers.size(); ++li) {
        const SuperLayer &layer = schedule.layers[li];
        if (layer.partitions.size() != static_cast<std::size_t>(schedule.threads)) {
            complain("layer " + std::to_string(li) + " does not have P partitions");
            continue;
        }
        std::vector<std::int64_t> lw(layer.partitions.size(), 0);
        for (std::size_t t = 0; t < layer.partitions.size(); ++t) {
            for (std::size_t pos = 0; pos < layer.partitions[t].size(); ++pos) {
                NodeId v = layer.partitions[t][pos];
                if (v >= n) {
                    complain("node id " + std::to_string(v) + " out of range");
                    continue;
                }
                if (place[v].layer >= 0) {
                    complain("node " + std::to_string(v) + " appears more than once");
                    continue;
                }
                place[v] = NodePlace{static_cast<std::int32_t>(li), static_cast<std::int32_t>(t),
                                     static_cast<std::int32_t>(pos)};
                lw[t] += dag.node_weight(v);
                ++seen;
            }
            if (layer.weights.size() == layer.partitions.size() && lw[t] != layer.weights[t])
                complain("layer " + std::to_string(li) + " thread " + std::to_string(t) +
                         " recorded weight differs from node weights");
        }
        r.layer_weights.push_back(std::move(lw));
    }

    if (seen != n)
        complain("schedule covers " + std::to_string(seen) + " of " + std::to_string(n) +
                 " nodes");
    if (!schedule.placement.empty()) {
        if (schedule.placement.size() != n)
            complain("placement table size mismatch");
        else
            for (NodeId v = 0; v < n; ++v)
                if (schedule.placement[v].layer != place[v].layer ||
                    schedule.placement[v].thread != place[v].thread) {
                    complain("placement table disagrees with layer lists at node " +
                             std::to_string(v));
                    break;
                }
    }

    for (NodeId u = 0; u < n; ++u) {
        if (place[u].layer < 0)
            continue;
        for (NodeId v : dag.successors(u)) {
            if (place[v].layer < 0)
                continue;
            if (place[u].layer > place[v].layer)
                complain("edge (" + std::to_string(u) + "," + std::to_string(v) +
                         ") goes to an earlier super layer");
            else if (place[u].layer == place[v].layer) {
                if (place[u].thread != place[v].thread)
                    complain("edge (" + std::to_string(u) + "," + std::to_string(v) +
                             ") crosses partitions inside a super layer");
                else if (place[u].pos >= place[v].pos)
                    complain("edge (" + std::to_string(u) + "," + std::to_string(v) +
                             ") violates intra-partition order");
            }
            if (place[u].thread != place[v].thread)
                ++r.crossing_edges;
        }
    }
    return r;
}

} // namespace graphopt
