#include "graphopt/partition_model.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <numeric>
#include <random>

#include "graphopt/errors.hpp"

namespace graphopt {

namespace {

struct ScoreTuple {
    std::int64_t objective;
    std::int64_t allocated;
    friend auto operator<=>(const ScoreTuple &, const ScoreTuple &) = default;
};

/// Per-destination view of the vin edges (CSR over dst).
struct VinIndex {
    std::vector<std::size_t> off;
    std::vector<PartLabel> tag;

    explicit VinIndex(const TwoWayProblem &p) {
        const std::size_t n = p.graph.node_count();
        off.assign(n + 1, 0);
        for (const VinEdge &e : p.vin_edges)
            ++off[e.dst + 1];
        for (std::size_t i = 0; i < n; ++i)
            off[i + 1] += off[i];
        tag.resize(p.vin_edges.size());
        std::vector<std::size_t> cursor(off.begin(), off.end() - 1);
        for (const VinEdge &e : p.vin_edges)
            tag[cursor[e.dst]++] = e.source_part;
    }

    std::span<const PartLabel> tags(NodeId v) const {
        return {tag.data() + off[v], off[v + 1] - off[v]};
    }
};

inline bool crosses(PartLabel label, PartLabel tag) { return label != 0 && label != tag; }

std::int64_t objective_of(const TwoWayProblem &p, std::int64_t s1, std::int64_t s2,
                          std::int64_t crossings) {
    return p.size_weight * std::min(s1, s2) - p.crossing_weight * crossings;
}

TwoWaySolution scored_solution(const TwoWayProblem &p, std::vector<PartLabel> part) {
    EvalResult r = evaluate(p, part);
    assert(std::holds_alternative<TwoWaySolution>(r));
    return std::get<TwoWaySolution>(std::move(r));
}

// ---------------------------------------------------------------------------
// Exact branch and bound.
//
// Nodes are assigned in id order with labels tried as 0,1,2, so complete
// assignments are reached in lexicographic order of the part vector and the
// first incumbent with a given (objective, allocated) score is automatically
// the lexicographically smallest one. A subtree is cut only when its score
// upper bound falls strictly below the best known score, which keeps that
// tie-break sound.
// ---------------------------------------------------------------------------
class ExactSearch {
  public:
    ExactSearch(const TwoWayProblem &p, const Deadline &deadline)
        : p_(p), vin_(p), deadline_(deadline), n_(p.graph.node_count()) {
        part_.assign(n_, 0);
        remaining_ = p.graph.total_weight();
    }

    TwoWaySolution run() {
        std::vector<PartLabel> seed = grow_seed(p_);
        TwoWaySolution seeded = scored_solution(p_, seed);
        bound_ = ScoreTuple{seeded.objective, seeded.part1_size + seeded.part2_size};

        descend(0);

        assert(!best_part_.empty() || n_ == 0);
        if (best_part_.empty())
            best_part_.assign(n_, 0);
        return scored_solution(p_, std::move(best_part_));
    }

  private:
    void descend(NodeId v) {
        if (v == n_) {
            ScoreTuple t{objective_of(p_, s1_, s2_, crossings_), s1_ + s2_};
            if (!have_best_ || t > best_) {
                have_best_ = true;
                best_ = t;
                best_part_ = part_;
                bound_ = std::max(bound_, t);
            }
            return;
        }
        if (((++steps_) & 0x1fff) == 0 && deadline_.expired())
            throw PartitionTimeout();

        const std::int64_t w = p_.graph.node_weight(v);
        for (PartLabel label : {PartLabel{0}, PartLabel{1}, PartLabel{2}}) {
            if (!feasible_here(v, label))
                continue;

            std::int64_t cross_delta = 0;
            for (PartLabel tag : vin_.tags(v))
                cross_delta += crosses(label, tag) ? 1 : 0;

            part_[v] = label;
            remaining_ -= w;
            if (label == 1)
                s1_ += w;
            else if (label == 2)
                s2_ += w;
            crossings_ += cross_delta;

            if (upper_bound() >= bound_)
                descend(v + 1);

            crossings_ -= cross_delta;
            if (label == 1)
                s1_ -= w;
            else if (label == 2)
                s2_ -= w;
            remaining_ += w;
            part_[v] = 0;
        }
    }

    // Neighbors with smaller ids are already assigned; later edges are
    // checked when their other endpoint gets its label.
    bool feasible_here(NodeId v, PartLabel label) const {
        if (label != 0) {
            for (NodeId u : p_.graph.predecessors(v))
                if (u < v && part_[u] != label)
                    return false;
        }
        for (NodeId w : p_.graph.successors(v))
            if (w < v && part_[w] != 0 && part_[w] != label)
                return false;
        return true;
    }

    // Admissible: remaining weight can at best fill the smaller side, and
    // unassigned destinations can still avoid every future crossing.
    ScoreTuple upper_bound() const {
        std::int64_t best_min =
            std::min(std::min(s1_, s2_) + remaining_, (s1_ + s2_ + remaining_) / 2);
        return ScoreTuple{p_.size_weight * best_min - p_.crossing_weight * crossings_,
                          s1_ + s2_ + remaining_};
    }

    const TwoWayProblem &p_;
    VinIndex vin_;
    Deadline deadline_;
    NodeId n_;
    std::vector<PartLabel> part_;
    std::int64_t s1_ = 0, s2_ = 0, crossings_ = 0, remaining_ = 0;
    std::uint64_t steps_ = 0;

    ScoreTuple bound_{std::numeric_limits<std::int64_t>::min(), 0};
    ScoreTuple best_{};
    bool have_best_ = false;
    std::vector<PartLabel> best_part_;
};

// ---------------------------------------------------------------------------
// Hill climbing.
// ---------------------------------------------------------------------------
class LocalSearch {
  public:
    LocalSearch(const TwoWayProblem &p, const Deadline &deadline, int move_budget)
        : p_(p), vin_(p), deadline_(deadline), n_(p.graph.node_count()),
          moves_left_(move_budget) {}

    TwoWaySolution run(std::uint64_t shuffle_seed, std::vector<PartLabel> start) {
        part_ = std::move(start);
        s1_ = s2_ = crossings_ = 0;
        for (NodeId v = 0; v < n_; ++v) {
            if (part_[v] == 1)
                s1_ += p_.graph.node_weight(v);
            else if (part_[v] == 2)
                s2_ += p_.graph.node_weight(v);
            for (PartLabel tag : vin_.tags(v))
                crossings_ += crosses(part_[v], tag) ? 1 : 0;
        }

        order_.resize(n_);
        std::iota(order_.begin(), order_.end(), 0u);
        std::mt19937_64 rng(shuffle_seed);
        for (std::size_t i = n_; i > 1; --i)
            std::swap(order_[i - 1], order_[rng() % i]);

        group_stamp_.assign(n_, 0);
        while (moves_left_ > 0) {
            if (deadline_.expired())
                break; // keep the best feasible state found so far
            if (single_sweep())
                continue;
            if (group_sweep())
                continue;
            if (try_global_swap())
                continue;
            break;
        }
        return scored_solution(p_, std::move(part_));
    }

  private:
    std::int64_t objective() const { return objective_of(p_, s1_, s2_, crossings_); }

    // Moves are accepted on the same lexicographic score the exact solver
    // optimizes: objective first, then allocated weight. The second term
    // lets the frontier keep growing on the heavier side, where min(s1,s2)
    // alone sees no gain.
    bool better(std::int64_t s1, std::int64_t s2, std::int64_t cross) const {
        ScoreTuple cand{objective_of(p_, s1, s2, cross), s1 + s2};
        ScoreTuple cur{objective(), s1_ + s2_};
        return cand > cur;
    }

    bool single_sweep() {
        bool any = false;
        for (NodeId v : order_) {
            if (moves_left_ <= 0)
                return any;
            for (PartLabel to : {PartLabel{0}, PartLabel{1}, PartLabel{2}}) {
                if (to == part_[v])
                    continue;
                if (try_single(v, to)) {
                    any = true;
                    break;
                }
            }
        }
        return any;
    }

    bool try_single(NodeId v, PartLabel to) {
        const PartLabel from = part_[v];
        if (to != 0) {
            for (NodeId u : p_.graph.predecessors(v))
                if (part_[u] != to)
                    return false;
        }
        for (NodeId w : p_.graph.successors(v))
            if (to == 0 ? part_[w] != 0 : (part_[w] != 0 && part_[w] != to))
                return false;

        const std::int64_t w = p_.graph.node_weight(v);
        std::int64_t s1 = s1_ - (from == 1 ? w : 0) + (to == 1 ? w : 0);
        std::int64_t s2 = s2_ - (from == 2 ? w : 0) + (to == 2 ? w : 0);
        std::int64_t cross = crossings_;
        for (PartLabel tag : vin_.tags(v))
            cross += (crosses(to, tag) ? 1 : 0) - (crosses(from, tag) ? 1 : 0);
        if (!better(s1, s2, cross))
            return false;

        part_[v] = to;
        s1_ = s1;
        s2_ = s2;
        crossings_ = cross;
        --moves_left_;
        return true;
    }

    // Same-label cones around a node. Descendant cones can always drop to 0
    // (a labeled successor of a member is itself a member); relabeling to
    // the other side additionally needs every member predecessor inside the
    // cone. Ancestor cones are the mirror case.
    bool group_sweep() {
        bool any = false;
        for (NodeId v : order_) {
            if (moves_left_ <= 0)
                return any;
            if (part_[v] == 0)
                continue;
            if (try_cone(v, /*descendants=*/true))
                any = true;
            else if (try_cone(v, /*descendants=*/false))
                any = true;
        }
        return any;
    }

    bool try_cone(NodeId v, bool descendants) {
        constexpr std::size_t kConeCap = 256;
        const PartLabel from = part_[v];
        const PartLabel other = static_cast<PartLabel>(3 - from);

        ++stamp_;
        members_.clear();
        members_.push_back(v);
        group_stamp_[v] = stamp_;
        for (std::size_t i = 0; i < members_.size(); ++i) {
            NodeId u = members_[i];
            auto grow = descendants ? p_.graph.successors(u) : p_.graph.predecessors(u);
            for (NodeId w : grow) {
                if (part_[w] == from && group_stamp_[w] != stamp_) {
                    if (members_.size() >= kConeCap)
                        return false;
                    group_stamp_[w] = stamp_;
                    members_.push_back(w);
                }
            }
        }

        bool preds_inside = true;
        bool labeled_succ_outside = false;
        std::int64_t group_w = 0;
        std::int64_t cross_now = 0, cross_zero = 0, cross_other = 0;
        for (NodeId m : members_) {
            group_w += p_.graph.node_weight(m);
            for (NodeId u : p_.graph.predecessors(m))
                if (group_stamp_[u] != stamp_)
                    preds_inside = false;
            for (NodeId w : p_.graph.successors(m))
                if (group_stamp_[w] != stamp_ && part_[w] == from)
                    labeled_succ_outside = true;
            for (PartLabel tag : vin_.tags(m)) {
                cross_now += crosses(from, tag) ? 1 : 0;
                cross_other += crosses(other, tag) ? 1 : 0;
            }
        }
        (void)cross_zero; // label 0 never crosses

        if (labeled_succ_outside)
            return false; // every move below would break an outgoing edge

        auto sized = [&](PartLabel to) {
            std::int64_t s1 = s1_ - (from == 1 ? group_w : 0) + (to == 1 ? group_w : 0);
            std::int64_t s2 = s2_ - (from == 2 ? group_w : 0) + (to == 2 ? group_w : 0);
            return std::pair(s1, s2);
        };

        // Move to the other side first (keeps nodes allocated), then to 0.
        if (preds_inside) {
            auto [s1, s2] = sized(other);
            if (better(s1, s2, crossings_ - cross_now + cross_other))
                return apply_cone(other, s1, s2, crossings_ - cross_now + cross_other);
        }
        {
            auto [s1, s2] = sized(0);
            if (better(s1, s2, crossings_ - cross_now))
                return apply_cone(0, s1, s2, crossings_ - cross_now);
        }
        return false;
    }

    bool apply_cone(PartLabel to, std::int64_t s1, std::int64_t s2, std::int64_t cross) {
        for (NodeId m : members_)
            part_[m] = to;
        s1_ = s1;
        s2_ = s2;
        crossings_ = cross;
        --moves_left_;
        return true;
    }

    // Relabeling every 1 as 2 and vice versa is always feasible and flips
    // which vin tags cross; it escapes seeds that grew on the wrong sides.
    bool try_global_swap() {
        std::int64_t cross = 0;
        for (NodeId v = 0; v < n_; ++v) {
            PartLabel flipped = part_[v] == 0 ? 0 : static_cast<PartLabel>(3 - part_[v]);
            for (PartLabel tag : vin_.tags(v))
                cross += crosses(flipped, tag) ? 1 : 0;
        }
        if (objective_of(p_, s2_, s1_, cross) <= objective())
            return false;
        for (NodeId v = 0; v < n_; ++v)
            if (part_[v] != 0)
                part_[v] = static_cast<PartLabel>(3 - part_[v]);
        std::swap(s1_, s2_);
        crossings_ = cross;
        --moves_left_;
        return true;
    }

    const TwoWayProblem &p_;
    VinIndex vin_;
    Deadline deadline_;
    NodeId n_;
    int moves_left_;
    std::vector<PartLabel> part_;
    std::vector<NodeId> order_;
    std::vector<NodeId> members_;
    std::vector<std::uint32_t> group_stamp_;
    std::uint32_t stamp_ = 0;
    std::int64_t s1_ = 0, s2_ = 0, crossings_ = 0;
};

} // namespace

void TwoWayProblem::validate() const {
    const std::size_t n = graph.node_count();
    for (const VinEdge &e : vin_edges) {
        if (e.dst >= n)
            throw Error("vin edge destination " + std::to_string(e.dst) + " out of range");
        if (e.source_part != 1 && e.source_part != 2)
            throw Error("vin edge source tag must be 1 or 2");
    }
    if (size_weight <= 0)
        throw Error("size_weight must be positive");
    if (crossing_weight < 0)
        throw Error("crossing_weight must be non-negative");
    if (left_threads < 1 || right_threads < 1)
        throw Error("both thread groups must be non-empty");
}

EvalResult evaluate(const TwoWayProblem &problem, std::span<const PartLabel> part) {
    const std::size_t n = problem.graph.node_count();
    if (part.size() != n)
        throw Error("part vector size does not match node count");

    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : problem.graph.successors(u))
            if (part[v] != 0 && part[v] != part[u])
                return InfeasibleEdge{u, v};

    TwoWaySolution s;
    s.part.assign(part.begin(), part.end());
    for (NodeId v = 0; v < n; ++v) {
        if (part[v] == 1)
            s.part1_size += problem.graph.node_weight(v);
        else if (part[v] == 2)
            s.part2_size += problem.graph.node_weight(v);
    }
    for (const VinEdge &e : problem.vin_edges)
        s.crossings += crosses(part[e.dst], e.source_part) ? 1 : 0;
    s.objective = objective_of(problem, s.part1_size, s.part2_size, s.crossings);
    return s;
}

bool is_feasible(const EvalResult &r) { return std::holds_alternative<TwoWaySolution>(r); }

std::vector<PartLabel> grow_seed(const TwoWayProblem &problem) {
    const Dag &g = problem.graph;
    const std::size_t n = g.node_count();
    const VinIndex vin(problem);
    std::vector<PartLabel> part(n, 0);
    std::int64_t s1 = 0, s2 = 0;
    for (NodeId v : topological_order(g)) {
        bool can1 = true, can2 = true;
        for (NodeId u : g.predecessors(v)) {
            can1 = can1 && part[u] == 1;
            can2 = can2 && part[u] == 2;
        }
        PartLabel pick = 0;
        if (can1 && can2) {
            // Only sources reach here: follow the side their external
            // producers live on while that side still has room, otherwise
            // the lighter side.
            std::int64_t tag_bias = 0;
            for (PartLabel tag : vin.tags(v))
                tag_bias += tag == 1 ? 1 : -1;
            if (tag_bias != 0) {
                pick = tag_bias > 0 ? 1 : 2;
                if ((pick == 1 ? s1 : s2) > g.total_weight() / 2)
                    pick = s1 <= s2 ? 1 : 2;
            } else {
                pick = s1 <= s2 ? 1 : 2;
            }
        } else if (can1) {
            pick = 1;
        } else if (can2) {
            pick = 2;
        }
        part[v] = pick;
        if (pick == 1)
            s1 += g.node_weight(v);
        else if (pick == 2)
            s2 += g.node_weight(v);
    }
    return part;
}

TwoWaySolution solve_exact(const TwoWayProblem &problem, std::size_t node_budget,
                           const Deadline &deadline) {
    problem.validate();
    if (problem.graph.node_count() > node_budget)
        throw TooLarge(problem.graph.node_count(), node_budget);
    return ExactSearch(problem, deadline).run();
}

namespace {

/// grow_seed with randomized side picks where both sides are open.
std::vector<PartLabel> grow_seed_randomized(const TwoWayProblem &problem, std::mt19937_64 &rng) {
    const Dag &g = problem.graph;
    std::vector<PartLabel> part(g.node_count(), 0);
    for (NodeId v : topological_order(g)) {
        bool can1 = true, can2 = true;
        for (NodeId u : g.predecessors(v)) {
            can1 = can1 && part[u] == 1;
            can2 = can2 && part[u] == 2;
        }
        if (can1 && can2)
            part[v] = static_cast<PartLabel>(1 + (rng() & 1));
        else if (can1)
            part[v] = 1;
        else if (can2)
            part[v] = 2;
    }
    return part;
}

} // namespace

TwoWaySolution solve_heuristic(const TwoWayProblem &problem, std::uint64_t seed, int move_budget,
                               const Deadline &deadline) {
    problem.validate();
    const std::size_t n = problem.graph.node_count();
    if (n == 0)
        return scored_solution(problem, {});
    if (move_budget <= 0)
        move_budget = static_cast<int>(std::min<std::size_t>(10 * n + 10000, 1u << 30));

    // Small instances are cheap: restart from a few diversified seeds. The
    // first start always uses the plain grow seed, so the result can never
    // score below it.
    const int starts = n <= 256 ? 4 : 1;
    std::mt19937_64 seed_rng(seed ^ 0xd1b54a32d192ed03ull);
    TwoWaySolution best;
    for (int i = 0; i < starts; ++i) {
        std::vector<PartLabel> start =
            i == 0 ? grow_seed(problem) : grow_seed_randomized(problem, seed_rng);
        TwoWaySolution cand = LocalSearch(problem, deadline, move_budget)
                                  .run(seed + 0x9e3779b97f4a7c15ull * i, std::move(start));
        if (i == 0 || cand.objective > best.objective ||
            (cand.objective == best.objective &&
             cand.part1_size + cand.part2_size > best.part1_size + best.part2_size))
            best = std::move(cand);
        if (deadline.expired())
            break;
    }
    return best;
}

TwoWaySolution solve(const TwoWayProblem &problem, const SolverConfig &cfg) {
    const std::size_t n = problem.graph.node_count();
    TwoWaySolution s;
    if (n <= cfg.exact_threshold)
        s = solve_exact(problem, std::max<std::size_t>(cfg.exact_threshold, 24), cfg.deadline);
    else
        s = solve_heuristic(problem, cfg.seed, cfg.move_budget, cfg.deadline);

    if (n > 0 && s.part1_size + s.part2_size == 0) {
        // Nothing allocated: place the minimal-id source in partition 1 so
        // every super-layer iteration maps at least one node.
        std::vector<PartLabel> part(n, 0);
        for (NodeId v = 0; v < n; ++v) {
            if (problem.graph.in_degree(v) == 0) {
                part[v] = 1;
                break;
            }
        }
        s = scored_solution(problem, std::move(part));
    }
    return s;
}

} // namespace graphopt
