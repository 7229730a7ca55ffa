#include "graphopt/dag.hpp"

#include <algorithm>
#include <cassert>
#include <queue>

#include "graphopt/errors.hpp"

namespace graphopt {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ull;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

void fnv_mix(std::uint64_t &h, std::uint64_t value) {
    for (int i = 0; i < 8; ++i) {
        h ^= (value >> (8 * i)) & 0xff;
        h *= kFnvPrime;
    }
}

} // namespace

void Dag::finish_build() {
    const std::size_t n = node_w_.size();

    // Derive predecessor CSR from successors.
    pred_off_.assign(n + 1, 0);
    for (NodeId v : succ_adj_)
        ++pred_off_[v + 1];
    for (std::size_t i = 0; i < n; ++i)
        pred_off_[i + 1] += pred_off_[i];
    pred_adj_.resize(succ_adj_.size());
    std::vector<std::size_t> cursor(pred_off_.begin(), pred_off_.end() - 1);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : successors(u))
            pred_adj_[cursor[v]++] = u;
    // Filling in ascending u keeps each predecessor list sorted.

    total_w_ = 0;
    for (std::int64_t w : node_w_)
        total_w_ += w;

    std::uint64_t h = kFnvOffset;
    fnv_mix(h, n);
    for (NodeId v = 0; v < n; ++v) {
        fnv_mix(h, static_cast<std::uint64_t>(node_w_[v]));
        auto succ = successors(v);
        fnv_mix(h, succ.size());
        for (NodeId s : succ)
            fnv_mix(h, s);
    }
    fingerprint_ = h;
}

Dag Dag::from_sorted_csr(std::vector<std::size_t> succ_off, std::vector<NodeId> succ_adj,
                         std::vector<std::int64_t> node_weights) {
    Dag d;
    d.succ_off_ = std::move(succ_off);
    d.succ_adj_ = std::move(succ_adj);
    d.node_w_ = std::move(node_weights);
    assert(d.succ_off_.size() == d.node_w_.size() + 1);
    d.finish_build();
    return d;
}

Dag build_dag(std::span<const Edge> edges, std::span<const std::int64_t> node_weights,
              std::vector<std::int64_t> ext_labels) {
    const std::size_t n = node_weights.size();
    for (std::size_t v = 0; v < n; ++v)
        if (node_weights[v] < 1)
            throw Error("node " + std::to_string(v) + " has non-positive weight " +
                        std::to_string(node_weights[v]));
    if (!ext_labels.empty() && ext_labels.size() != n)
        throw Error("ext_labels size does not match node count");

    for (const Edge &e : edges) {
        if (e.src >= n || e.dst >= n)
            throw BadEdge(e.src, e.dst, "node id out of range");
        if (e.src == e.dst)
            throw BadEdge(e.src, e.dst, "self-loop");
    }

    Dag d;
    d.node_w_.assign(node_weights.begin(), node_weights.end());
    d.ext_label_ = std::move(ext_labels);
    d.succ_off_.assign(n + 1, 0);
    for (const Edge &e : edges)
        ++d.succ_off_[e.src + 1];
    for (std::size_t i = 0; i < n; ++i)
        d.succ_off_[i + 1] += d.succ_off_[i];
    d.succ_adj_.resize(edges.size());
    std::vector<std::size_t> cursor(d.succ_off_.begin(), d.succ_off_.end() - 1);
    for (const Edge &e : edges)
        d.succ_adj_[cursor[e.src]++] = e.dst;
    for (NodeId u = 0; u < n; ++u) {
        auto begin = d.succ_adj_.begin() + static_cast<std::ptrdiff_t>(d.succ_off_[u]);
        auto end = d.succ_adj_.begin() + static_cast<std::ptrdiff_t>(d.succ_off_[u + 1]);
        std::sort(begin, end);
        auto dup = std::adjacent_find(begin, end);
        if (dup != end)
            throw BadEdge(u, *dup, "duplicate edge");
    }

    // Kahn's algorithm; anything left unprocessed sits on a cycle.
    std::vector<std::size_t> indeg(n, 0);
    for (NodeId v : d.succ_adj_)
        ++indeg[v];
    std::vector<NodeId> ready;
    ready.reserve(n);
    for (NodeId v = 0; v < n; ++v)
        if (indeg[v] == 0)
            ready.push_back(v);
    std::size_t processed = 0;
    while (!ready.empty()) {
        NodeId u = ready.back();
        ready.pop_back();
        ++processed;
        for (std::size_t i = d.succ_off_[u]; i < d.succ_off_[u + 1]; ++i) {
            NodeId v = d.succ_adj_[i];
            if (--indeg[v] == 0)
                ready.push_back(v);
        }
    }
    if (processed != n)
        throw CycleDetected();

    d.finish_build();
    return d;
}

NodeSet NodeSet::of(const Dag &dag, std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    NodeSet s;
    s.total_w_ = 0;
    for (NodeId v : ids) {
        assert(v < dag.node_count());
        s.total_w_ += dag.node_weight(v);
    }
    s.ids_ = std::move(ids);
    return s;
}

NodeSet NodeSet::all(const Dag &dag) {
    std::vector<NodeId> ids(dag.node_count());
    for (NodeId v = 0; v < ids.size(); ++v)
        ids[v] = v;
    NodeSet s;
    s.ids_ = std::move(ids);
    s.total_w_ = dag.total_weight();
    return s;
}

bool NodeSet::contains(NodeId v) const {
    return std::binary_search(ids_.begin(), ids_.end(), v);
}

std::vector<NodeId> topological_order(const Dag &dag) {
    const std::size_t n = dag.node_count();
    std::vector<std::size_t> indeg(n);
    for (NodeId v = 0; v < n; ++v)
        indeg[v] = dag.in_degree(v);
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
    for (NodeId v = 0; v < n; ++v)
        if (indeg[v] == 0)
            ready.push(v);
    std::vector<NodeId> order;
    order.reserve(n);
    while (!ready.empty()) {
        NodeId u = ready.top();
        ready.pop();
        order.push_back(u);
        for (NodeId v : dag.successors(u))
            if (--indeg[v] == 0)
                ready.push(v);
    }
    assert(order.size() == n);
    return order;
}

LayerAssignment alap_layers(const Dag &dag) {
    const std::size_t n = dag.node_count();
    LayerAssignment out;
    out.layer.assign(n, 0);
    if (n == 0)
        return out;

    // height[v] = longest path (in edges) from v to any sink.
    std::vector<std::int32_t> height(n, 0);
    std::vector<std::size_t> pending(n);
    std::vector<NodeId> ready;
    for (NodeId v = 0; v < n; ++v) {
        pending[v] = dag.out_degree(v);
        if (pending[v] == 0)
            ready.push_back(v);
    }
    std::int32_t max_height = 0;
    while (!ready.empty()) {
        NodeId v = ready.back();
        ready.pop_back();
        max_height = std::max(max_height, height[v]);
        for (NodeId u : dag.predecessors(v)) {
            height[u] = std::max(height[u], height[v] + 1);
            if (--pending[u] == 0)
                ready.push_back(u);
        }
    }

    out.num_layers = max_height + 1;
    for (NodeId v = 0; v < n; ++v)
        out.layer[v] = out.num_layers - 1 - height[v];
    return out;
}

std::vector<NodeSet> connected_components(const Dag &dag, const NodeSet &within) {
    const std::size_t n = dag.node_count();
    constexpr std::uint32_t kOutside = 0xffffffffu;
    constexpr std::uint32_t kUnvisited = 0xfffffffeu;
    std::vector<std::uint32_t> comp(n, kOutside);
    for (NodeId v : within.ids())
        comp[v] = kUnvisited;

    std::vector<std::vector<NodeId>> members;
    std::vector<NodeId> queue;
    for (NodeId start : within.ids()) {
        if (comp[start] != kUnvisited)
            continue;
        const auto id = static_cast<std::uint32_t>(members.size());
        members.emplace_back();
        comp[start] = id;
        queue.clear();
        queue.push_back(start);
        while (!queue.empty()) {
            NodeId u = queue.back();
            queue.pop_back();
            members[id].push_back(u);
            for (NodeId v : dag.successors(u))
                if (comp[v] == kUnvisited) {
                    comp[v] = id;
                    queue.push_back(v);
                }
            for (NodeId v : dag.predecessors(u))
                if (comp[v] == kUnvisited) {
                    comp[v] = id;
                    queue.push_back(v);
                }
        }
    }

    std::vector<NodeSet> out;
    out.reserve(members.size());
    for (auto &m : members)
        out.push_back(NodeSet::of(dag, std::move(m)));
    std::sort(out.begin(), out.end(), [](const NodeSet &a, const NodeSet &b) {
        if (a.total_weight() != b.total_weight())
            return a.total_weight() > b.total_weight();
        return a.ids().front() < b.ids().front();
    });
    return out;
}

SubDag induced_subgraph(const Dag &dag, const NodeSet &within) {
    const std::size_t n = dag.node_count();
    constexpr std::uint32_t kOutside = 0xffffffffu;
    std::vector<std::uint32_t> local(n, kOutside);
    auto ids = within.ids();
    for (std::size_t i = 0; i < ids.size(); ++i)
        local[ids[i]] = static_cast<std::uint32_t>(i);

    std::vector<std::size_t> off(ids.size() + 1, 0);
    std::vector<NodeId> adj;
    std::vector<std::int64_t> weights(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        weights[i] = dag.node_weight(ids[i]);
        for (NodeId v : dag.successors(ids[i]))
            if (local[v] != kOutside)
                adj.push_back(local[v]);
        off[i + 1] = adj.size();
    }

    SubDag out;
    out.dag = Dag::from_sorted_csr(std::move(off), std::move(adj), std::move(weights));
    out.to_parent.assign(ids.begin(), ids.end());
    return out;
}

} // namespace graphopt
