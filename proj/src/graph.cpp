#include "scgadj/graph.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

namespace scgadj {

Scg Scg::build(const std::vector<std::string>& nodes,
               const std::vector<std::pair<std::string, std::string>>& edges) {
    std::unordered_map<std::string, NodeIndex> index;
    for (const auto& n : nodes) {
        if (n.empty()) throw InputError("empty node name");
        if (!index.emplace(n, index.size()).second)
            throw InputError("duplicate node name '" + n + "'");
    }
    std::vector<Edge> resolved;
    resolved.reserve(edges.size());
    for (const auto& [s, t] : edges) {
        auto si = index.find(s);
        auto ti = index.find(t);
        if (si == index.end()) throw InputError("edge endpoint '" + s + "' is not a declared node");
        if (ti == index.end()) throw InputError("edge endpoint '" + t + "' is not a declared node");
        resolved.push_back({si->second, ti->second});
    }
    std::sort(resolved.begin(), resolved.end());
    auto dup = std::adjacent_find(resolved.begin(), resolved.end());
    if (dup != resolved.end())
        throw InputError("duplicate edge " + nodes[dup->source] + " -> " + nodes[dup->target]);
    return from_indices(nodes, std::move(resolved));
}

Scg Scg::from_indices(std::vector<std::string> nodes, std::vector<Edge> edges) {
    auto data = std::make_shared<Data>();
    data->names = std::move(nodes);
    const std::size_t n = data->names.size();
    for (const auto& e : edges)
        if (e.source >= n || e.target >= n) throw InputError("edge endpoint out of range");
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw InputError("duplicate edge");
    data->edges = std::move(edges);
    data->parents.assign(n, {});
    data->children.assign(n, {});
    for (const auto& e : data->edges) {
        data->children[e.source].push_back(e.target);
        data->parents[e.target].push_back(e.source);
    }
    for (auto& p : data->parents) std::sort(p.begin(), p.end());
    return Scg(std::move(data));
}

std::optional<NodeIndex> Scg::find(std::string_view name) const {
    auto it = std::find(data_->names.begin(), data_->names.end(), name);
    if (it == data_->names.end()) return std::nullopt;
    return static_cast<NodeIndex>(it - data_->names.begin());
}

NodeIndex Scg::index_of(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw InputError("unknown node '" + std::string(name) + "'");
}

std::optional<std::size_t> Scg::edge_index(NodeIndex source, NodeIndex target) const {
    const Edge key{source, target};
    auto it = std::lower_bound(data_->edges.begin(), data_->edges.end(), key);
    if (it == data_->edges.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - data_->edges.begin());
}

Scg Scg::without_node(NodeIndex v) const {
    std::vector<Edge> kept;
    for (const auto& e : data_->edges)
        if (e.source != v && e.target != v) kept.push_back(e);
    return from_indices(data_->names, std::move(kept));
}

bool Scg::operator==(const Scg& other) const {
    return data_->names == other.data_->names && data_->edges == other.data_->edges;
}

namespace {

NodeSet closure(const Scg& g, const NodeSet& s, bool forward) {
    NodeSet out;
    std::vector<NodeIndex> stack;
    for (auto v : s) {
        if (v >= g.size()) throw InputError("node index out of range");
        if (out.insert(v).second) stack.push_back(v);
    }
    while (!stack.empty()) {
        const auto v = stack.back();
        stack.pop_back();
        for (auto w : forward ? g.children(v) : g.parents(v))
            if (out.insert(w).second) stack.push_back(w);
    }
    return out;
}

}  // namespace

NodeSet ancestors(const Scg& g, const NodeSet& s) { return closure(g, s, false); }
NodeSet descendants(const Scg& g, const NodeSet& s) { return closure(g, s, true); }

NodeSet parents_of(const Scg& g, const NodeSet& s) {
    NodeSet out;
    for (auto v : s)
        for (auto p : g.parents(v)) out.insert(p);
    return out;
}

SccPartition scc_partition(const Scg& g) {
    // Tarjan, iterative over an explicit frame stack.
    const std::size_t n = g.size();
    constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
    std::vector<std::size_t> order(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<NodeIndex> stack;
    std::vector<NodeSet> found;
    std::size_t counter = 0;

    struct Frame {
        NodeIndex v;
        std::size_t next_child;
    };
    for (NodeIndex root = 0; root < n; ++root) {
        if (order[root] != unvisited) continue;
        std::vector<Frame> frames{{root, 0}};
        order[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& f = frames.back();
            const auto& kids = g.children(f.v);
            if (f.next_child < kids.size()) {
                const auto w = kids[f.next_child++];
                if (order[w] == unvisited) {
                    order[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], order[w]);
                }
                continue;
            }
            const auto v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] == order[v]) {
                NodeSet comp;
                NodeIndex w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.insert(w);
                } while (w != v);
                found.push_back(std::move(comp));
            }
        }
    }
    std::sort(found.begin(), found.end(),
              [](const NodeSet& a, const NodeSet& b) { return *a.begin() < *b.begin(); });
    SccPartition out;
    out.component_of.assign(n, 0);
    for (std::size_t c = 0; c < found.size(); ++c)
        for (auto v : found[c]) out.component_of[v] = c;
    out.components = std::move(found);
    return out;
}

bool on_cycle(const Scg& g, NodeIndex v) {
    if (g.has_self_loop(v)) return true;
    return scc_partition(g).component(v).size() > 1;
}

CycleProfile cycle_profile(const Scg& g, NodeIndex v) {
    if (v >= g.size()) throw InputError("node index out of range");
    CycleProfile p;
    p.has_self_loop = g.has_self_loop(v);
    const auto scc = scc_partition(g);
    const auto& comp = scc.component(v);
    p.on_any_cycle = p.has_self_loop || comp.size() > 1;
    // With Scc(v) = {v, x} the only multi-node cycle through v is v -> x -> v.
    if (!p.has_self_loop && comp.size() == 2) {
        for (auto w : comp)
            if (w != v) p.only_cycle_is_two_cycle_with = w;
    }
    return p;
}

bool is_acyclic(std::size_t node_count, const std::vector<Edge>& edges) {
    std::vector<std::vector<NodeIndex>> out(node_count);
    std::vector<std::size_t> indeg(node_count, 0);
    for (const auto& e : edges) {
        if (e.is_self_loop()) return false;
        out[e.source].push_back(e.target);
        ++indeg[e.target];
    }
    std::vector<NodeIndex> ready;
    for (NodeIndex v = 0; v < node_count; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++seen;
        for (auto w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    return seen == node_count;
}

}  // namespace scgadj
