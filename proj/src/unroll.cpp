#include "scgadj/unroll.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace scgadj {

std::vector<int> lags_of(LagMask m) {
    std::vector<int> out;
    for (int l = 0; l <= kMaxLag; ++l)
        if (has_lag(m, l)) out.push_back(l);
    return out;
}

LagMask lag_range(int lo, int hi) {
    LagMask m = 0;
    for (int l = lo; l <= hi; ++l) m |= LagMask{1} << l;
    return m;
}

LagMask FtDagTemplate::lags_of_edge(NodeIndex source, NodeIndex target) const {
    auto idx = scg.edge_index(source, target);
    return idx ? lags.at(*idx) : 0;
}

void validate_template(const FtDagTemplate& t) {
    if (t.gamma_max < 1 || t.gamma_max > kMaxLag)
        throw InputError("gamma_max must lie in [1, " + std::to_string(kMaxLag) + "]");
    if (t.lags.size() != t.scg.edges().size())
        throw InputError("template must carry one lag set per SCG edge");
    const LagMask allowed = lag_range(0, t.gamma_max);
    std::vector<Edge> lag0;
    for (std::size_t i = 0; i < t.lags.size(); ++i) {
        const auto& e = t.scg.edges()[i];
        const auto label = t.scg.name(e.source) + " -> " + t.scg.name(e.target);
        if (t.lags[i] == 0) throw InputError("empty lag set on edge " + label);
        if (t.lags[i] & ~allowed) throw InputError("lag above gamma_max on edge " + label);
        if (has_lag(t.lags[i], 0)) {
            if (e.is_self_loop()) throw InputError("lag 0 on self-loop " + label);
            lag0.push_back(e);
        }
    }
    if (!is_acyclic(t.scg.size(), lag0)) throw InputError("lag-0 subgraph has a cycle");
}

namespace {

// Incremental lag-0 reachability used by the backtracking enumerators.
bool reaches(const std::vector<Edge>& edges, std::size_t n, NodeIndex from, NodeIndex to) {
    std::vector<bool> seen(n, false);
    std::vector<NodeIndex> stack{from};
    seen[from] = true;
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        for (const auto& e : edges)
            if (e.source == v && !seen[e.target]) {
                seen[e.target] = true;
                stack.push_back(e.target);
            }
    }
    return false;
}

bool creates_cycle(const std::vector<Edge>& lag0, std::size_t n, const Edge& e) {
    return e.is_self_loop() || reaches(lag0, n, e.target, e.source);
}

std::size_t sat_mul(std::size_t a, std::size_t b, std::size_t limit) {
    if (a == 0 || b == 0) return 0;
    if (a > limit || b > limit) return limit + 1;
    if (a > (limit + 1) / b) return limit + 1;
    return std::min(a * b, limit + 1);
}

std::size_t sat_pow(std::size_t base, std::size_t exp, std::size_t limit) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) r = sat_mul(r, base, limit);
    return r;
}

// Edges grouped by the SCC they live in; inter-SCC edges can never close a cycle.
struct EdgeClasses {
    std::vector<std::vector<Edge>> intra;  // per component, non-self edges
    std::size_t inter = 0;
    std::size_t self_loops = 0;
};

EdgeClasses classify_edges(const Scg& g) {
    const auto scc = scc_partition(g);
    EdgeClasses c;
    c.intra.resize(scc.components.size());
    for (const auto& e : g.edges()) {
        if (e.is_self_loop())
            ++c.self_loops;
        else if (scc.component_of[e.source] == scc.component_of[e.target])
            c.intra[scc.component_of[e.source]].push_back(e);
        else
            ++c.inter;
    }
    return c;
}

// Calls visit(subset) for every maximal acyclic subset of `edges`; stops
// early when visit returns false.
template <class Visit>
bool for_each_maximal_acyclic(const std::vector<Edge>& edges, std::size_t n, Visit&& visit) {
    std::vector<Edge> chosen;
    std::vector<bool> taken(edges.size(), false);
    bool keep_going = true;
    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (!keep_going) return;
        if (i == edges.size()) {
            for (std::size_t j = 0; j < edges.size(); ++j)
                if (!taken[j] && !creates_cycle(chosen, n, edges[j])) return;
            keep_going = visit(chosen);
            return;
        }
        if (!creates_cycle(chosen, n, edges[i])) {
            chosen.push_back(edges[i]);
            taken[i] = true;
            self(self, i + 1);
            taken[i] = false;
            chosen.pop_back();
        }
        self(self, i + 1);
    };
    rec(rec, 0);
    return keep_going;
}

}  // namespace

TemplateEnumeration enumerate_compatible_templates(const Scg& g, int gamma_max, std::size_t cap) {
    if (gamma_max < 1 || gamma_max > kMaxLag) throw InputError("gamma_max out of range");
    if (cap < 1) throw InputError("template cap must be at least 1");
    TemplateEnumeration out;
    const auto& edges = g.edges();
    const LagMask top = lag_range(0, gamma_max);
    FtDagTemplate current{g, gamma_max, std::vector<LagMask>(edges.size(), 0)};
    std::vector<Edge> lag0;

    auto rec = [&](auto&& self, std::size_t i) -> void {
        if (out.over_cap) return;
        if (i == edges.size()) {
            ++out.count;
            if (out.count > cap) {
                out.over_cap = true;
                return;
            }
            out.templates.push_back(current);
            return;
        }
        const auto& e = edges[i];
        for (LagMask m = 1; m <= top && !out.over_cap; ++m) {
            const bool zero = has_lag(m, 0);
            if (zero && creates_cycle(lag0, g.size(), e)) continue;
            current.lags[i] = m;
            if (zero) lag0.push_back(e);
            self(self, i + 1);
            if (zero) lag0.pop_back();
        }
        current.lags[i] = 0;
    };
    rec(rec, 0);
    return out;
}

std::size_t count_compatible_templates(const Scg& g, int gamma_max, std::size_t limit) {
    if (gamma_max < 1 || gamma_max > kMaxLag) throw InputError("gamma_max out of range");
    const auto classes = classify_edges(g);
    const std::size_t with_zero = std::size_t{1} << gamma_max;          // {0} u any subset of [1,gmax]
    const std::size_t without_zero = (std::size_t{1} << gamma_max) - 1;  // non-empty subset of [1,gmax]
    std::size_t total = sat_pow(with_zero + without_zero, classes.inter, limit);
    total = sat_mul(total, sat_pow(without_zero, classes.self_loops, limit), limit);
    for (const auto& intra : classes.intra) {
        if (intra.empty()) continue;
        // Sum over acyclic lag-0 subsets A of with_zero^|A| * without_zero^(m-|A|).
        std::size_t sum = 0;
        std::vector<Edge> chosen;
        auto rec = [&](auto&& self, std::size_t i, std::size_t weight) -> void {
            if (sum > limit) return;
            if (i == intra.size()) {
                sum = std::min(sum + weight, limit + 1);
                return;
            }
            if (!creates_cycle(chosen, g.size(), intra[i])) {
                chosen.push_back(intra[i]);
                self(self, i + 1, sat_mul(weight, with_zero, limit));
                chosen.pop_back();
            }
            self(self, i + 1, sat_mul(weight, without_zero, limit));
        };
        rec(rec, 0, 1);
        total = sat_mul(total, sum, limit);
    }
    return std::min(total, limit + 1);
}

FtDagTemplate full_lag_template(const Scg& g, int gamma_max, const std::vector<Edge>& lag0_edges) {
    FtDagTemplate t{g, gamma_max, {}};
    t.lags.reserve(g.edges().size());
    for (const auto& e : g.edges()) {
        const bool zero = std::find(lag0_edges.begin(), lag0_edges.end(), e) != lag0_edges.end();
        t.lags.push_back(lag_range(zero ? 0 : 1, gamma_max));
    }
    return t;
}

TemplateEnumeration densest_templates(const Scg& g, int gamma_max, std::size_t cap) {
    if (gamma_max < 1 || gamma_max > kMaxLag) throw InputError("gamma_max out of range");
    if (cap < 1) throw InputError("template cap must be at least 1");
    const auto classes = classify_edges(g);
    std::vector<Edge> base;
    for (const auto& e : g.edges()) {
        if (e.is_self_loop()) continue;
        bool intra = false;
        for (const auto& comp : classes.intra)
            if (std::find(comp.begin(), comp.end(), e) != comp.end()) intra = true;
        if (!intra) base.push_back(e);
    }
    // Per component: its maximal acyclic subsets.
    std::vector<std::vector<std::vector<Edge>>> choices;
    std::size_t product = 1;
    for (const auto& intra : classes.intra) {
        if (intra.empty()) continue;
        std::vector<std::vector<Edge>> options;
        for_each_maximal_acyclic(intra, g.size(), [&](const std::vector<Edge>& s) {
            options.push_back(s);
            return options.size() <= cap;
        });
        product = sat_mul(product, options.size(), cap);
        choices.push_back(std::move(options));
    }
    TemplateEnumeration out;
    if (product > cap) {
        out.over_cap = true;
        out.count = cap + 1;
        return out;
    }
    // Odometer over the per-component choices, last component fastest.
    std::vector<std::size_t> pick(choices.size(), 0);
    for (bool more = true; more;) {
        std::vector<Edge> lag0 = base;
        for (std::size_t c = 0; c < choices.size(); ++c)
            lag0.insert(lag0.end(), choices[c][pick[c]].begin(), choices[c][pick[c]].end());
        out.templates.push_back(full_lag_template(g, gamma_max, lag0));
        more = false;
        for (std::size_t c = choices.size(); c-- > 0;) {
            if (++pick[c] < choices[c].size()) {
                more = true;
                break;
            }
            pick[c] = 0;
        }
    }
    out.count = out.templates.size();
    return out;
}

Scg macro_projection(const FtDagTemplate& t) {
    std::vector<Edge> kept;
    for (std::size_t i = 0; i < t.lags.size(); ++i)
        if (t.lags[i] != 0) kept.push_back(t.scg.edges()[i]);
    return Scg::from_indices(t.scg.names(), std::move(kept));
}

UnrolledGraph::UnrolledGraph(const FtDagTemplate& t, int lo, int hi)
    : lo_(lo), hi_(hi), series_(t.scg.size()) {
    if (lo > hi) throw InputError("unroll window requires lo <= hi");
    const std::size_t slices = static_cast<std::size_t>(hi - lo + 1);
    parents_.assign(slices * series_, {});
    children_.assign(slices * series_, {});
    const auto& edges = t.scg.edges();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (int lag : lags_of(t.lags[i])) {
            for (int s = lo; s + lag <= hi; ++s) {
                const auto from = id({edges[i].source, s});
                const auto to = id({edges[i].target, s + lag});
                children_[from].push_back(to);
                parents_[to].push_back(from);
            }
        }
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    for (auto& c : children_) std::sort(c.begin(), c.end());
}

std::size_t UnrolledGraph::id(const TemporalVar& v) const {
    if (!contains(v))
        throw InputError("temporal variable at offset " + std::to_string(v.offset) +
                         " lies outside the unrolled window");
    return static_cast<std::size_t>(v.offset - lo_) * series_ + v.series;
}

TemporalVar UnrolledGraph::var(std::size_t id) const {
    return {id % series_, lo_ + static_cast<int>(id / series_)};
}

std::size_t UnrolledGraph::edge_count() const {
    std::size_t n = 0;
    for (const auto& c : children_) n += c.size();
    return n;
}

std::vector<std::pair<TemporalVar, TemporalVar>> UnrolledGraph::edge_list() const {
    std::vector<std::pair<TemporalVar, TemporalVar>> out;
    for (std::size_t v = 0; v < children_.size(); ++v)
        for (auto w : children_[v]) out.emplace_back(var(v), var(w));
    std::sort(out.begin(), out.end());
    return out;
}

bool UnrolledGraph::is_acyclic() const {
    std::vector<std::size_t> indeg(parents_.size());
    std::vector<std::size_t> ready;
    for (std::size_t v = 0; v < parents_.size(); ++v) {
        indeg[v] = parents_[v].size();
        if (indeg[v] == 0) ready.push_back(v);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.back();
        ready.pop_back();
        ++seen;
        for (auto w : children_[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    return seen == parents_.size();
}

namespace {

TemporalSet walk(const UnrolledGraph& u, const TemporalSet& s, bool forward) {
    std::vector<bool> seen(u.node_count(), false);
    std::vector<std::size_t> stack;
    for (const auto& v : s) {
        auto i = u.id(v);
        if (!seen[i]) {
            seen[i] = true;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : forward ? u.children(v) : u.parents(v))
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    TemporalSet out;
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (seen[i]) out.insert(u.var(i));
    return out;
}

}  // namespace

TemporalSet UnrolledGraph::descendants(const TemporalSet& s) const { return walk(*this, s, true); }
TemporalSet UnrolledGraph::ancestors(const TemporalSet& s) const { return walk(*this, s, false); }

TemporalSet UnrolledGraph::parents_of(const TemporalSet& s) const {
    TemporalSet out;
    for (const auto& v : s)
        for (auto p : parents_[id(v)]) out.insert(var(p));
    return out;
}

bool d_separated(const UnrolledGraph& u, const TemporalSet& a, const TemporalSet& b,
                 const TemporalSet& z) {
    return d_separated_cut(u, a, b, z, {});
}

bool d_separated_cut(const UnrolledGraph& u, const TemporalSet& a, const TemporalSet& b,
                     const TemporalSet& z, const TemporalSet& cut) {
    const std::size_t n = u.node_count();
    std::vector<bool> in_a(n), in_b(n), in_z(n), is_cut(n);
    for (const auto& v : a) in_a[u.id(v)] = true;
    for (const auto& v : b) {
        auto i = u.id(v);
        if (in_a[i]) throw InputError("d-separation arguments a and b overlap");
        in_b[i] = true;
    }
    for (const auto& v : z) {
        auto i = u.id(v);
        if (in_a[i] || in_b[i]) throw InputError("conditioning set overlaps a or b");
        in_z[i] = true;
    }
    for (const auto& v : cut) is_cut[u.id(v)] = true;

    auto kids = [&](std::size_t v) -> const std::vector<std::size_t>& {
        static const std::vector<std::size_t> none;
        return is_cut[v] ? none : u.children(v);
    };

    // Ancestors of z in the mutilated graph (colliders there are open).
    std::vector<bool> anc_z(n, false);
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < n; ++i)
        if (in_z[i]) {
            anc_z[i] = true;
            stack.push_back(i);
        }
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto p : u.parents(v))
            if (!is_cut[p] && !anc_z[p]) {
                anc_z[p] = true;
                stack.push_back(p);
            }
    }

    // Reachability over (node, direction): up = entered from a child, down = from a parent.
    std::vector<bool> seen_up(n, false), seen_down(n, false);
    struct Item {
        std::size_t v;
        bool up;
    };
    std::vector<Item> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (in_a[i]) queue.push_back({i, true});
    while (!queue.empty()) {
        auto [v, up] = queue.back();
        queue.pop_back();
        auto& seen = up ? seen_up : seen_down;
        if (seen[v]) continue;
        seen[v] = true;
        if (in_b[v]) return false;
        if (up) {
            if (in_z[v]) continue;
            for (auto p : u.parents(v))
                if (!is_cut[p]) queue.push_back({p, true});
            for (auto c : kids(v)) queue.push_back({c, false});
        } else {
            if (!in_z[v])
                for (auto c : kids(v)) queue.push_back({c, false});
            if (anc_z[v])
                for (auto p : u.parents(v))
                    if (!is_cut[p]) queue.push_back({p, true});
        }
    }
    return true;
}

TemporalSet instantiate(const NodeSet& s, int lo, int hi) {
    TemporalSet out;
    for (auto v : s)
        for (int t = lo; t <= hi; ++t) out.insert({v, t});
    return out;
}

TemporalSet possible_descendants(const Scg& g, NodeIndex v, int offset, Window window,
                                 int gamma_max) {
    if (v >= g.size()) throw InputError("node index out of range");
    if (offset < window.lo || offset > window.hi) throw InputError("offset outside window");
    if (gamma_max < 1 || gamma_max > kMaxLag) throw InputError("gamma_max out of range");
    // Every lag on every edge at once: any time-expanded path here can be
    // re-timed into a single compatible template.
    FtDagTemplate all{g, gamma_max, {}};
    for (const auto& e : g.edges()) all.lags.push_back(lag_range(e.is_self_loop() ? 1 : 0, gamma_max));
    UnrolledGraph u(all, offset, window.hi);
    TemporalSet out;
    for (const auto& w : u.descendants({{v, offset}}))
        if (w.offset >= window.lo) out.insert(w);
    return out;
}

TemporalSet possible_descendants_bruteforce(const Scg& g, NodeIndex v, int offset, Window window,
                                            int gamma_max, std::size_t cap) {
    if (offset < window.lo || offset > window.hi) throw InputError("offset outside window");
    auto all = enumerate_compatible_templates(g, gamma_max, cap);
    if (all.over_cap) throw OverCapError("compatible template count exceeds cap", all.count);
    TemporalSet out;
    for (const auto& t : all.templates) {
        UnrolledGraph u(t, window.lo, window.hi);
        auto d = u.descendants({{v, offset}});
        out.insert(d.begin(), d.end());
    }
    return out;
}

}  // namespace scgadj
