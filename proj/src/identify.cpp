#include "scgadj/identify.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>

namespace scgadj {

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::NonAncestor: return "NonAncestor";
        case VerdictKind::CondA: return "CondA";
        case VerdictKind::CondB: return "CondB";
        case VerdictKind::CondC: return "CondC";
        case VerdictKind::NotIdentifiable: return "NotIdentifiable";
    }
    return "?";
}

namespace {

constexpr int kMaxGamma = 64;

template <class Set>
Set set_minus(const Set& a, const Set& b) {
    Set out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

template <class Set>
Set set_union(const Set& a, const Set& b) {
    Set out = a;
    out.insert(b.begin(), b.end());
    return out;
}

template <class Set>
bool subset(const Set& a, const Set& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// y reachable from v along forward edges, avoiding `blocked`.
bool reaches_avoiding(const Scg& g, NodeIndex v, NodeIndex y, const std::vector<bool>& blocked) {
    std::vector<bool> seen(g.size(), false);
    std::vector<NodeIndex> stack{v};
    seen[v] = true;
    while (!stack.empty()) {
        auto u = stack.back();
        stack.pop_back();
        if (u == y) return true;
        for (auto w : g.children(u))
            if (!seen[w] && !blocked[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    return false;
}

// Calls visit(path) for each simple directed path x -> ... -> y, in DFS order
// with children visited by index.
template <class Visit>
void for_each_directed_path(const Scg& g, NodeIndex x, NodeIndex y, Visit&& visit) {
    std::vector<bool> on_path(g.size(), false);
    std::vector<NodeIndex> path{x};
    on_path[x] = true;
    auto rec = [&](auto&& self, NodeIndex v) -> void {
        if (v == y) {
            visit(path);
            return;
        }
        for (auto w : g.children(v)) {
            if (on_path[w]) continue;
            on_path[w] = true;
            if (reaches_avoiding(g, w, y, on_path) || w == y) {
                path.push_back(w);
                self(self, w);
                path.pop_back();
            }
            on_path[w] = false;
        }
    };
    if (x != y) rec(rec, x);
}

}  // namespace

void validate_query(const Scg& g, const MicroQuery& q) {
    if (q.treatment >= g.size() || q.outcome >= g.size()) throw InputError("query names an unknown series");
    if (q.treatment == q.outcome) throw InputError("treatment and outcome must differ");
    if (q.gamma < 0 || q.gamma > kMaxGamma)
        throw InputError("gamma must lie in [0, " + std::to_string(kMaxGamma) + "]");
    if (q.gamma_max < 1 || q.gamma_max > kMaxLag)
        throw InputError("gamma_max must lie in [1, " + std::to_string(kMaxLag) + "]");
}

bool condition_c_alternative(const Scg& g, const MicroQuery& q) {
    if (q.gamma != 1) return false;
    const auto scc = scc_partition(g);
    const auto& comp = scc.component(q.treatment);
    for (auto v : comp)
        if (v != q.treatment && v != q.outcome) return false;
    return !g.has_self_loop(q.outcome);
}

Verdict identify(const Scg& g, const MicroQuery& q) {
    validate_query(g, q);
    const auto x = q.treatment;
    const auto y = q.outcome;
    Verdict v;
    v.treatment_scc = scc_partition(g).component(x);
    if (!ancestors(g, {y}).count(x)) {
        v.kind = VerdictKind::NonAncestor;
        v.explanation = g.name(x) + " is not an ancestor of " + g.name(y);
        return v;
    }
    if (v.treatment_scc.size() == 1) {
        v.kind = VerdictKind::CondA;
        v.explanation = "Scc(" + g.name(x) + ") is a singleton";
        return v;
    }
    if (q.gamma == 0) {
        const auto an = ancestors(g.without_node(x), {y});
        bool disjoint = true;
        for (auto w : v.treatment_scc)
            if (an.count(w)) disjoint = false;
        if (disjoint) {
            v.kind = VerdictKind::CondB;
            v.explanation = "no node of Scc(" + g.name(x) + ") reaches " + g.name(y) + " without " +
                            g.name(x);
            return v;
        }
    }
    if (q.gamma == 1) {
        const auto p = cycle_profile(g, y);
        if (p.only_cycle_is_two_cycle_with == x) {
            v.kind = VerdictKind::CondC;
            v.explanation = "the only cycle through " + g.name(y) + " is " + g.name(x) + " <-> " +
                            g.name(y);
            return v;
        }
    }
    v.kind = VerdictKind::NotIdentifiable;
    v.explanation = "Scc(" + g.name(x) + ") is not a singleton and neither condition B nor C applies";
    return v;
}

NodeSet causal_nodes(const Scg& g, NodeIndex x, NodeIndex y) {
    if (x >= g.size() || y >= g.size()) throw InputError("node index out of range");
    NodeSet out;
    for_each_directed_path(g, x, y, [&](const std::vector<NodeIndex>& path) {
        out.insert(path.begin() + 1, path.end());
    });
    return out;
}

NodeSet extended_causal_nodes(const Scg& g, NodeIndex x, NodeIndex y) {
    const auto scc = scc_partition(g);
    NodeSet out;
    for (auto v : causal_nodes(g, x, y)) {
        const auto& comp = scc.component(v);
        out.insert(comp.begin(), comp.end());
    }
    return out;
}

namespace {

NodeSet backdoor_ecn_simple(const Scg& g, NodeIndex x, NodeIndex y, const NodeSet& ecn,
                            const NodeSet& collider_series) {
    NodeSet out;
    const std::size_t n = g.size();
    std::vector<bool> on_path(n, false);
    std::vector<NodeIndex> path;
    on_path[x] = true;

    // `into` is true when the last path edge points into `v`.
    auto rec = [&](auto&& self, NodeIndex v, bool into) -> void {
        if (v == y) {
            for (std::size_t i = 0; i + 1 < path.size(); ++i)
                if (ecn.count(path[i])) out.insert(path[i]);
            return;
        }
        for (NodeIndex w = 0; w < n; ++w) {
            if (on_path[w]) continue;
            const bool fwd = g.has_edge(v, w);
            const bool back = g.has_edge(w, v);
            if (!fwd && !back) continue;
            on_path[w] = true;
            path.push_back(w);
            if (fwd) self(self, w, true);
            if (back && (!into || collider_series.count(v))) self(self, w, false);
            path.pop_back();
            on_path[w] = false;
        }
    };
    for (auto p : g.parents(x)) {
        if (p == x) continue;
        on_path[p] = true;
        path.push_back(p);
        rec(rec, p, false);
        path.pop_back();
        on_path[p] = false;
    }
    return out;
}

// States are (node, last edge points into node). A node qualifies when one of
// its states is reachable from a start state and can still reach y. Walks may
// pass through other instances of x and y.
NodeSet backdoor_ecn_walk(const Scg& g, NodeIndex x, NodeIndex y, const NodeSet& ecn,
                          const NodeSet& collider_series) {
    const std::size_t n = g.size();
    auto state = [](NodeIndex v, bool into) { return 2 * v + (into ? 1 : 0); };
    auto successors = [&](std::size_t s, auto&& emit) {
        const NodeIndex v = s / 2;
        const bool into = s % 2;
        for (auto w : g.children(v)) emit(state(w, true));
        if (!into || collider_series.count(v))
            for (auto w : g.parents(v)) emit(state(w, false));
    };
    std::vector<bool> fwd(2 * n, false);
    std::vector<std::size_t> stack;
    for (auto p : g.parents(x)) {
        const auto s = state(p, false);
        if (!fwd[s]) {
            fwd[s] = true;
            stack.push_back(s);
        }
    }
    std::vector<std::vector<std::size_t>> preds(2 * n);
    for (std::size_t s = 0; s < 2 * n; ++s)
        successors(s, [&](std::size_t t) { preds[t].push_back(s); });
    while (!stack.empty()) {
        auto s = stack.back();
        stack.pop_back();
        successors(s, [&](std::size_t t) {
            if (!fwd[t]) {
                fwd[t] = true;
                stack.push_back(t);
            }
        });
    }
    std::vector<bool> bwd(2 * n, false);
    for (bool into : {false, true}) {
        bwd[state(y, into)] = true;
        stack.push_back(state(y, into));
    }
    while (!stack.empty()) {
        auto s = stack.back();
        stack.pop_back();
        for (auto p : preds[s])
            if (!bwd[p]) {
                bwd[p] = true;
                stack.push_back(p);
            }
    }
    NodeSet out;
    for (auto v : ecn)
        for (bool into : {false, true})
            if (fwd[state(v, into)] && bwd[state(v, into)]) out.insert(v);
    return out;
}

}  // namespace

NodeSet backdoor_restricted_ecn(const Scg& g, NodeIndex x, NodeIndex y,
                                const NodeSet& collider_series, PathSemantics semantics) {
    const auto ecn = extended_causal_nodes(g, x, y);
    if (ecn.empty()) return {};
    return semantics == PathSemantics::Walk ? backdoor_ecn_walk(g, x, y, ecn, collider_series)
                                            : backdoor_ecn_simple(g, x, y, ecn, collider_series);
}

NodeSet series_of(const TemporalSet& s) {
    NodeSet out;
    for (const auto& v : s) out.insert(v.series);
    return out;
}

NodeSet backdoor_restricted_ecn(const Scg& g, NodeIndex x, NodeIndex y, const TemporalSet& z2,
                                PathSemantics semantics) {
    return backdoor_restricted_ecn(g, x, y, series_of(z2), semantics);
}

Window adjustment_window(const MicroQuery& q) { return {-(q.gamma + q.gamma_max), 0}; }

TemporalSet treatment_possible_descendants(const Scg& g, const MicroQuery& q) {
    return possible_descendants(g, q.treatment, -q.gamma, adjustment_window(q), q.gamma_max);
}

CriterionContext::CriterionContext(Scg g, MicroQuery q, PathSemantics semantics)
    : g_(std::move(g)), q_(q), semantics_(semantics) {
    verdict_ = identify(g_, q_);
    window_ = adjustment_window(q_);
    d_ = treatment_possible_descendants(g_, q_);
    excluded_ = d_;
    excluded_.insert({q_.outcome, 0});
    x_cycle_ = on_cycle(g_, q_.treatment);
    const auto x = q_.treatment;
    const auto y = q_.outcome;
    const int lo = window_.lo;
    const int gmax = q_.gamma_max;
    const int gamma = q_.gamma;
    cn_ = causal_nodes(g_, x, y);
    ecn_ = extended_causal_nodes(g_, x, y);
    pa_cn_ = set_minus(instantiate(parents_of(g_, cn_), lo, 0), excluded_);

    const auto pa_scc = set_minus(instantiate(parents_of(g_, verdict_.treatment_scc), lo, -gamma), excluded_);
    const auto pa_ecn = instantiate(parents_of(g_, ecn_), lo, 0);
    switch (verdict_.kind) {
        case VerdictKind::CondA:
            cores_.emplace_back("A.1", pa_scc);
            if (!x_cycle_) cores_.emplace_back("A.2", set_minus(pa_ecn, excluded_));
            if (gamma == 0) cores_.emplace_back("A.3", required_z1({}));
            if (x_cycle_ && gamma > 0)
                cores_.emplace_back(
                    "A.4", set_minus(set_union(instantiate(parents_of(g_, {x}), lo + 1, 0), pa_ecn), excluded_));
            break;
        case VerdictKind::CondB:
            cores_.emplace_back("B.1", pa_scc);
            cores_.emplace_back("B.2", required_z1({}));
            break;
        case VerdictKind::CondC: {
            const auto px = instantiate(parents_of(g_, {x}), -gmax, 0);
            const auto py = instantiate(parents_of(g_, {y}), -gmax, 0);
            c_core_ = set_minus(set_union(px, py), excluded_);
            px_all_ = instantiate(parents_of(g_, {x}), lo, lo);
            py_all_ = instantiate(parents_of(g_, {y}), lo, lo);
            cores_.emplace_back("C", c_core_);
            break;
        }
        default:
            break;
    }
}

TemporalSet CriterionContext::required_z1(const NodeSet& z2_series) const {
    const auto bd = backdoor_restricted_ecn(g_, q_.treatment, q_.outcome, z2_series, semantics_);
    if (bd.empty()) return pa_cn_;
    return set_union(pa_cn_, set_minus(instantiate(parents_of(g_, bd), window_.lo, 0), excluded_));
}

std::optional<std::pair<TemporalSet, TemporalSet>> CriterionContext::find_partition(
    const TemporalSet& z) const {
    // Z1 depends on Z2 only through its series, so trying every series subset
    // as a guess for series(Z2) and verifying the guess is exhaustive.
    const auto series = series_of(z);
    const std::vector<NodeIndex> list(series.begin(), series.end());
    if (list.size() >= 8 * sizeof(std::size_t)) throw InputError("adjustment set spans too many series");
    const std::size_t subsets = std::size_t{1} << list.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        NodeSet guess;
        for (std::size_t i = 0; i < list.size(); ++i)
            if (mask >> i & 1) guess.insert(list[i]);
        auto z1 = required_z1(guess);
        if (!subset(z1, z)) continue;
        auto z2 = set_minus(z, z1);
        if (required_z1(series_of(z2)) == z1) return std::make_pair(std::move(z1), std::move(z2));
    }
    return std::nullopt;
}

CriterionReport CriterionContext::check(const TemporalSet& z) const {
    for (const auto& v : z) {
        if (v.series >= g_.size()) throw InputError("adjustment set names an unknown series");
        if (v.offset < window_.lo || v.offset > window_.hi)
            throw InputError("offset of " + format_var(g_, v) + " lies outside [" +
                             std::to_string(window_.lo) + ", " + std::to_string(window_.hi) + "]");
    }
    CriterionReport r;
    r.verdict = verdict_.kind;
    if (verdict_.kind == VerdictKind::NotIdentifiable) {
        r.violations.push_back("effect is not identifiable by adjustment: " + verdict_.explanation);
        return r;
    }
    TemporalSet hit;
    std::set_intersection(z.begin(), z.end(), d_.begin(), d_.end(), std::inserter(hit, hit.end()));
    if (!hit.empty()) {
        r.violations.push_back("possible descendant of treatment: " + format_set(g_, hit));
        return r;
    }
    if (z.count({q_.outcome, 0})) {
        r.violations.push_back("outcome " + g_.name(q_.outcome) + "@0 in adjustment set");
        return r;
    }
    if (verdict_.kind == VerdictKind::NonAncestor) {
        r.satisfied = true;
        return r;
    }
    auto accept = [&](const std::string& item, const TemporalSet& core) {
        r.satisfied = true;
        r.item = item;
        r.required_core = core;
        return r;
    };
    auto missing = [&](const std::string& item, const TemporalSet& core) {
        r.violations.push_back(item + ": missing " + format_set(g_, set_minus(core, z)));
    };
    auto core_of = [&](const std::string& item) -> const TemporalSet* {
        for (const auto& [name, core] : cores_)
            if (name == item) return &core;
        return nullptr;
    };
    auto partition_item = [&](const std::string& item) -> bool {
        if (auto p = find_partition(z)) {
            r.partition = p;
            accept(item, p->first);
            return true;
        }
        r.violations.push_back(item + ": no partition Z = Z1 + Z2 matches");
        return false;
    };

    const int gamma = q_.gamma;
    switch (verdict_.kind) {
        case VerdictKind::CondA: {
            r.condition = "A";
            const auto& a1 = *core_of("A.1");
            if (subset(a1, z)) return accept("A.1", a1);
            missing("A.1", a1);
            if (const auto* a2 = core_of("A.2")) {
                if (subset(*a2, z)) return accept("A.2", *a2);
                missing("A.2", *a2);
            } else {
                r.violations.push_back("A.2: treatment lies on a cycle");
            }
            if (gamma == 0) {
                if (partition_item("A.3")) return r;
            } else {
                r.violations.push_back("A.3: requires gamma = 0");
            }
            if (const auto* a4 = core_of("A.4")) {
                if (subset(*a4, z)) return accept("A.4", *a4);
                missing("A.4", *a4);
            } else {
                r.violations.push_back("A.4: requires a cycle on the treatment and gamma > 0");
            }
            return r;
        }
        case VerdictKind::CondB: {
            r.condition = "B";
            const auto& b1 = *core_of("B.1");
            if (subset(b1, z)) return accept("B.1", b1);
            missing("B.1", b1);
            partition_item("B.2");
            return r;
        }
        case VerdictKind::CondC: {
            r.condition = "C";
            if (!subset(c_core_, z)) {
                missing("C", c_core_);
                return r;
            }
            if (subset(px_all_, z)) return accept("C", set_union(c_core_, px_all_));
            if (subset(py_all_, z)) return accept("C", set_union(c_core_, py_all_));
            r.violations.push_back("C: contains neither " + format_set(g_, px_all_) + " nor " +
                                   format_set(g_, py_all_));
            return r;
        }
        default:
            return r;
    }
}

TemporalSet CriterionContext::qopt() const {
    const int gamma = q_.gamma;
    const int lo = window_.lo;
    switch (verdict_.kind) {
        case VerdictKind::CondA:
            if (gamma == 0) return required_z1({});
            if (!x_cycle_) return set_minus(instantiate(parents_of(g_, ecn_), lo, 0), excluded_);
            return set_minus(set_union(instantiate(parents_of(g_, {q_.treatment}), lo + 1, 0),
                                       instantiate(parents_of(g_, ecn_), lo, 0)),
                             excluded_);
        case VerdictKind::CondB:
            return required_z1({});
        case VerdictKind::CondC:
            return set_minus(set_union(instantiate(parents_of(g_, {q_.outcome}), lo, 0),
                                       instantiate(parents_of(g_, {q_.treatment}), -q_.gamma_max, 0)),
                             excluded_);
        default:
            throw InputError(std::string("quasi-optimal set undefined for verdict ") +
                             to_string(verdict_.kind));
    }
}

CriterionReport scg_backdoor_check(const Scg& g, const MicroQuery& q, const TemporalSet& z,
                                   PathSemantics semantics) {
    return CriterionContext(g, q, semantics).check(z);
}

TemporalSet qopt(const Scg& g, const MicroQuery& q, PathSemantics semantics) {
    return CriterionContext(g, q, semantics).qopt();
}

namespace {

TemporalSet baseline_set(const Scg& g, const MicroQuery& q, const NodeSet& universe) {
    validate_query(g, q);
    const auto de = descendants(g, {q.treatment});
    NodeSet inside, outside;
    for (auto v : universe) (de.count(v) ? inside : outside).insert(v);
    const int gamma = q.gamma;
    const int gmax = q.gamma_max;
    return set_union(instantiate(inside, -gamma - 1 - gmax, -gamma - 1),
                     instantiate(outside, -gamma - gmax, -gamma));
}

}  // namespace

TemporalSet set_a1(const Scg& g, const MicroQuery& q) {
    NodeSet all;
    for (NodeIndex v = 0; v < g.size(); ++v) all.insert(v);
    return baseline_set(g, q, all);
}

TemporalSet set_a2(const Scg& g, const MicroQuery& q) {
    validate_query(g, q);
    return baseline_set(g, q, ancestors(g, {q.treatment, q.outcome}));
}

TemporalSet ftdag_opt(const FtDagTemplate& t, const MicroQuery& q) {
    validate_query(t.scg, q);
    // Causal nodes live in [-gamma, 0], so their parents fit in the window.
    UnrolledGraph u(t, -q.gamma - q.gamma_max, 0);
    const TemporalVar x{q.treatment, -q.gamma};
    const TemporalVar y{q.outcome, 0};
    const auto de = u.descendants({x});
    if (!de.count(y)) throw InputError("treatment is not an ancestor of the outcome in this template");
    const auto an = u.ancestors({y});
    TemporalSet cn;
    std::set_intersection(de.begin(), de.end(), an.begin(), an.end(), std::inserter(cn, cn.end()));
    cn.erase(x);
    return set_minus(u.parents_of(cn), de);
}

int default_padding(const Scg& g, const MicroQuery& q) {
    return static_cast<int>(g.size()) * (q.gamma_max + 1);
}

bool classical_backdoor_valid(const FtDagTemplate& t, const MicroQuery& q, const TemporalSet& z,
                              int padding) {
    validate_query(t.scg, q);
    const TemporalVar x{q.treatment, -q.gamma};
    const TemporalVar y{q.outcome, 0};
    if (z.count(x) || z.count(y)) return false;
    UnrolledGraph u(t, -q.gamma - q.gamma_max - padding, q.gamma_max);
    for (const auto& v : z)
        if (!u.contains(v)) throw InputError(format_var(t.scg, v) + " lies outside the padded unrolling");
    const auto de = u.descendants({x});
    for (const auto& v : z)
        if (de.count(v)) return false;
    return d_separated_cut(u, {x}, {y}, z, {x});
}

BackdoorCheck classical_backdoor_check(const FtDagTemplate& t, const MicroQuery& q,
                                       const TemporalSet& z) {
    const int pad = default_padding(t.scg, q);
    BackdoorCheck r;
    r.valid = classical_backdoor_valid(t, q, z, pad);
    r.stable = classical_backdoor_valid(t, q, z, pad + q.gamma_max + 1) == r.valid;
    return r;
}

namespace {

UnrolledGraph padded_unrolling(const FtDagTemplate& t, const MicroQuery& q, int padding) {
    return UnrolledGraph(t, -q.gamma - q.gamma_max - padding, q.gamma_max);
}

}  // namespace

BackdoorChecker::BackdoorChecker(const FtDagTemplate& t, const MicroQuery& q)
    : q_((validate_query(t.scg, q), q)),
      base_{padded_unrolling(t, q, default_padding(t.scg, q)), {}},
      wide_{padded_unrolling(t, q, default_padding(t.scg, q) + q.gamma_max + 1), {}} {
    const TemporalVar x{q.treatment, -q.gamma};
    base_.treatment_descendants = base_.graph.descendants({x});
    wide_.treatment_descendants = wide_.graph.descendants({x});
}

bool BackdoorChecker::valid(const Level& level, const TemporalSet& z) const {
    const TemporalVar x{q_.treatment, -q_.gamma};
    const TemporalVar y{q_.outcome, 0};
    if (z.count(x) || z.count(y)) return false;
    for (const auto& v : z) {
        if (!level.graph.contains(v)) throw InputError("adjustment variable lies outside the padded unrolling");
        if (level.treatment_descendants.count(v)) return false;
    }
    return d_separated_cut(level.graph, {x}, {y}, z, {x});
}

BackdoorCheck BackdoorChecker::check(const TemporalSet& z) const {
    BackdoorCheck r;
    r.valid = valid(base_, z);
    r.stable = valid(wide_, z) == r.valid;
    return r;
}

FtDagTemplate prop2_witness_template(const Scg& g, const MicroQuery& q) {
    const auto verdict = identify(g, q);
    if (verdict.kind == VerdictKind::NonAncestor)
        throw InputError("treatment is not an ancestor of the outcome");
    if (verdict.kind == VerdictKind::NotIdentifiable)
        throw InputError("effect is not identifiable by adjustment");
    const auto& edges = g.edges();
    std::vector<bool> zero(edges.size(), false);
    std::vector<Edge> lag0;
    auto try_add = [&](NodeIndex s, NodeIndex t) {
        const auto idx = g.edge_index(s, t);
        if (!idx || zero[*idx] || s == t) return false;
        lag0.push_back(edges[*idx]);
        if (!is_acyclic(g.size(), lag0)) {
            lag0.pop_back();
            return false;
        }
        zero[*idx] = true;
        return true;
    };
    for_each_directed_path(g, q.treatment, q.outcome, [&](const std::vector<NodeIndex>& path) {
        for (std::size_t i = 0; i + 1 < path.size(); ++i) try_add(path[i], path[i + 1]);
    });
    for (bool changed = true; changed;) {
        changed = false;
        for (NodeIndex v = 0; v < g.size(); ++v) {
            bool reached = false;
            for (auto p : g.parents(v))
                if (zero[*g.edge_index(p, v)]) reached = true;
            if (!reached) continue;
            for (auto p : g.parents(v))
                if (try_add(p, v)) changed = true;
        }
    }
    return full_lag_template(g, q.gamma_max, lag0);
}

NamedSets canonical_sets(const Scg& g, const MicroQuery& q, PathSemantics semantics) {
    CriterionContext ctx(g, q, semantics);
    NamedSets out;
    switch (ctx.verdict().kind) {
        case VerdictKind::NotIdentifiable:
            throw InputError("effect is not identifiable by adjustment");
        case VerdictKind::NonAncestor:
            out.emplace_back("empty", TemporalSet{});
            return out;
        default:
            break;
    }
    out.emplace_back("qopt", ctx.qopt());
    out.emplace_back("a1", set_a1(g, q));
    out.emplace_back("a2", set_a2(g, q));
    for (const auto& [item, core] : ctx.item_cores()) {
        if (item != "C") {
            out.emplace_back(item + "-core", core);
            continue;
        }
        const int lo = ctx.window().lo;
        out.emplace_back("C-core-x-all",
                         set_union(core, instantiate(parents_of(g, {q.treatment}), lo, lo)));
        out.emplace_back("C-core-y-all",
                         set_union(core, instantiate(parents_of(g, {q.outcome}), lo, lo)));
    }
    return out;
}

namespace {

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string time_label(int offset) {
    if (offset == 0) return "t";
    return offset < 0 ? "t-" + std::to_string(-offset) : "t+" + std::to_string(offset);
}

std::string value_label(const Scg& g, NodeIndex v, int offset) {
    return lower(g.name(v)) + "_{" + time_label(offset) + "}";
}

}  // namespace

Estimand estimand(const Scg& g, const MicroQuery& q, const TemporalSet& z) {
    validate_query(g, q);
    Estimand e;
    const auto y = lower(g.name(q.outcome)) + "_t";
    const auto x = value_label(g, q.treatment, -q.gamma);
    if (z.empty()) {
        e.formula = "P(" + y + " | " + x + ")";
        return e;
    }
    // Most recent first, then by series order.
    std::vector<TemporalVar> order(z.begin(), z.end());
    std::stable_sort(order.begin(), order.end(),
                     [](const TemporalVar& a, const TemporalVar& b) { return a.offset > b.offset; });
    std::string joined;
    for (const auto& v : order) {
        e.summed_over.push_back(value_label(g, v.series, v.offset));
        if (!joined.empty()) joined += ", ";
        joined += e.summed_over.back();
    }
    e.formula = "sum_{" + joined + "} P(" + y + " | " + x + ", " + joined + ") P(" + joined + ")";
    return e;
}

std::string format_var(const Scg& g, const TemporalVar& v) {
    return g.name(v.series) + "@" + std::to_string(v.offset);
}

std::string format_set(const Scg& g, const TemporalSet& s) {
    std::string out = "{";
    for (const auto& v : s) {
        if (out.size() > 1) out += ", ";
        out += format_var(g, v);
    }
    return out + "}";
}

}  // namespace scgadj
