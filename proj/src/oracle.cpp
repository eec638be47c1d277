#include "scgadj/oracle.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace scgadj {

void validate_config(const CorpusConfig& cfg) {
    if (cfg.min_nodes < 2 || cfg.max_nodes > 8 || cfg.min_nodes > cfg.max_nodes)
        throw InputError("node count range must lie within [2, 8]");
    if (cfg.edge_probability < 0.0 || cfg.edge_probability > 1.0)
        throw InputError("edge probability must lie in [0, 1]");
    if (cfg.gamma_max < 1 || cfg.gamma_max > kMaxLag) throw InputError("gamma_max out of range");
    if (cfg.max_gamma < 0) throw InputError("max_gamma must be non-negative");
    if (cfg.template_cap < 1 || cfg.exhaustive_cap < 1) throw InputError("template caps must be at least 1");
    if (cfg.max_subset_size < 0) throw InputError("max_subset_size must be non-negative");
}

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::size_t index, std::uint32_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
    return std::mt19937_64(seq);
}

}  // namespace

Scg random_scg(const CorpusConfig& cfg, std::size_t index) {
    validate_config(cfg);
    auto rng = stream(cfg.seed, index, 1);
    const int n = std::uniform_int_distribution<int>(cfg.min_nodes, cfg.max_nodes)(rng);
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("V" + std::to_string(i + 1));
    std::vector<std::size_t> rank(n);
    for (int i = 0; i < n; ++i) rank[i] = i;
    std::shuffle(rank.begin(), rank.end(), rng);
    std::bernoulli_distribution coin(cfg.edge_probability);
    std::vector<Edge> edges;
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            const bool drawn = coin(rng);
            if (!drawn) continue;
            if (!cfg.allow_cycles && s != t && rank[s] > rank[t]) continue;
            edges.push_back({static_cast<NodeIndex>(s), static_cast<NodeIndex>(t)});
        }
    return Scg::from_indices(std::move(names), std::move(edges));
}

std::pair<NodeIndex, NodeIndex> random_pair(const CorpusConfig& cfg, std::size_t index, const Scg& g) {
    auto rng = stream(cfg.seed, index, 2);
    std::vector<std::pair<NodeIndex, NodeIndex>> ancestral, all;
    for (NodeIndex y = 0; y < g.size(); ++y) {
        const auto an = ancestors(g, {y});
        for (NodeIndex x = 0; x < g.size(); ++x) {
            if (x == y) continue;
            all.emplace_back(x, y);
            if (an.count(x)) ancestral.emplace_back(x, y);
        }
    }
    const auto& pool = ancestral.empty() ? all : ancestral;
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

TemplateSet validity_templates(const Scg& g, int gamma_max, std::size_t exhaustive_cap,
                               std::size_t densest_cap) {
    TemplateSet out;
    auto dense = densest_templates(g, gamma_max, densest_cap);
    if (dense.over_cap) throw OverCapError("densest template count exceeds cap", dense.count);
    out.densest_count = dense.count;
    out.compatible_count = count_compatible_templates(g, gamma_max, exhaustive_cap);
    if (out.compatible_count <= exhaustive_cap) {
        out.templates = enumerate_compatible_templates(g, gamma_max, exhaustive_cap).templates;
        out.exhaustive = true;
    } else {
        out.templates = std::move(dense.templates);
    }
    return out;
}

bool common_backdoor_valid(const Scg& g, const MicroQuery& q, const TemporalSet& z, std::size_t cap) {
    auto all = enumerate_compatible_templates(g, q.gamma_max, cap);
    if (all.over_cap) throw OverCapError("compatible template count exceeds cap", all.count);
    for (const auto& t : all.templates)
        if (!classical_backdoor_check(t, q, z).valid) return false;
    return true;
}

std::vector<TemporalSet> subsets_up_to(const std::vector<TemporalVar>& pool, int k) {
    std::vector<TemporalSet> out;
    const int n = static_cast<int>(pool.size());
    std::vector<int> idx;
    for (int size = 0; size <= std::min(k, n); ++size) {
        idx.resize(size);
        for (int i = 0; i < size; ++i) idx[i] = i;
        while (true) {
            TemporalSet s;
            for (int i : idx) s.insert(pool[i]);
            out.push_back(std::move(s));
            int i = size - 1;
            while (i >= 0 && idx[i] == n - size + i) --i;
            if (i < 0) break;
            ++idx[i];
            for (int j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
        }
    }
    return out;
}

namespace {

std::vector<TemporalVar> window_pool(const CriterionContext& ctx, bool include_d) {
    std::vector<TemporalVar> pool;
    const auto w = ctx.window();
    for (int t = w.hi; t >= w.lo; --t)
        for (NodeIndex v = 0; v < ctx.graph().size(); ++v) {
            const TemporalVar tv{v, t};
            if (include_d || !ctx.possible_descendants().count(tv)) pool.push_back(tv);
        }
    return pool;
}

bool condition_c_forms_disagree(const Scg& g, const MicroQuery& q) {
    const auto kind = identify(g, q).kind;
    if (kind != VerdictKind::CondC && kind != VerdictKind::NotIdentifiable) return false;
    const bool alt = condition_c_alternative(g, q);
    return (kind == VerdictKind::CondC) != alt;
}

struct GraphOutcome {
    bool skipped = false;
    std::size_t condition_c_mismatches = 0;
    std::vector<GraphRecord> records;
    std::vector<Counterexample> counterexamples;
};

GraphOutcome run_graph(const CorpusConfig& cfg, std::size_t index, bool drop_descendant_check) {
    GraphOutcome out;
    const auto g = random_scg(cfg, index);
    for (NodeIndex x = 0; x < g.size(); ++x)
        for (NodeIndex y = 0; y < g.size(); ++y)
            if (x != y && condition_c_forms_disagree(g, {x, y, 1, cfg.gamma_max})) ++out.condition_c_mismatches;

    const auto [x, y] = random_pair(cfg, index, g);
    GraphRecord base;
    base.index = index;
    base.node_count = g.size();
    base.edge_count = g.edges().size();
    base.treatment = x;
    base.outcome = y;

    TemplateSet templates;
    try {
        templates = validity_templates(g, cfg.gamma_max, cfg.exhaustive_cap, cfg.template_cap);
    } catch (const OverCapError&) {
        out.skipped = true;
        for (int gamma = 0; gamma <= cfg.max_gamma; ++gamma) {
            auto r = base;
            r.gamma = gamma;
            r.skipped_over_cap = true;
            r.densest_templates = cfg.template_cap + 1;
            r.verdict = to_string(identify(g, {x, y, gamma, cfg.gamma_max}).kind);
            out.records.push_back(r);
        }
        return out;
    }

    for (int gamma = 0; gamma <= cfg.max_gamma; ++gamma) {
        const MicroQuery q{x, y, gamma, cfg.gamma_max};
        auto r = base;
        r.gamma = gamma;
        r.exhaustive = templates.exhaustive;
        r.compatible_templates = templates.compatible_count;
        r.densest_templates = templates.densest_count;
        CriterionContext ctx(g, q, cfg.semantics);
        r.verdict = to_string(ctx.verdict().kind);
        if (ctx.verdict().kind == VerdictKind::NotIdentifiable) {
            out.records.push_back(r);
            continue;
        }
        std::vector<BackdoorChecker> checkers;
        checkers.reserve(templates.templates.size());
        for (const auto& t : templates.templates) checkers.emplace_back(t, q);

        auto first_failure = [&](const TemporalSet& z) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < checkers.size(); ++i) {
                const auto c = checkers[i].check(z);
                if (!c.stable) ++r.unstable_checks;
                if (!c.valid) return i;
            }
            return std::nullopt;
        };

        std::vector<std::pair<std::string, TemporalSet>> candidates;
        if (ctx.verdict().kind == VerdictKind::NonAncestor) {
            candidates.emplace_back("empty", TemporalSet{});
        } else {
            for (auto& [name, set] : canonical_sets(g, q, cfg.semantics)) {
                if (name == "a1" || name == "a2") {
                    ++r.baselines_checked;
                    if (!first_failure(set)) ++r.baselines_valid;
                    continue;
                }
                candidates.emplace_back(name, std::move(set));
            }
            for (auto& s : subsets_up_to(window_pool(ctx, drop_descendant_check), cfg.max_subset_size))
                candidates.emplace_back("subset", std::move(s));
        }

        std::set<TemporalSet> seen;
        for (const auto& [label, z] : candidates) {
            if (!seen.insert(z).second) continue;
            ++r.candidates_scanned;
            TemporalSet judged = z;
            if (drop_descendant_check)
                for (const auto& d : ctx.possible_descendants()) judged.erase(d);
            const auto report = ctx.check(judged);
            if (!report.satisfied) continue;
            ++r.sets_checked;
            if (auto bad = first_failure(z)) {
                out.counterexamples.push_back(
                    {index, g, q, z, label, report.item, templates.templates[*bad]});
            } else {
                ++r.sets_sound;
            }
        }
        out.records.push_back(r);
    }
    return out;
}

template <class Work>
void parallel_for(std::size_t n, unsigned threads, Work&& work) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                work(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        body();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(body);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace

SoundnessReport soundness_experiment(const CorpusConfig& cfg, bool drop_descendant_check) {
    validate_config(cfg);
    std::vector<GraphOutcome> outcomes(cfg.n_graphs);
    parallel_for(cfg.n_graphs, cfg.threads,
                 [&](std::size_t i) { outcomes[i] = run_graph(cfg, i, drop_descendant_check); });

    SoundnessReport rep;
    rep.config = cfg;
    for (auto& o : outcomes) {
        rep.condition_c_mismatches += o.condition_c_mismatches;
        if (o.skipped) {
            ++rep.graphs_skipped_over_cap;
        } else {
            ++rep.graphs_tested;
        }
        for (auto& r : o.records) {
            if (!r.skipped_over_cap) {
                ++rep.queries;
                if (r.verdict == to_string(VerdictKind::NotIdentifiable)) ++rep.queries_not_identifiable;
            }
            rep.sets_checked += r.sets_checked;
            rep.sets_sound += r.sets_sound;
            rep.unstable_checks += r.unstable_checks;
            rep.baselines_checked += r.baselines_checked;
            rep.baselines_valid += r.baselines_valid;
            rep.records.push_back(std::move(r));
        }
        for (auto& c : o.counterexamples) rep.counterexamples.push_back(std::move(c));
    }
    return rep;
}

ProbeResult completeness_probe(const Scg& g, const MicroQuery& q, std::size_t template_cap,
                               std::size_t max_variables, int max_subset_size) {
    CriterionContext ctx(g, q);
    const auto templates = validity_templates(g, q.gamma_max, template_cap, template_cap);
    std::vector<BackdoorChecker> checkers;
    for (const auto& t : templates.templates) checkers.emplace_back(t, q);

    ProbeResult out;
    const auto pool = window_pool(ctx, false);
    out.exhaustive_scan = pool.size() <= max_variables;
    const int k = out.exhaustive_scan ? static_cast<int>(pool.size()) : max_subset_size;
    for (const auto& z : subsets_up_to(pool, k)) {
        ++out.sets_scanned;
        const bool valid = std::all_of(checkers.begin(), checkers.end(),
                                       [&](const BackdoorChecker& c) { return c.check(z).valid; });
        const bool accepted = ctx.check(z).satisfied;
        if (accepted) ++out.criterion_accepted;
        if (!valid) continue;
        ++out.common_valid;
        if (!accepted) out.missed.push_back(z);
    }
    return out;
}

std::vector<ProbeRecord> completeness_probe_corpus(const CorpusConfig& cfg) {
    validate_config(cfg);
    const std::size_t per_graph = static_cast<std::size_t>(cfg.max_gamma) + 1;
    std::vector<ProbeRecord> out(cfg.n_graphs * per_graph);
    parallel_for(cfg.n_graphs, cfg.threads, [&](std::size_t i) {
        const auto g = random_scg(cfg, i);
        const auto [x, y] = random_pair(cfg, i, g);
        for (int gamma = 0; gamma <= cfg.max_gamma; ++gamma) {
            auto& rec = out[i * per_graph + gamma];
            rec.index = i;
            const MicroQuery q{x, y, gamma, cfg.gamma_max};
            rec.verdict = to_string(identify(g, q).kind);
            try {
                rec.result = completeness_probe(g, q, cfg.template_cap, 12, cfg.max_subset_size);
            } catch (const OverCapError&) {
                rec.skipped = true;
            }
        }
    });
    return out;
}

}  // namespace scgadj
