#include "scgadj/io.hpp"

#include <algorithm>
#include <sstream>

namespace scgadj {

Json parse_json(const std::string& text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("invalid JSON: ") + e.what());
    }
}

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field \"") + key + "\"");
    return j.at(key);
}

std::string as_string(const Json& j, const char* what) {
    if (!j.is_string()) throw InputError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

int as_int(const Json& j, const char* what) {
    if (!j.is_number_integer()) throw InputError(std::string(what) + " must be an integer");
    const auto v = j.get<long long>();
    if (v < -1000000 || v > 1000000) throw InputError(std::string(what) + " out of range");
    return static_cast<int>(v);
}

std::pair<std::string, std::string> name_pair(const Json& j, const char* what) {
    if (!j.is_array() || j.size() != 2) throw InputError(std::string(what) + " must be a [source, target] pair");
    return {as_string(j[0], what), as_string(j[1], what)};
}

}  // namespace

Scg scg_from_json(const Json& j) {
    const auto& nodes = field(j, "nodes");
    const auto& edges = field(j, "edges");
    if (!nodes.is_array() || !edges.is_array()) throw InputError("\"nodes\" and \"edges\" must be arrays");
    std::vector<std::string> names;
    for (const auto& n : nodes) names.push_back(as_string(n, "node name"));
    std::vector<std::pair<std::string, std::string>> es;
    for (const auto& e : edges) es.push_back(name_pair(e, "edge"));
    return Scg::build(names, es);
}

Json scg_to_json(const Scg& g) {
    Json edges = Json::array();
    for (const auto& e : g.edges()) edges.push_back({g.name(e.source), g.name(e.target)});
    return Json{{"nodes", g.names()}, {"edges", edges}};
}

FtDagTemplate template_from_json(const Json& j) {
    FtDagTemplate t;
    t.scg = scg_from_json(field(j, "scg"));
    t.gamma_max = as_int(field(j, "gamma_max"), "gamma_max");
    if (t.gamma_max < 1 || t.gamma_max > kMaxLag) throw InputError("gamma_max out of range");
    t.lags.assign(t.scg.edges().size(), 0);
    std::vector<bool> seen(t.lags.size(), false);
    const auto& lags = field(j, "lags");
    if (!lags.is_array()) throw InputError("\"lags\" must be an array");
    for (const auto& entry : lags) {
        const auto [s, d] = name_pair(field(entry, "edge"), "lag edge");
        const auto idx = t.scg.edge_index(t.scg.index_of(s), t.scg.index_of(d));
        if (!idx) throw InputError("lag set for an edge not in the graph: " + s + "->" + d);
        if (seen[*idx]) throw InputError("duplicate lag set for edge " + s + "->" + d);
        seen[*idx] = true;
        const auto& set = field(entry, "set");
        if (!set.is_array()) throw InputError("lag \"set\" must be an array");
        for (const auto& l : set) {
            const int lag = as_int(l, "lag");
            if (lag < 0 || lag > t.gamma_max) throw InputError("lag outside [0, gamma_max]");
            t.lags[*idx] |= LagMask(1) << lag;
        }
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw InputError("every edge needs a lag set");
    validate_template(t);
    return t;
}

Json template_to_json(const FtDagTemplate& t) {
    Json lags = Json::array();
    const auto& g = t.scg;
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const auto& e = g.edges()[i];
        lags.push_back(Json{{"edge", {g.name(e.source), g.name(e.target)}}, {"set", lags_of(t.lags[i])}});
    }
    return Json{{"scg", scg_to_json(g)}, {"gamma_max", t.gamma_max}, {"lags", lags}};
}

MicroQuery query_from_json(const Scg& g, const Json& j) {
    MicroQuery q;
    q.treatment = g.index_of(as_string(field(j, "treatment"), "treatment"));
    q.outcome = g.index_of(as_string(field(j, "outcome"), "outcome"));
    if (j.contains("gamma")) q.gamma = as_int(j.at("gamma"), "gamma");
    if (j.contains("gamma_max")) q.gamma_max = as_int(j.at("gamma_max"), "gamma_max");
    validate_query(g, q);
    return q;
}

Json query_to_json(const Scg& g, const MicroQuery& q) {
    return Json{{"treatment", g.name(q.treatment)},
                {"outcome", g.name(q.outcome)},
                {"gamma", q.gamma},
                {"gamma_max", q.gamma_max}};
}

TemporalSet set_from_json(const Scg& g, const Json& j) {
    if (!j.is_array()) throw InputError("adjustment set must be an array of [name, offset] pairs");
    TemporalSet s;
    for (const auto& v : j) {
        if (!v.is_array() || v.size() != 2) throw InputError("set member must be a [name, offset] pair");
        s.insert({g.index_of(as_string(v[0], "series name")), as_int(v[1], "offset")});
    }
    return s;
}

Json set_to_json(const Scg& g, const TemporalSet& s) {
    // Declaration order, latest instant first within a series.
    std::vector<TemporalVar> vs(s.begin(), s.end());
    std::sort(vs.begin(), vs.end(), [](const TemporalVar& a, const TemporalVar& b) {
        if (a.series != b.series) return a.series < b.series;
        return a.offset > b.offset;
    });
    Json out = Json::array();
    for (const auto& v : vs) out.push_back({g.name(v.series), v.offset});
    return out;
}

Json verdict_to_json(const Scg& g, const MicroQuery& q, const Verdict& v) {
    Json scc = Json::array();
    for (auto n : v.treatment_scc) scc.push_back(g.name(n));
    return Json{{"query", query_to_json(g, q)},
                {"verdict", to_string(v.kind)},
                {"identifiable", v.kind != VerdictKind::NotIdentifiable},
                {"treatment_scc", scc},
                {"explanation", v.explanation}};
}

Json report_to_json(const Scg& g, const MicroQuery& q, const TemporalSet& z, const CriterionReport& r) {
    Json j{{"query", query_to_json(g, q)},
           {"set", set_to_json(g, z)},
           {"satisfied", r.satisfied},
           {"verdict", to_string(r.verdict)},
           {"condition", r.condition},
           {"item", r.item},
           {"required_core", set_to_json(g, r.required_core)}};
    if (r.partition) j["partition"] = {{"z1", set_to_json(g, r.partition->first)},
                                       {"z2", set_to_json(g, r.partition->second)}};
    j["violations"] = r.violations;
    return j;
}

Json named_sets_to_json(const Scg& g, const MicroQuery& q, const NamedSets& sets) {
    Json out = Json::object();
    for (const auto& [name, s] : sets) out[name] = set_to_json(g, s);
    return Json{{"query", query_to_json(g, q)}, {"verdict", to_string(identify(g, q).kind)}, {"sets", out}};
}

std::string unrolled_edge_list(const UnrolledGraph& u, const Scg& g) {
    std::ostringstream os;
    for (const auto& [a, b] : u.edge_list()) os << format_var(g, a) << " -> " << format_var(g, b) << "\n";
    return os.str();
}

Json unrolled_to_json(const UnrolledGraph& u, const Scg& g) {
    Json nodes = Json::array();
    for (std::size_t i = 0; i < u.node_count(); ++i) {
        const auto v = u.var(i);
        nodes.push_back({g.name(v.series), v.offset});
    }
    Json edges = Json::array();
    for (const auto& [a, b] : u.edge_list())
        edges.push_back({Json{g.name(a.series), a.offset}, Json{g.name(b.series), b.offset}});
    return Json{{"window", {u.lo(), u.hi()}}, {"nodes", nodes}, {"edges", edges}};
}

PathSemantics path_semantics_from_string(const std::string& s) {
    if (s == "walk") return PathSemantics::Walk;
    if (s == "simple") return PathSemantics::Simple;
    throw InputError("path semantics must be \"walk\" or \"simple\"");
}

const char* to_string(PathSemantics s) { return s == PathSemantics::Walk ? "walk" : "simple"; }

CorpusConfig corpus_config_from_json(const Json& j, CorpusConfig cfg) {
    if (!j.is_object()) throw InputError("corpus configuration must be an object");
    static const char* const known[] = {"n_graphs",     "min_nodes",      "max_nodes", "edge_probability",
                                        "allow_cycles", "gamma_max",      "max_gamma", "template_cap",
                                        "exhaustive_cap", "seed",         "max_subset_size",
                                        "path_semantics", "threads"};
    for (const auto& [key, value] : j.items())
        if (std::find(std::begin(known), std::end(known), key) == std::end(known))
            throw InputError("unknown configuration key \"" + key + "\"");
    auto count = [&](const char* key, auto& dst) {
        if (!j.contains(key)) return;
        const int v = as_int(j.at(key), key);
        if (v < 0) throw InputError(std::string(key) + " must be non-negative");
        dst = static_cast<std::remove_reference_t<decltype(dst)>>(v);
    };
    count("n_graphs", cfg.n_graphs);
    count("min_nodes", cfg.min_nodes);
    count("max_nodes", cfg.max_nodes);
    count("gamma_max", cfg.gamma_max);
    count("max_gamma", cfg.max_gamma);
    count("template_cap", cfg.template_cap);
    count("exhaustive_cap", cfg.exhaustive_cap);
    count("max_subset_size", cfg.max_subset_size);
    count("threads", cfg.threads);
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer())
            throw InputError("seed must be an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("edge_probability")) {
        if (!j.at("edge_probability").is_number()) throw InputError("edge_probability must be a number");
        cfg.edge_probability = j.at("edge_probability").get<double>();
    }
    if (j.contains("allow_cycles")) {
        if (!j.at("allow_cycles").is_boolean()) throw InputError("allow_cycles must be a boolean");
        cfg.allow_cycles = j.at("allow_cycles").get<bool>();
    }
    if (j.contains("path_semantics"))
        cfg.semantics = path_semantics_from_string(as_string(j.at("path_semantics"), "path_semantics"));
    validate_config(cfg);
    return cfg;
}

Json corpus_config_to_json(const CorpusConfig& cfg) {
    return Json{{"n_graphs", cfg.n_graphs},
                {"min_nodes", cfg.min_nodes},
                {"max_nodes", cfg.max_nodes},
                {"edge_probability", cfg.edge_probability},
                {"allow_cycles", cfg.allow_cycles},
                {"gamma_max", cfg.gamma_max},
                {"max_gamma", cfg.max_gamma},
                {"template_cap", cfg.template_cap},
                {"exhaustive_cap", cfg.exhaustive_cap},
                {"seed", cfg.seed},
                {"max_subset_size", cfg.max_subset_size},
                {"path_semantics", to_string(cfg.semantics)}};
}

Json soundness_to_json(const SoundnessReport& r) {
    Json cex = Json::array();
    for (const auto& c : r.counterexamples)
        cex.push_back({{"graph_index", c.graph_index},
                       {"scg", scg_to_json(c.graph)},
                       {"query", query_to_json(c.graph, c.query)},
                       {"set", set_to_json(c.graph, c.set)},
                       {"label", c.label},
                       {"item", c.item},
                       {"failing_template", template_to_json(c.failing_template)}});
    return Json{{"config", corpus_config_to_json(r.config)},
                {"graphs_tested", r.graphs_tested},
                {"graphs_skipped_over_cap", r.graphs_skipped_over_cap},
                {"queries", r.queries},
                {"queries_not_identifiable", r.queries_not_identifiable},
                {"sets_checked", r.sets_checked},
                {"sets_sound", r.sets_sound},
                {"unstable_checks", r.unstable_checks},
                {"baselines_checked", r.baselines_checked},
                {"baselines_valid", r.baselines_valid},
                {"condition_c_mismatches", r.condition_c_mismatches},
                {"counterexample_count", r.counterexamples.size()},
                {"counterexamples", cex}};
}

std::string soundness_to_csv(const SoundnessReport& r) {
    std::ostringstream os;
    os << "graph,gamma,nodes,edges,verdict,skipped_over_cap,exhaustive,compatible_templates,"
          "densest_templates,sets_checked,sets_sound\n";
    for (const auto& g : r.records)
        os << g.index << ',' << g.gamma << ',' << g.node_count << ',' << g.edge_count << ',' << g.verdict << ','
           << g.skipped_over_cap << ',' << g.exhaustive << ',' << g.compatible_templates << ','
           << g.densest_templates << ',' << g.sets_checked << ',' << g.sets_sound << '\n';
    return os.str();
}

Json probe_to_json(const Scg& g, const MicroQuery& q, const ProbeResult& r) {
    Json missed = Json::array();
    for (const auto& s : r.missed) missed.push_back(set_to_json(g, s));
    return Json{{"query", query_to_json(g, q)},
                {"verdict", to_string(identify(g, q).kind)},
                {"exhaustive_scan", r.exhaustive_scan},
                {"sets_scanned", r.sets_scanned},
                {"common_backdoor_sets", r.common_valid},
                {"criterion_accepted", r.criterion_accepted},
                {"missed_count", r.missed.size()},
                {"missed", missed}};
}

Json model_to_json(const LinearModel& m) {
    const auto& g = m.tmpl.scg;
    Json coefs = Json::array();
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const auto& e = g.edges()[i];
        for (const auto& c : m.coefficients[i])
            coefs.push_back({{"edge", {g.name(e.source), g.name(e.target)}}, {"lag", c.lag}, {"value", c.value}});
    }
    Json noise = Json::object();
    for (NodeIndex v = 0; v < g.size(); ++v) noise[g.name(v)] = m.noise_sd[v];
    return Json{{"template", template_to_json(m.tmpl)},
                {"coefficients", coefs},
                {"noise_sd", noise},
                {"spectral_radius", spectral_radius(m)}};
}

Json variance_to_json(const Scg& g, const VarianceReport& r) {
    Json sets = Json::array();
    for (const auto& s : r.sets)
        sets.push_back({{"name", s.name},
                        {"set", set_to_json(g, s.set)},
                        {"mean", s.mean},
                        {"variance", s.variance},
                        {"bias", s.bias},
                        {"mean_se", s.mean_se}});
    return Json{{"true_effect", r.true_effect}, {"n", r.n}, {"reps", r.reps}, {"seed", r.seed}, {"sets", sets}};
}

Json ordering_to_json(const Scg& g, const OrderingReport& r) {
    Json blocks = Json::array();
    for (const auto& b : r.blocks) {
        auto j = variance_to_json(g, b.report);
        for (std::size_t s = 0; s < b.variance_ratio.size(); ++s)
            j["sets"][s]["reference_variance_ratio"] = b.variance_ratio[s];
        j["model"] = model_to_json(b.model);
        blocks.push_back(j);
    }
    return Json{{"reference", r.reference},
                {"slack", r.slack},
                {"per_block_ordering", r.per_block_ordering},
                {"aggregate_ordering", r.aggregate_ordering},
                {"strict_fraction", r.strict_fraction},
                {"unbiased", r.unbiased},
                {"blocks", blocks}};
}

std::string dataset_to_csv(const Dataset& d) {
    std::ostringstream os;
    os.precision(17);
    os << "replicate,time,series,value\n";
    for (std::size_t r = 0; r < d.replicates; ++r)
        for (std::size_t t = 0; t < d.horizon; ++t)
            for (std::size_t s = 0; s < d.series; ++s)
                os << r << ',' << t << ',' << d.names[s] << ',' << d.at(r, t, s) << '\n';
    return os.str();
}

}  // namespace scgadj
