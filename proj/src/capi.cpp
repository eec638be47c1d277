#include "scgadj/scgadj.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "scgadj/io.hpp"

struct scgadj_graph {
    scgadj::Scg scg;
};

namespace {

using namespace scgadj;

thread_local std::string last_error;

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void emit(const Json& j, char** out) { *out = dup(j.dump(2) + "\n"); }

// Runs body, mapping exceptions to status codes and recording the message.
template <class Body>
scgadj_status guarded(char** out, Body&& body) {
    if (out) *out = nullptr;
    last_error.clear();
    try {
        return body();
    } catch (const OverCapError& e) {
        last_error = std::string(e.what()) + " (at least " + std::to_string(e.count()) + ")";
        return SCGADJ_OVER_CAP;
    } catch (const InputError& e) {
        last_error = e.what();
        return SCGADJ_INPUT_ERROR;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return SCGADJ_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return SCGADJ_INTERNAL;
    } catch (...) {
        last_error = "unknown error";
        return SCGADJ_INTERNAL;
    }
}

void require(const void* p, const char* what) {
    if (!p) throw InputError(std::string(what) + " must not be NULL");
}

Json parse_optional(const char* text) {
    if (!text || !*text) return Json::object();
    auto j = parse_json(text);
    if (!j.is_object()) throw InputError("options must be a JSON object");
    return j;
}

std::uint64_t get_u64(const Json& j, const char* key, std::uint64_t fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 0)
        throw InputError(std::string(key) + " must be a non-negative integer");
    return j.at(key).get<std::uint64_t>();
}

}  // namespace

extern "C" {

const char* scgadj_version(void) { return "0.1.0"; }

const char* scgadj_last_error(void) { return last_error.c_str(); }

const char* scgadj_status_name(scgadj_status status) {
    switch (status) {
        case SCGADJ_OK: return "ok";
        case SCGADJ_INTERNAL: return "internal error";
        case SCGADJ_NOT_IDENTIFIABLE: return "not identifiable";
        case SCGADJ_SET_REJECTED: return "set rejected";
        case SCGADJ_INPUT_ERROR: return "input error";
        case SCGADJ_OVER_CAP: return "over cap";
        case SCGADJ_COUNTEREXAMPLE: return "counterexample found";
    }
    return "unknown status";
}

void scgadj_string_free(char* s) { std::free(s); }

scgadj_status scgadj_graph_from_json(const char* json, scgadj_graph** out) {
    if (out) *out = nullptr;
    return guarded(nullptr, [&] {
        require(json, "json");
        require(out, "out");
        *out = new scgadj_graph{scg_from_json(parse_json(json))};
        return SCGADJ_OK;
    });
}

void scgadj_graph_free(scgadj_graph* g) { delete g; }

scgadj_status scgadj_graph_to_json(const scgadj_graph* g, char** out) {
    return guarded(out, [&] {
        require(g, "graph");
        require(out, "out");
        emit(scg_to_json(g->scg), out);
        return SCGADJ_OK;
    });
}

scgadj_status scgadj_identify(const scgadj_graph* g, const char* query_json, char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(query_json, "query");
        require(report, "report");
        const auto q = query_from_json(g->scg, parse_json(query_json));
        const auto v = identify(g->scg, q);
        emit(verdict_to_json(g->scg, q, v), report);
        return v.kind == VerdictKind::NotIdentifiable ? SCGADJ_NOT_IDENTIFIABLE : SCGADJ_OK;
    });
}

scgadj_status scgadj_check(const scgadj_graph* g, const char* query_json, const char* set_json,
                           char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(query_json, "query");
        require(set_json, "set");
        require(report, "report");
        const auto q = query_from_json(g->scg, parse_json(query_json));
        const auto z = set_from_json(g->scg, parse_json(set_json));
        const auto r = scg_backdoor_check(g->scg, q, z);
        emit(report_to_json(g->scg, q, z, r), report);
        if (!r.satisfied) last_error = r.violations.empty() ? "set rejected" : r.violations.front();
        return r.satisfied ? SCGADJ_OK : SCGADJ_SET_REJECTED;
    });
}

scgadj_status scgadj_sets(const scgadj_graph* g, const char* query_json, char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(query_json, "query");
        require(report, "report");
        const auto q = query_from_json(g->scg, parse_json(query_json));
        if (identify(g->scg, q).kind == VerdictKind::NotIdentifiable) {
            last_error = "effect is not identifiable by adjustment";
            return SCGADJ_NOT_IDENTIFIABLE;
        }
        emit(named_sets_to_json(g->scg, q, canonical_sets(g->scg, q)), report);
        return SCGADJ_OK;
    });
}

scgadj_status scgadj_qopt(const scgadj_graph* g, const char* query_json, char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(query_json, "query");
        require(report, "report");
        const auto q = query_from_json(g->scg, parse_json(query_json));
        const auto v = identify(g->scg, q);
        if (v.kind == VerdictKind::NotIdentifiable) {
            last_error = "effect is not identifiable by adjustment";
            return SCGADJ_NOT_IDENTIFIABLE;
        }
        const auto z = v.kind == VerdictKind::NonAncestor ? TemporalSet{} : qopt(g->scg, q);
        const auto e = estimand(g->scg, q, z);
        emit(Json{{"query", query_to_json(g->scg, q)},
                  {"verdict", to_string(v.kind)},
                  {"qopt", set_to_json(g->scg, z)},
                  {"estimand", e.formula},
                  {"summed_over", e.summed_over}},
             report);
        return SCGADJ_OK;
    });
}

scgadj_status scgadj_templates(const scgadj_graph* g, int gamma_max, uint64_t cap, int densest,
                               char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(report, "report");
        if (gamma_max < 1 || gamma_max > kMaxLag) throw InputError("gamma_max out of range");
        const auto e = densest ? densest_templates(g->scg, gamma_max, cap)
                               : enumerate_compatible_templates(g->scg, gamma_max, cap);
        if (e.over_cap) throw OverCapError("template count exceeds cap " + std::to_string(cap), e.count);
        Json ts = Json::array();
        for (const auto& t : e.templates) ts.push_back(template_to_json(t));
        emit(Json{{"densest_only", densest != 0}, {"count", e.count}, {"templates", ts}}, report);
        return SCGADJ_OK;
    });
}

scgadj_status scgadj_unroll(const char* template_json, int lo, int hi, scgadj_format format, char** out) {
    return guarded(out, [&] {
        require(template_json, "template");
        require(out, "out");
        if (lo > hi) throw InputError("window lower bound exceeds upper bound");
        if (hi - lo > 10000) throw InputError("window too long");
        const auto t = template_from_json(parse_json(template_json));
        const UnrolledGraph u(t, lo, hi);
        if (format == SCGADJ_FORMAT_TEXT)
            *out = dup(unrolled_edge_list(u, t.scg));
        else if (format == SCGADJ_FORMAT_JSON)
            emit(unrolled_to_json(u, t.scg), out);
        else
            throw InputError("unroll supports json and text output");
        return SCGADJ_OK;
    });
}

scgadj_status scgadj_validate(const char* config_json, scgadj_format format, char** report) {
    return guarded(report, [&] {
        require(report, "report");
        const auto cfg = corpus_config_from_json(parse_optional(config_json));
        const auto r = soundness_experiment(cfg);
        if (format == SCGADJ_FORMAT_CSV)
            *report = dup(soundness_to_csv(r));
        else if (format == SCGADJ_FORMAT_JSON)
            emit(soundness_to_json(r), report);
        else
            throw InputError("validate supports json and csv output");
        if (r.counterexamples.empty()) return SCGADJ_OK;
        last_error = std::to_string(r.counterexamples.size()) + " counterexample(s) found";
        return SCGADJ_COUNTEREXAMPLE;
    });
}

scgadj_status scgadj_probe(const scgadj_graph* g, const char* query_json, const char* options_json,
                           char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(query_json, "query");
        require(report, "report");
        const auto q = query_from_json(g->scg, parse_json(query_json));
        const auto opts = parse_optional(options_json);
        const auto cap = get_u64(opts, "template_cap", 50);
        const auto vars = get_u64(opts, "max_variables", 16);
        const auto k = get_u64(opts, "max_subset_size", 5);
        if (cap == 0) throw InputError("template_cap must be positive");
        if (vars > 24 || k > 8) throw InputError("probe limits too large");
        const auto r = completeness_probe(g->scg, q, cap, vars, static_cast<int>(k));
        emit(probe_to_json(g->scg, q, r), report);
        return SCGADJ_OK;
    });
}

scgadj_status scgadj_simulate(const scgadj_graph* g, const char* query_json, const char* options_json,
                              char** report) {
    return guarded(report, [&] {
        require(g, "graph");
        require(query_json, "query");
        require(report, "report");
        const auto q = query_from_json(g->scg, parse_json(query_json));
        const auto opts = parse_optional(options_json);

        FtDagTemplate t;
        if (opts.contains("template")) {
            t = template_from_json(opts.at("template"));
            if (!(t.scg == g->scg)) throw InputError("template does not belong to the graph");
            if (t.gamma_max != q.gamma_max) throw InputError("template gamma_max differs from the query");
        } else {
            const auto dense = densest_templates(g->scg, q.gamma_max, 1);
            if (dense.templates.empty()) throw InputError("graph has no compatible template");
            t = dense.templates.front();
        }
        const auto seed = get_u64(opts, "seed", 1);
        const auto n = get_u64(opts, "n", 10000);
        const auto burn_in = get_u64(opts, "burn_in", 50);
        const auto threads = static_cast<unsigned>(get_u64(opts, "threads", 0));
        if (n < 1 || n > 10000000) throw InputError("n out of range");
        if (burn_in > 100000) throw InputError("burn_in out of range");

        if (opts.contains("dataset") && opts.at("dataset").is_boolean() && opts.at("dataset").get<bool>()) {
            const auto horizon = get_u64(opts, "horizon", static_cast<std::uint64_t>(q.gamma + q.gamma_max + 1));
            if (horizon < 1 || n * horizon > 50000000) throw InputError("dataset too large");
            const auto m = sample_linear_model(t, seed);
            *report = dup(dataset_to_csv(generate(m, n, horizon, burn_in, seed, threads)));
            return SCGADJ_OK;
        }

        NamedSets sets;
        if (opts.contains("sets")) {
            if (!opts.at("sets").is_object()) throw InputError("\"sets\" must be an object");
            for (const auto& [name, value] : opts.at("sets").items())
                sets.emplace_back(name, set_from_json(g->scg, value));
        } else {
            if (identify(g->scg, q).kind == VerdictKind::NotIdentifiable) {
                last_error = "effect is not identifiable by adjustment";
                return SCGADJ_NOT_IDENTIFIABLE;
            }
            for (auto& [name, s] : canonical_sets(g->scg, q))
                if (name == "qopt" || name == "a1" || name == "a2" || name == "empty") sets.emplace_back(name, s);
        }
        if (sets.empty()) throw InputError("no adjustment sets to compare");
        const auto reps = get_u64(opts, "reps", 200);
        const auto blocks = get_u64(opts, "blocks", 1);
        if (reps < 2 || reps > 100000) throw InputError("reps out of range");
        if (blocks < 1 || blocks > 1000) throw InputError("blocks out of range");
        std::string reference = sets.front().first;
        if (opts.contains("reference")) {
            if (!opts.at("reference").is_string()) throw InputError("reference must be a string");
            reference = opts.at("reference").get<std::string>();
        }
        const auto r = ordering_experiment(t, q, sets, reference, n, reps, blocks, seed, 0.10, burn_in, threads);
        auto j = ordering_to_json(g->scg, r);
        j["query"] = query_to_json(g->scg, q);
        emit(j, report);
        return SCGADJ_OK;
    });
}

}  // extern "C"
