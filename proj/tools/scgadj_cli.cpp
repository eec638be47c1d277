// scgadj command-line front end. Talks to the library only through the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "scgadj/scgadj.h"

namespace {

using Json = nlohmann::ordered_json;

struct InputFailure {
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFailure{"cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// "@file" reads the literal from a file.
std::string literal_or_file(const std::string& s) { return !s.empty() && s[0] == '@' ? read_file(s.substr(1)) : s; }

struct GraphHandle {
    scgadj_graph* g = nullptr;
    ~GraphHandle() { scgadj_graph_free(g); }
};

struct Common {
    std::string graph;
    std::string treatment;
    std::string outcome;
    int gamma = 0;
    int gamma_max = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::string format = "json";
};

std::size_t default_template_cap() {
    if (const char* env = std::getenv("SCGADJ_TEMPLATE_CAP")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
        throw InputFailure{"SCGADJ_TEMPLATE_CAP must be a positive integer"};
    }
    return 50;
}

scgadj_format parse_format(const std::string& f) {
    if (f == "json") return SCGADJ_FORMAT_JSON;
    if (f == "csv") return SCGADJ_FORMAT_CSV;
    if (f == "text") return SCGADJ_FORMAT_TEXT;
    throw InputFailure{"--format must be json, csv or text"};
}

void load_graph(const Common& c, GraphHandle& h) {
    if (c.graph.empty()) throw InputFailure{"--graph is required"};
    const auto text = read_file(c.graph);
    if (scgadj_graph_from_json(text.c_str(), &h.g) != SCGADJ_OK)
        throw InputFailure{c.graph + ": " + scgadj_last_error()};
}

std::string query_json(const Common& c) {
    if (c.treatment.empty() || c.outcome.empty()) throw InputFailure{"--treatment and --outcome are required"};
    return Json{{"treatment", c.treatment}, {"outcome", c.outcome}, {"gamma", c.gamma}, {"gamma_max", c.gamma_max}}
        .dump();
}

void write_output(const Common& c, const char* text) {
    if (!text) return;
    if (c.out.empty()) {
        std::fputs(text, stdout);
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw InputFailure{"cannot write " + c.out};
    f << text;
}

// Writes the report (if any), reports the failure and returns the exit code.
int finish(const Common& c, scgadj_status st, char* report) {
    std::unique_ptr<char, decltype(&scgadj_string_free)> owned(report, scgadj_string_free);
    write_output(c, report);
    if (st != SCGADJ_OK) {
        const std::string msg = scgadj_last_error();
        std::cerr << "scgadj: " << scgadj_status_name(st) << (msg.empty() ? "" : ": " + msg) << "\n";
    }
    return static_cast<int>(st);
}

void add_common(CLI::App* cmd, Common& c, bool query) {
    cmd->add_option("--graph", c.graph, "SCG JSON file");
    if (query) {
        cmd->add_option("--treatment", c.treatment, "Treatment series");
        cmd->add_option("--outcome", c.outcome, "Outcome series");
        cmd->add_option("--gamma", c.gamma, "Lag between treatment and outcome")->capture_default_str();
        cmd->add_option("--gamma-max", c.gamma_max, "Maximal lag")->capture_default_str();
    }
    cmd->add_option("--out", c.out, "Output file (default: standard output)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Identifiability and back-door adjustment on summary causal graphs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(scgadj_version()));
    Common c;

    auto* identify = app.add_subcommand("identify", "Decide identifiability by adjustment");
    add_common(identify, c, true);

    std::string set_literal;
    auto* check = app.add_subcommand("check", "Check a set against the SCG-back-door criterion");
    add_common(check, c, true);
    check->add_option("--set", set_literal, "Set literal [[\"W\",0],[\"W\",-1]] or @file")->required();

    auto* sets = app.add_subcommand("sets", "Canonical adjustment sets");
    add_common(sets, c, true);

    auto* qopt = app.add_subcommand("qopt", "Quasi-optimal adjustment set and estimand");
    add_common(qopt, c, true);

    std::string template_file;
    int lo = -2, hi = 0;
    bool densest = false;
    std::optional<std::size_t> cap_flag;
    auto* unroll = app.add_subcommand("unroll", "Unroll a template, or list the compatible templates of --graph");
    add_common(unroll, c, false);
    unroll->add_option("--template", template_file, "Template JSON file");
    unroll->add_option("--lo", lo, "Earliest offset")->capture_default_str();
    unroll->add_option("--hi", hi, "Latest offset")->capture_default_str();
    unroll->add_option("--gamma-max", c.gamma_max, "Maximal lag when listing templates")->capture_default_str();
    unroll->add_flag("--densest", densest, "List only the densest templates");
    unroll->add_option("--template-cap", cap_flag, "Template cap (default SCGADJ_TEMPLATE_CAP or 50)");
    unroll->add_option("--format", c.format, "json or text")->capture_default_str();

    Json corpus = Json::object();
    std::size_t n_graphs = 200;
    int min_nodes = 5, max_nodes = 6, max_gamma = 1, max_subset = 5;
    double edge_prob = 0.3;
    bool acyclic = false;
    std::string semantics = "walk";
    unsigned threads = 0;
    auto* validate = app.add_subcommand("validate", "Soundness experiment on a seeded random corpus");
    validate->add_option("--n-graphs", n_graphs)->capture_default_str();
    std::uint64_t corpus_seed = 7;
    validate->add_option("--seed", corpus_seed, "Corpus seed")->capture_default_str();
    validate->add_option("--min-nodes", min_nodes)->capture_default_str();
    validate->add_option("--max-nodes", max_nodes)->capture_default_str();
    validate->add_option("--edge-prob", edge_prob)->capture_default_str();
    validate->add_flag("--acyclic", acyclic, "Only self-loops as cycles");
    validate->add_option("--gamma-max", c.gamma_max)->capture_default_str();
    validate->add_option("--max-gamma", max_gamma, "Query every gamma up to this")->capture_default_str();
    validate->add_option("--template-cap", cap_flag, "Densest-template cap (default SCGADJ_TEMPLATE_CAP or 50)");
    validate->add_option("--max-subset", max_subset, "Largest candidate subset size")->capture_default_str();
    validate->add_option("--path-semantics", semantics, "walk or simple")->capture_default_str();
    validate->add_option("--threads", threads, "0 = all cores")->capture_default_str();
    validate->add_option("--out", c.out);
    validate->add_option("--format", c.format, "json or csv")->capture_default_str();

    std::size_t max_vars = 16;
    auto* probe = app.add_subcommand("probe", "Common back-door sets the criterion rejects");
    add_common(probe, c, true);
    probe->add_option("--template-cap", cap_flag);
    probe->add_option("--max-variables", max_vars, "Scan every subset up to this pool size")->capture_default_str();
    probe->add_option("--max-subset", max_subset, "Subset size bound above the pool size")->capture_default_str();

    std::size_t n = 10000, reps = 200, blocks = 1, burn_in = 50, horizon = 0;
    bool dataset = false;
    std::string sets_literal, reference;
    auto* simulate = app.add_subcommand("simulate", "Linear-Gaussian variance experiment");
    add_common(simulate, c, true);
    simulate->add_option("--seed", c.seed)->capture_default_str();
    simulate->add_option("--template", template_file, "Template JSON file (default: first densest)");
    simulate->add_option("--n", n, "Replicates per dataset")->capture_default_str();
    simulate->add_option("--reps", reps, "Datasets per block")->capture_default_str();
    simulate->add_option("--blocks", blocks, "Seed blocks, one model each")->capture_default_str();
    simulate->add_option("--burn-in", burn_in)->capture_default_str();
    simulate->add_option("--sets", sets_literal, "{\"name\": [[\"W\",0]], ...} or @file");
    simulate->add_option("--reference", reference, "Set expected to have the smallest variance");
    simulate->add_flag("--dataset", dataset, "Emit one dataset as CSV instead");
    simulate->add_option("--horizon", horizon, "Dataset horizon with --dataset");
    simulate->add_option("--threads", threads)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : SCGADJ_INPUT_ERROR;
    }

    try {
        GraphHandle h;
        char* report = nullptr;
        const auto sub = app.get_subcommands().front();
        const auto cap = cap_flag ? *cap_flag : default_template_cap();

        if (sub == identify || sub == sets || sub == qopt) {
            load_graph(c, h);
            const auto q = query_json(c);
            scgadj_status st;
            if (sub == identify)
                st = scgadj_identify(h.g, q.c_str(), &report);
            else if (sub == sets)
                st = scgadj_sets(h.g, q.c_str(), &report);
            else
                st = scgadj_qopt(h.g, q.c_str(), &report);
            return finish(c, st, report);
        }
        if (sub == check) {
            load_graph(c, h);
            const auto q = query_json(c);
            const auto z = literal_or_file(set_literal);
            const auto st = scgadj_check(h.g, q.c_str(), z.c_str(), &report);
            if (st == SCGADJ_OK && report) {
                const auto j = Json::parse(report);
                std::cerr << "accepted under item " << j["item"].get<std::string>() << "\n";
            }
            return finish(c, st, report);
        }
        if (sub == unroll) {
            const auto fmt = parse_format(c.format);
            if (!template_file.empty()) {
                const auto t = read_file(template_file);
                const auto st = scgadj_unroll(t.c_str(), lo, hi, fmt, &report);
            return finish(c, st, report);
            }
            load_graph(c, h);
            const auto st = scgadj_templates(h.g, c.gamma_max, cap, densest ? 1 : 0, &report);
            return finish(c, st, report);
        }
        if (sub == validate) {
            corpus = {{"n_graphs", n_graphs},   {"min_nodes", min_nodes},       {"max_nodes", max_nodes},
                      {"edge_probability", edge_prob}, {"allow_cycles", !acyclic}, {"gamma_max", c.gamma_max},
                      {"max_gamma", max_gamma}, {"template_cap", cap},          {"seed", corpus_seed},
                      {"max_subset_size", max_subset}, {"path_semantics", semantics}, {"threads", threads}};
            const auto cfg = corpus.dump();
            const auto st = scgadj_validate(cfg.c_str(), parse_format(c.format), &report);
            return finish(c, st, report);
        }
        if (sub == probe) {
            load_graph(c, h);
            const auto q = query_json(c);
            const auto opts =
                Json{{"template_cap", cap}, {"max_variables", max_vars}, {"max_subset_size", max_subset}}.dump();
            const auto st = scgadj_probe(h.g, q.c_str(), opts.c_str(), &report);
            return finish(c, st, report);
        }
        if (sub == simulate) {
            load_graph(c, h);
            const auto q = query_json(c);
            Json opts{{"seed", c.seed}, {"n", n},           {"reps", reps},
                      {"blocks", blocks}, {"burn_in", burn_in}, {"threads", threads}};
            if (!template_file.empty()) opts["template"] = Json::parse(read_file(template_file));
            if (!sets_literal.empty()) opts["sets"] = Json::parse(literal_or_file(sets_literal));
            if (!reference.empty()) opts["reference"] = reference;
            if (dataset) opts["dataset"] = true;
            if (horizon > 0) opts["horizon"] = horizon;
            const auto text = opts.dump();
            const auto st = scgadj_simulate(h.g, q.c_str(), text.c_str(), &report);
            return finish(c, st, report);
        }
        return SCGADJ_INTERNAL;
    } catch (const InputFailure& e) {
        std::cerr << "scgadj: input error: " << e.message << "\n";
        return SCGADJ_INPUT_ERROR;
    } catch (const Json::exception& e) {
        std::cerr << "scgadj: input error: " << e.what() << "\n";
        return SCGADJ_INPUT_ERROR;
    } catch (const std::exception& e) {
        std::cerr << "scgadj: internal error: " << e.what() << "\n";
        return SCGADJ_INTERNAL;
    }
}
