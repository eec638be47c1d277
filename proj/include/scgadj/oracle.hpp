#pragma once

// Seeded random SCG corpora and brute-force cross-checks of the criterion
// against the classical back-door criterion in compatible templates.

#include <cstdint>
#include <string>
#include <vector>

#include "scgadj/identify.hpp"

namespace scgadj {

struct CorpusConfig {
    std::size_t n_graphs = 200;
    int min_nodes = 5;
    int max_nodes = 6;
    double edge_probability = 0.3;
    bool allow_cycles = true;
    int gamma_max = 1;
    /// Every gamma in [0, max_gamma] is queried per graph.
    int max_gamma = 1;
    /// Graphs with more densest templates than this are skipped.
    std::size_t template_cap = 50;
    /// Validity is checked in every compatible template up to this many,
    /// otherwise in the densest templates.
    std::size_t exhaustive_cap = 256;
    std::uint64_t seed = 7;
    int max_subset_size = 5;
    PathSemantics semantics = PathSemantics::Walk;
    /// 0 = hardware concurrency.
    unsigned threads = 0;
};

/// Throws InputError when the configuration violates its invariants.
void validate_config(const CorpusConfig& cfg);

/// Deterministic per (cfg.seed, index). Self-loops are drawn like any other
/// ordered pair; with allow_cycles = false only edges consistent with a random
/// node order are kept, so the only cycles left are self-loops.
Scg random_scg(const CorpusConfig& cfg, std::size_t index);

/// Treatment/outcome pair drawn for a corpus graph: uniform over ancestor pairs
/// when one exists, otherwise uniform over all ordered pairs.
std::pair<NodeIndex, NodeIndex> random_pair(const CorpusConfig& cfg, std::size_t index, const Scg& g);

/// Templates against which validity is judged: every compatible template when
/// there are at most exhaustive_cap of them, otherwise the densest ones. Any
/// compatible template is a subgraph of a densest one, and back-door validity
/// is inherited by subgraphs, so both choices decide the same question.
struct TemplateSet {
    std::vector<FtDagTemplate> templates;
    bool exhaustive = false;
    std::size_t compatible_count = 0;  // saturating
    std::size_t densest_count = 0;
};

/// Throws OverCapError when even the densest templates exceed densest_cap.
TemplateSet validity_templates(const Scg& g, int gamma_max, std::size_t exhaustive_cap,
                               std::size_t densest_cap);

/// True iff z passes the classical back-door check in every compatible
/// template. Throws OverCapError above cap.
bool common_backdoor_valid(const Scg& g, const MicroQuery& q, const TemporalSet& z, std::size_t cap);

struct Counterexample {
    std::size_t graph_index = 0;
    Scg graph;
    MicroQuery query;
    TemporalSet set;
    std::string label;
    std::string item;
    FtDagTemplate failing_template;
};

struct GraphRecord {
    std::size_t index = 0;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    NodeIndex treatment = 0;
    NodeIndex outcome = 0;
    int gamma = 0;
    std::string verdict;
    bool skipped_over_cap = false;
    bool exhaustive = false;
    std::size_t compatible_templates = 0;  // saturating at exhaustive_cap + 1
    std::size_t densest_templates = 0;
    std::size_t candidates_scanned = 0;
    std::size_t sets_checked = 0;
    std::size_t sets_sound = 0;
    std::size_t unstable_checks = 0;
    std::size_t baselines_checked = 0;
    std::size_t baselines_valid = 0;
};

struct SoundnessReport {
    CorpusConfig config;
    std::size_t graphs_tested = 0;
    std::size_t graphs_skipped_over_cap = 0;
    std::size_t queries = 0;
    std::size_t queries_not_identifiable = 0;
    std::size_t sets_checked = 0;
    std::size_t sets_sound = 0;
    std::size_t unstable_checks = 0;
    std::size_t baselines_checked = 0;
    std::size_t baselines_valid = 0;
    /// Ordered pairs (gamma = 1) where the two forms of condition C disagree.
    std::size_t condition_c_mismatches = 0;
    std::vector<Counterexample> counterexamples;
    std::vector<GraphRecord> records;
};

/// When drop_descendant_check is set the criterion ignores D n Z = {}; used
/// only to show that the harness catches a broken checker.
SoundnessReport soundness_experiment(const CorpusConfig& cfg, bool drop_descendant_check = false);

struct ProbeResult {
    std::size_t sets_scanned = 0;
    std::size_t common_valid = 0;
    std::size_t criterion_accepted = 0;
    /// Common back-door sets the criterion rejects.
    std::vector<TemporalSet> missed;
    bool exhaustive_scan = false;
};

/// Scans subsets of the window variables outside D (all of them when there
/// are at most max_variables, otherwise up to max_subset_size) and reports the
/// common back-door sets the criterion rejects.
ProbeResult completeness_probe(const Scg& g, const MicroQuery& q, std::size_t template_cap,
                               std::size_t max_variables = 16, int max_subset_size = 5);

struct ProbeRecord {
    std::size_t index = 0;
    std::string verdict;
    bool skipped = false;
    ProbeResult result;
};

/// Probe over a random corpus (one query per graph and gamma).
std::vector<ProbeRecord> completeness_probe_corpus(const CorpusConfig& cfg);

/// Candidate subsets of `pool` with at most k members, in size-then-lexicographic order.
std::vector<TemporalSet> subsets_up_to(const std::vector<TemporalVar>& pool, int k);

}  // namespace scgadj
