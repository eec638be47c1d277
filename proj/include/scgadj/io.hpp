#pragma once

// JSON / CSV / edge-list encodings of graphs, templates, queries, sets and
// reports. Parsing errors surface as InputError.

#include <string>

#include <json.hpp>

#include "scgadj/identify.hpp"
#include "scgadj/oracle.hpp"
#include "scgadj/simulate.hpp"

namespace scgadj {

using Json = nlohmann::ordered_json;

/// Parses text, mapping syntax errors to InputError.
Json parse_json(const std::string& text);

/// {"nodes": [...], "edges": [[src, dst], ...]}
Scg scg_from_json(const Json& j);
Json scg_to_json(const Scg& g);

/// {"scg": ..., "gamma_max": k, "lags": [{"edge": [src, dst], "set": [0, 1]}, ...]}
FtDagTemplate template_from_json(const Json& j);
Json template_to_json(const FtDagTemplate& t);

/// {"treatment": "X", "outcome": "Y", "gamma": 1, "gamma_max": 1}; gamma and
/// gamma_max default to 0 and 1.
MicroQuery query_from_json(const Scg& g, const Json& j);
Json query_to_json(const Scg& g, const MicroQuery& q);

/// [["W", 0], ["W", -1], ...]
TemporalSet set_from_json(const Scg& g, const Json& j);
Json set_to_json(const Scg& g, const TemporalSet& s);

Json verdict_to_json(const Scg& g, const MicroQuery& q, const Verdict& v);
Json report_to_json(const Scg& g, const MicroQuery& q, const TemporalSet& z, const CriterionReport& r);
Json named_sets_to_json(const Scg& g, const MicroQuery& q, const NamedSets& sets);

/// "X@-1 -> Y@0" per line, sorted.
std::string unrolled_edge_list(const UnrolledGraph& u, const Scg& g);
Json unrolled_to_json(const UnrolledGraph& u, const Scg& g);

CorpusConfig corpus_config_from_json(const Json& j, CorpusConfig base = {});
Json corpus_config_to_json(const CorpusConfig& cfg);
Json soundness_to_json(const SoundnessReport& r);
/// One row per (graph, gamma).
std::string soundness_to_csv(const SoundnessReport& r);

Json probe_to_json(const Scg& g, const MicroQuery& q, const ProbeResult& r);

Json model_to_json(const LinearModel& m);
Json variance_to_json(const Scg& g, const VarianceReport& r);
Json ordering_to_json(const Scg& g, const OrderingReport& r);
/// replicate,time,series,value
std::string dataset_to_csv(const Dataset& d);

PathSemantics path_semantics_from_string(const std::string& s);
const char* to_string(PathSemantics s);

}  // namespace scgadj
