#ifndef SCGADJ_H
#define SCGADJ_H

/*
 * C interface of libscgadj: identifiability and back-door adjustment on
 * summary causal graphs of time series.
 *
 * Inputs and outputs are UTF-8 JSON text (formats in README.md). Functions
 * returning char** hand ownership to the caller; release with
 * scgadj_string_free. On any status other than SCGADJ_OK the output pointer
 * is left NULL unless documented otherwise, and scgadj_last_error() describes
 * the failure. Error messages are per thread.
 */

#include <stdint.h>

#if defined(_WIN32)
#  if defined(SCGADJ_BUILDING)
#    define SCGADJ_API __declspec(dllexport)
#  else
#    define SCGADJ_API __declspec(dllimport)
#  endif
#else
#  define SCGADJ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum scgadj_status {
  SCGADJ_OK = 0,
  SCGADJ_INTERNAL = 1,
  SCGADJ_NOT_IDENTIFIABLE = 2,
  SCGADJ_SET_REJECTED = 3,
  SCGADJ_INPUT_ERROR = 4,
  SCGADJ_OVER_CAP = 5,
  /* validate found a criterion-passing set that is not a common back-door set */
  SCGADJ_COUNTEREXAMPLE = 6
} scgadj_status;

typedef enum scgadj_format {
  SCGADJ_FORMAT_JSON = 0,
  SCGADJ_FORMAT_CSV = 1,
  SCGADJ_FORMAT_TEXT = 2
} scgadj_format;

typedef struct scgadj_graph scgadj_graph;

SCGADJ_API const char* scgadj_version(void);
SCGADJ_API const char* scgadj_last_error(void);
SCGADJ_API const char* scgadj_status_name(scgadj_status status);
SCGADJ_API void scgadj_string_free(char* s);

/* {"nodes": [...], "edges": [[src, dst], ...]} */
SCGADJ_API scgadj_status scgadj_graph_from_json(const char* json, scgadj_graph** out);
SCGADJ_API void scgadj_graph_free(scgadj_graph* g);
SCGADJ_API scgadj_status scgadj_graph_to_json(const scgadj_graph* g, char** out);

/*
 * query_json: {"treatment": "X", "outcome": "Y", "gamma": 1, "gamma_max": 1}.
 * Returns SCGADJ_NOT_IDENTIFIABLE (with the report still written) when no
 * condition holds.
 */
SCGADJ_API scgadj_status scgadj_identify(const scgadj_graph* g, const char* query_json, char** report);

/*
 * set_json: [["W", 0], ["W", -1]], offsets relative to the outcome time.
 * Returns SCGADJ_SET_REJECTED (report still written) when the criterion fails.
 */
SCGADJ_API scgadj_status scgadj_check(const scgadj_graph* g, const char* query_json,
                                      const char* set_json, char** report);

/* Canonical sets (qopt, a1, a2, per-item cores). */
SCGADJ_API scgadj_status scgadj_sets(const scgadj_graph* g, const char* query_json, char** report);

/* Quasi-optimal set with its estimand. */
SCGADJ_API scgadj_status scgadj_qopt(const scgadj_graph* g, const char* query_json, char** report);

/*
 * Compatible templates of g ({"templates": [...], "count": n}); SCGADJ_OVER_CAP
 * when more than cap exist. densest != 0 lists only the densest templates.
 */
SCGADJ_API scgadj_status scgadj_templates(const scgadj_graph* g, int gamma_max, uint64_t cap,
                                          int densest, char** report);

/* Unrolling of a template over [lo, hi]; JSON or TEXT edge list. */
SCGADJ_API scgadj_status scgadj_unroll(const char* template_json, int lo, int hi,
                                       scgadj_format format, char** out);

/*
 * Soundness experiment on a random corpus. config_json may be NULL or an
 * object overriding any of: n_graphs, min_nodes, max_nodes, edge_probability,
 * allow_cycles, gamma_max, max_gamma, template_cap, exhaustive_cap, seed,
 * max_subset_size, path_semantics ("walk" | "simple"), threads.
 * Returns SCGADJ_COUNTEREXAMPLE (report still written) when any exists.
 */
SCGADJ_API scgadj_status scgadj_validate(const char* config_json, scgadj_format format, char** report);

/*
 * Common back-door sets of one query that the criterion rejects.
 * options_json may be NULL or {"template_cap": 50, "max_variables": 16,
 * "max_subset_size": 5}.
 */
SCGADJ_API scgadj_status scgadj_probe(const scgadj_graph* g, const char* query_json,
                                      const char* options_json, char** report);

/*
 * Linear-Gaussian simulation on a template of g. options_json keys:
 * "template" (template JSON; default: first densest template),
 * "seed", "n", "reps", "blocks", "burn_in", "threads", "sets"
 * (object name -> set; default qopt, a1, a2) and "dataset" (true: emit one
 * generated dataset of n replicates as CSV instead of the experiment report).
 */
SCGADJ_API scgadj_status scgadj_simulate(const scgadj_graph* g, const char* query_json,
                                         const char* options_json, char** report);

#ifdef __cplusplus
}
#endif

#endif
