#pragma once

// Identifiability verdicts, the SCG-back-door criterion, canonical adjustment
// sets and the per-template optimal set.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scgadj/unroll.hpp"

namespace scgadj {

enum class VerdictKind { NonAncestor, CondA, CondB, CondC, NotIdentifiable };

const char* to_string(VerdictKind k);

struct Verdict {
    VerdictKind kind = VerdictKind::NotIdentifiable;
    /// Scc(treatment); filled for every verdict.
    NodeSet treatment_scc;
    std::string explanation;
};

/// Throws InputError for out-of-range series, X == Y, negative gamma or a
/// gamma_max outside [1, kMaxLag].
void validate_query(const Scg& g, const MicroQuery& q);

Verdict identify(const Scg& g, const MicroQuery& q);

/// Condition C in its alternative form: gamma = 1, Scc(X) within {X, Y} and no
/// self-loop on Y. Only meaningful once conditions A and B have failed.
bool condition_c_alternative(const Scg& g, const MicroQuery& q);

/// Nodes on a simple directed path from x to y, x excluded.
NodeSet causal_nodes(const Scg& g, NodeIndex x, NodeIndex y);
/// Union of the SCCs of the causal nodes.
NodeSet extended_causal_nodes(const Scg& g, NodeIndex x, NodeIndex y);

/// How macro back-door paths are read when collecting ecnbd.
/// Walk: node repetitions allowed, matching the projection of time-expanded
/// paths. Simple: every node at most once.
enum class PathSemantics { Walk, Simple };

/// Members of ecn(x, y) lying on a macro back-door path from x to y (first
/// edge into x, last node y) whose colliders all belong to `collider_series`.
/// Under Simple, only nodes strictly between x and y are collected.
NodeSet backdoor_restricted_ecn(const Scg& g, NodeIndex x, NodeIndex y,
                                const NodeSet& collider_series,
                                PathSemantics semantics = PathSemantics::Walk);
NodeSet backdoor_restricted_ecn(const Scg& g, NodeIndex x, NodeIndex y, const TemporalSet& z2,
                                PathSemantics semantics = PathSemantics::Walk);

/// Series appearing in a temporal set.
NodeSet series_of(const TemporalSet& s);

/// [-(gamma + gamma_max), 0].
Window adjustment_window(const MicroQuery& q);

/// Possible descendants of X@-gamma inside the adjustment window.
TemporalSet treatment_possible_descendants(const Scg& g, const MicroQuery& q);

struct CriterionReport {
    bool satisfied = false;
    VerdictKind verdict = VerdictKind::NotIdentifiable;
    /// "A", "B", "C"; empty for NonAncestor / NotIdentifiable.
    std::string condition;
    /// "A.1" ... "B.2", "C"; empty unless satisfied under a condition.
    std::string item;
    TemporalSet required_core;
    /// Set only for A.3 / B.2.
    std::optional<std::pair<TemporalSet, TemporalSet>> partition;
    std::vector<std::string> violations;
};

/// Precomputes everything the criterion needs for one query so that many
/// candidate sets can be checked cheaply. Immutable after construction.
class CriterionContext {
public:
    CriterionContext(Scg g, MicroQuery q, PathSemantics semantics = PathSemantics::Walk);

    const Scg& graph() const { return g_; }
    const MicroQuery& query() const { return q_; }
    const Verdict& verdict() const { return verdict_; }
    Window window() const { return window_; }
    const TemporalSet& possible_descendants() const { return d_; }
    /// D plus Y@0: the outcome is never an adjustment variable, even when
    /// X@-gamma cannot reach it in any template.
    const TemporalSet& excluded() const { return excluded_; }
    bool treatment_on_cycle() const { return x_cycle_; }

    /// Mandated cores P \ D of the items that apply to the verdict, in
    /// document order. For A.3 / B.2 the entry is Z1 with Z2 empty.
    const std::vector<std::pair<std::string, TemporalSet>>& item_cores() const { return cores_; }

    /// Z1 mandated by a given set of Z2 series (A.3 / B.2).
    TemporalSet required_z1(const NodeSet& z2_series) const;

    /// Throws InputError for unknown series or offsets outside the window.
    CriterionReport check(const TemporalSet& z) const;

    /// Quasi-optimal set; throws InputError unless the verdict is CondA/B/C.
    TemporalSet qopt() const;

private:
    std::optional<std::pair<TemporalSet, TemporalSet>> find_partition(const TemporalSet& z) const;

    Scg g_;
    MicroQuery q_;
    PathSemantics semantics_;
    Verdict verdict_;
    Window window_;
    TemporalSet d_;
    TemporalSet excluded_;
    bool x_cycle_ = false;
    NodeSet cn_;
    NodeSet ecn_;
    TemporalSet pa_cn_;  // Pa(cn) over the window, minus the excluded set
    TemporalSet c_core_;
    TemporalSet px_all_;
    TemporalSet py_all_;
    std::vector<std::pair<std::string, TemporalSet>> cores_;
};

CriterionReport scg_backdoor_check(const Scg& g, const MicroQuery& q, const TemporalSet& z,
                                   PathSemantics semantics = PathSemantics::Walk);

TemporalSet set_a1(const Scg& g, const MicroQuery& q);
TemporalSet set_a2(const Scg& g, const MicroQuery& q);
TemporalSet qopt(const Scg& g, const MicroQuery& q, PathSemantics semantics = PathSemantics::Walk);

/// Pa(cn(X@-gamma, Y@0)) \ De(X@-gamma) in the template. Throws InputError when
/// X@-gamma is not an ancestor of Y@0.
TemporalSet ftdag_opt(const FtDagTemplate& t, const MicroQuery& q);

struct BackdoorCheck {
    bool valid = false;
    /// Verdict unchanged after widening the past padding by gamma_max + 1.
    bool stable = false;
};

/// Default past padding: |nodes| * (gamma_max + 1) slices below the window.
int default_padding(const Scg& g, const MicroQuery& q);

/// Classical back-door check of z in one template, evaluated on an unrolling
/// with `padding` extra past slices and gamma_max future slices.
bool classical_backdoor_valid(const FtDagTemplate& t, const MicroQuery& q, const TemporalSet& z,
                              int padding);

BackdoorCheck classical_backdoor_check(const FtDagTemplate& t, const MicroQuery& q,
                                       const TemporalSet& z);

/// classical_backdoor_check with both unrollings built once, for checking
/// many sets against one template.
class BackdoorChecker {
public:
    BackdoorChecker(const FtDagTemplate& t, const MicroQuery& q);
    BackdoorCheck check(const TemporalSet& z) const;

private:
    struct Level {
        UnrolledGraph graph;
        TemporalSet treatment_descendants;
    };
    bool valid(const Level& level, const TemporalSet& z) const;

    MicroQuery q_;
    Level base_;
    Level wide_;
};

/// Template built by the explicit construction: lags [1, gamma_max] on every
/// edge, lag 0 along treatment-to-outcome paths, then lag 0 from every parent
/// into nodes already reached at lag 0 while acyclic.
FtDagTemplate prop2_witness_template(const Scg& g, const MicroQuery& q);

using NamedSets = std::vector<std::pair<std::string, TemporalSet>>;

/// qopt, a1, a2 and one "<item>-core" entry per applicable item; Condition C
/// yields "C-core-x-all" and "C-core-y-all". NonAncestor yields {"empty": {}}.
NamedSets canonical_sets(const Scg& g, const MicroQuery& q,
                         PathSemantics semantics = PathSemantics::Walk);

struct Estimand {
    std::string formula;
    std::vector<std::string> summed_over;
};

Estimand estimand(const Scg& g, const MicroQuery& q, const TemporalSet& z);

/// "W@-2"
std::string format_var(const Scg& g, const TemporalVar& v);
std::string format_set(const Scg& g, const TemporalSet& s);

}  // namespace scgadj
