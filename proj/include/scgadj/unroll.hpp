#pragma once

// Compatible full-time DAGs of an SCG, encoded as per-edge lag sets, their
// finite unrollings, d-separation and possible-descendant machinery.
//
// Time is an integer offset relative to the outcome time t: 0 is t, -1 is t-1.

#include <cstdint>
#include <set>
#include <vector>

#include "scgadj/graph.hpp"

namespace scgadj {

struct TemporalVar {
    NodeIndex series = 0;
    int offset = 0;

    auto operator<=>(const TemporalVar&) const = default;
};

using TemporalSet = std::set<TemporalVar>;

struct MicroQuery {
    NodeIndex treatment = 0;
    NodeIndex outcome = 0;
    int gamma = 0;
    int gamma_max = 1;
};

/// Largest supported gamma_max; lag sets are bit masks over [0, kMaxLag].
inline constexpr int kMaxLag = 30;

/// Bit l set means lag l is present.
using LagMask = std::uint32_t;

inline bool has_lag(LagMask m, int lag) { return (m >> lag) & 1u; }
std::vector<int> lags_of(LagMask m);
LagMask lag_range(int lo, int hi);

struct FtDagTemplate {
    Scg scg;
    int gamma_max = 1;
    std::vector<LagMask> lags;  // parallel to scg.edges()

    LagMask lags_of_edge(NodeIndex source, NodeIndex target) const;
    bool operator==(const FtDagTemplate&) const = default;
};

/// Throws InputError when the template violates its invariants: lag sets
/// non-empty and within [0, gamma_max], no lag 0 on self-loops, acyclic lag-0
/// subgraph.
void validate_template(const FtDagTemplate& t);

struct TemplateEnumeration {
    std::vector<FtDagTemplate> templates;
    bool over_cap = false;
    /// Number of templates seen before stopping (cap + 1 when over cap).
    std::size_t count = 0;
};

/// Every compatible template in deterministic order (edges in graph order,
/// lag masks ascending), or an over-cap signal once more than `cap` exist.
TemplateEnumeration enumerate_compatible_templates(const Scg& g, int gamma_max, std::size_t cap);

/// Exact number of compatible templates, saturating at `limit`.
std::size_t count_compatible_templates(const Scg& g, int gamma_max, std::size_t limit);

/// Templates whose lag sets are maximal: full lag ranges everywhere, lag 0 kept
/// on a maximal acyclic edge subset. Over-cap once more than `cap` exist.
TemplateEnumeration densest_templates(const Scg& g, int gamma_max, std::size_t cap);

FtDagTemplate full_lag_template(const Scg& g, int gamma_max, const std::vector<Edge>& lag0_edges);

Scg macro_projection(const FtDagTemplate& t);

/// Finite window [lo, hi] of a template. Node id = (offset - lo) * series + series index.
class UnrolledGraph {
public:
    UnrolledGraph(const FtDagTemplate& t, int lo, int hi);

    int lo() const { return lo_; }
    int hi() const { return hi_; }
    std::size_t series_count() const { return series_; }
    std::size_t node_count() const { return parents_.size(); }

    bool contains(const TemporalVar& v) const {
        return v.series < series_ && v.offset >= lo_ && v.offset <= hi_;
    }
    std::size_t id(const TemporalVar& v) const;
    TemporalVar var(std::size_t id) const;

    const std::vector<std::size_t>& parents(std::size_t id) const { return parents_[id]; }
    const std::vector<std::size_t>& children(std::size_t id) const { return children_[id]; }
    std::size_t edge_count() const;
    std::vector<std::pair<TemporalVar, TemporalVar>> edge_list() const;

    bool is_acyclic() const;

    TemporalSet descendants(const TemporalSet& s) const;
    TemporalSet ancestors(const TemporalSet& s) const;
    TemporalSet parents_of(const TemporalSet& s) const;

private:
    int lo_;
    int hi_;
    std::size_t series_;
    std::vector<std::vector<std::size_t>> parents_;
    std::vector<std::vector<std::size_t>> children_;
};

/// True iff every path between a and b is blocked by z. Throws InputError for
/// variables outside the window or overlapping arguments.
bool d_separated(const UnrolledGraph& u, const TemporalSet& a, const TemporalSet& b,
                 const TemporalSet& z);

/// Same as d_separated, with the outgoing edges of `cut` ignored.
bool d_separated_cut(const UnrolledGraph& u, const TemporalSet& a, const TemporalSet& b,
                     const TemporalSet& z, const TemporalSet& cut);

struct Window {
    int lo = 0;
    int hi = 0;
};

/// Temporal variables that descend from v@offset in at least one compatible
/// template, restricted to the window.
TemporalSet possible_descendants(const Scg& g, NodeIndex v, int offset, Window window,
                                 int gamma_max);

/// Union over all enumerated templates (oracle). Throws OverCapError when the
/// template count exceeds cap.
TemporalSet possible_descendants_bruteforce(const Scg& g, NodeIndex v, int offset, Window window,
                                            int gamma_max, std::size_t cap);

class OverCapError : public std::runtime_error {
public:
    OverCapError(const std::string& what, std::size_t count)
        : std::runtime_error(what), count_(count) {}
    std::size_t count() const { return count_; }

private:
    std::size_t count_;
};

/// All series instantiated over [lo, hi].
TemporalSet instantiate(const NodeSet& s, int lo, int hi);

}  // namespace scgadj
