#pragma once

// Macro-level summary causal graph and the kinship / cycle primitives shared by
// the rest of the library. Nodes are addressed by their declaration index;
// every set-valued result is ordered by that index.

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace scgadj {

using NodeIndex = std::size_t;
using NodeSet = std::set<NodeIndex>;

/// Raised for malformed user input (unknown names, invalid graphs, bad queries).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Edge {
    NodeIndex source;
    NodeIndex target;

    bool is_self_loop() const { return source == target; }
    auto operator<=>(const Edge&) const = default;
};

/// Summary causal graph. Immutable after construction and cheap to copy.
class Scg {
public:
    /// Empty graph.
    Scg() : data_(std::make_shared<const Data>()) {}

    /// Validates and canonicalizes raw names. Throws InputError on duplicate
    /// nodes, undeclared endpoints or duplicate edges.
    static Scg build(const std::vector<std::string>& nodes,
                     const std::vector<std::pair<std::string, std::string>>& edges);

    /// Same as build() for index-addressed edges (used by generators).
    static Scg from_indices(std::vector<std::string> nodes, std::vector<Edge> edges);

    std::size_t size() const { return data_->names.size(); }
    const std::string& name(NodeIndex v) const { return data_->names.at(v); }
    const std::vector<std::string>& names() const { return data_->names; }

    std::optional<NodeIndex> find(std::string_view name) const;
    /// Throws InputError for unknown names.
    NodeIndex index_of(std::string_view name) const;

    /// Edges sorted by (source, target).
    const std::vector<Edge>& edges() const { return data_->edges; }
    /// Position of an edge in edges(), if present.
    std::optional<std::size_t> edge_index(NodeIndex source, NodeIndex target) const;
    bool has_edge(NodeIndex source, NodeIndex target) const {
        return edge_index(source, target).has_value();
    }
    bool has_self_loop(NodeIndex v) const { return has_edge(v, v); }

    /// Parents / children including v itself when v carries a self-loop.
    const std::vector<NodeIndex>& parents(NodeIndex v) const { return data_->parents.at(v); }
    const std::vector<NodeIndex>& children(NodeIndex v) const { return data_->children.at(v); }

    /// Copy of this graph without the given node's incident edges.
    Scg without_node(NodeIndex v) const;

    bool operator==(const Scg& other) const;

private:
    struct Data {
        std::vector<std::string> names;
        std::vector<Edge> edges;
        std::vector<std::vector<NodeIndex>> parents;
        std::vector<std::vector<NodeIndex>> children;
    };
    explicit Scg(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

    std::shared_ptr<const Data> data_;
};

/// Reflexive-transitive closure along reversed edges.
NodeSet ancestors(const Scg& g, const NodeSet& s);
/// Reflexive-transitive closure along forward edges.
NodeSet descendants(const Scg& g, const NodeSet& s);

/// Union of the parents of every member (members may be parents of each other).
NodeSet parents_of(const Scg& g, const NodeSet& s);

struct SccPartition {
    std::vector<std::size_t> component_of;
    std::vector<NodeSet> components;  // ordered by smallest member

    const NodeSet& component(NodeIndex v) const { return components.at(component_of.at(v)); }
};

SccPartition scc_partition(const Scg& g);

struct CycleProfile {
    bool has_self_loop = false;
    bool on_any_cycle = false;
    /// Set when the only cycle through the node is a 2-cycle with this node.
    std::optional<NodeIndex> only_cycle_is_two_cycle_with;
};

CycleProfile cycle_profile(const Scg& g, NodeIndex v);

/// True when v lies on a cycle (self-loops included).
bool on_cycle(const Scg& g, NodeIndex v);

/// Acyclicity of an edge subset over the node set of g (self-loops count as cycles).
bool is_acyclic(std::size_t node_count, const std::vector<Edge>& edges);

}  // namespace scgadj
