#pragma once

#include <random>
#include <string>
#include <vector>

#include "scgadj/identify.hpp"

namespace testing_support {

using namespace scgadj;

inline Scg fig1() { return Scg::build({"X", "Y", "W"}, {{"X", "Y"}, {"Y", "X"}, {"W", "X"}, {"W", "Y"}}); }
inline Scg fig2a() { return Scg::build({"X", "Y", "W"}, {{"W", "X"}, {"X", "Y"}, {"W", "W"}, {"X", "X"}}); }
inline Scg fig5() {
    return Scg::build({"X", "Y", "W", "Z"}, {{"X", "Y"}, {"W", "X"}, {"W", "Z"}, {"Z", "Y"}, {"Y", "Z"}});
}
inline Scg fig6() {
    return Scg::build({"X", "Y", "W", "U", "R"},
                      {{"X", "Y"}, {"W", "X"}, {"R", "Y"}, {"U", "R"}, {"U", "W"}, {"X", "X"}, {"W", "W"}});
}
inline Scg fig7() { return Scg::build({"X", "Y", "U"}, {{"X", "Y"}, {"U", "Y"}, {"Y", "U"}}); }

// Template over g: [0, gamma_max] on ordinary edges, [1, gamma_max] on
// self-loops, with the listed edges overridden.
inline FtDagTemplate make_template(const Scg& g, int gamma_max,
                                   const std::vector<std::pair<std::pair<std::string, std::string>, std::vector<int>>>&
                                       overrides = {}) {
    FtDagTemplate t{g, gamma_max, {}};
    for (const auto& e : g.edges()) t.lags.push_back(lag_range(e.is_self_loop() ? 1 : 0, gamma_max));
    for (const auto& [edge, lags] : overrides) {
        const auto idx = *g.edge_index(g.index_of(edge.first), g.index_of(edge.second));
        t.lags[idx] = 0;
        for (int l : lags) t.lags[idx] |= LagMask(1) << l;
    }
    return t;
}

inline TemporalVar tv(const Scg& g, const std::string& name, int offset) { return {g.index_of(name), offset}; }

// Random graph over n nodes with independent edge draws (self-loops included).
inline Scg random_graph(std::mt19937_64& rng, int n, double p) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
    std::bernoulli_distribution coin(p);
    std::vector<Edge> edges;
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (coin(rng)) edges.push_back({static_cast<NodeIndex>(s), static_cast<NodeIndex>(t)});
    return Scg::from_indices(names, edges);
}

}  // namespace testing_support
