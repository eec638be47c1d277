#include <doctest.h>

#include "support.hpp"

using namespace scgadj;
using namespace testing_support;

TEST_CASE("build validates declarations") {
    CHECK_NOTHROW(fig2a());
    CHECK_THROWS_AS(Scg::build({"X", "X"}, {}), InputError);
    CHECK_THROWS_AS(Scg::build({"X", "Y"}, {{"X", "Z"}}), InputError);
    CHECK_THROWS_AS(Scg::build({"X", "Y"}, {{"X", "Y"}, {"X", "Y"}}), InputError);
    CHECK_THROWS_AS(Scg::build({""}, {}), InputError);
}

TEST_CASE("self-loops are ordinary edges") {
    const auto g = fig2a();
    CHECK(g.has_self_loop(g.index_of("W")));
    CHECK(g.has_self_loop(g.index_of("X")));
    CHECK_FALSE(g.has_self_loop(g.index_of("Y")));
    CHECK(g.edges().size() == 4);
}

TEST_CASE("ancestors and descendants on fig 2a") {
    const auto g = fig2a();
    const auto x = g.index_of("X"), y = g.index_of("Y"), w = g.index_of("W");
    CHECK(ancestors(g, {y}) == NodeSet{x, y, w});
    CHECK(descendants(g, {x}) == NodeSet{x, y});
    CHECK(parents_of(g, {x}) == NodeSet{x, w});
}

TEST_CASE("fig 1 components and cycle profile") {
    const auto g = fig1();
    const auto x = g.index_of("X"), y = g.index_of("Y"), w = g.index_of("W");
    const auto p = scc_partition(g);
    CHECK(p.component(x) == NodeSet{x, y});
    CHECK(p.component(w) == NodeSet{w});
    const auto c = cycle_profile(g, y);
    CHECK_FALSE(c.has_self_loop);
    CHECK(c.on_any_cycle);
    REQUIRE(c.only_cycle_is_two_cycle_with.has_value());
    CHECK(*c.only_cycle_is_two_cycle_with == x);
    CHECK_FALSE(on_cycle(g, w));
}

TEST_CASE("two-cycle flag is cleared by a self-loop or a longer cycle") {
    const auto a = Scg::build({"X", "Y"}, {{"X", "Y"}, {"Y", "X"}, {"Y", "Y"}});
    CHECK_FALSE(cycle_profile(a, a.index_of("Y")).only_cycle_is_two_cycle_with.has_value());
    const auto b = Scg::build({"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "X"}, {"Y", "Z"}, {"Z", "X"}});
    CHECK_FALSE(cycle_profile(b, b.index_of("Y")).only_cycle_is_two_cycle_with.has_value());
}

TEST_CASE("scc partition agrees with the mutual-ancestry oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + trial % 8;
        const auto g = random_graph(rng, n, 0.25);
        const auto p = scc_partition(g);
        for (NodeIndex u = 0; u < g.size(); ++u) {
            const auto an_u = ancestors(g, {u});
            for (NodeIndex v = 0; v < g.size(); ++v) {
                const bool same = an_u.count(v) && ancestors(g, {v}).count(u);
                CHECK(same == (p.component_of[u] == p.component_of[v]));
            }
        }
    }
}

TEST_CASE("ancestor / descendant duality") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const auto g = random_graph(rng, 6, 0.2);
        for (NodeIndex u = 0; u < g.size(); ++u)
            for (NodeIndex v = 0; v < g.size(); ++v)
                CHECK(ancestors(g, {v}).count(u) == descendants(g, {u}).count(v));
    }
}

TEST_CASE("two-cycle flag implies the component shape") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 300; ++trial) {
        const auto g = random_graph(rng, 5, 0.3);
        const auto p = scc_partition(g);
        for (NodeIndex v = 0; v < g.size(); ++v) {
            const auto c = cycle_profile(g, v);
            if (!c.only_cycle_is_two_cycle_with) continue;
            CHECK(p.component(v) == NodeSet{v, *c.only_cycle_is_two_cycle_with});
            CHECK_FALSE(g.has_self_loop(v));
        }
    }
}

TEST_CASE("without_node drops incident edges only") {
    const auto g = fig1().without_node(0);
    CHECK(g.size() == 3);
    CHECK(g.edges().size() == 1);
    CHECK(g.has_edge(g.index_of("W"), g.index_of("Y")));
}
