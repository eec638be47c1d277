// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <string>

#include "scgadj/scgadj.h"

using nlohmann::json;

namespace {

const char* kFig1 = R"({"nodes": ["X", "Y", "W"], "edges": [["X", "Y"], ["Y", "X"], ["W", "X"], ["W", "Y"]]})";
const char* kFig2a = R"({"nodes": ["W", "X", "Y"], "edges": [["W", "X"], ["X", "Y"], ["W", "W"], ["X", "X"]]})";
const char* kQuery = R"({"treatment": "X", "outcome": "Y", "gamma": 0, "gamma_max": 1})";

struct Graph {
    scgadj_graph* g = nullptr;
    explicit Graph(const char* text) { REQUIRE(scgadj_graph_from_json(text, &g) == SCGADJ_OK); }
    ~Graph() { scgadj_graph_free(g); }
};

struct Out {
    char* s = nullptr;
    ~Out() { scgadj_string_free(s); }
    json parsed() const { return json::parse(s); }
};

}  // namespace

TEST_CASE("version and status names") {
    CHECK(std::string(scgadj_version()) == "0.1.0");
    CHECK(std::string(scgadj_status_name(SCGADJ_SET_REJECTED)) != "");
    CHECK(std::string(scgadj_status_name(static_cast<scgadj_status>(99))) != "");
}

TEST_CASE("graph handles") {
    scgadj_graph* g = nullptr;
    CHECK(scgadj_graph_from_json("{", &g) == SCGADJ_INPUT_ERROR);
    CHECK(g == nullptr);
    CHECK(std::string(scgadj_last_error()).find("JSON") != std::string::npos);
    CHECK(scgadj_graph_from_json(nullptr, &g) == SCGADJ_INPUT_ERROR);
    Graph fig(kFig1);
    Out o;
    REQUIRE(scgadj_graph_to_json(fig.g, &o.s) == SCGADJ_OK);
    CHECK(o.parsed()["nodes"].size() == 3);
    scgadj_graph_free(nullptr);
}

TEST_CASE("identify") {
    Graph fig(kFig1);
    Out o;
    REQUIRE(scgadj_identify(fig.g, R"({"treatment": "X", "outcome": "Y", "gamma": 1})", &o.s) == SCGADJ_OK);
    CHECK(o.parsed()["verdict"] == "CondC");

    Out o2;
    CHECK(scgadj_identify(fig.g, kQuery, &o2.s) == SCGADJ_NOT_IDENTIFIABLE);
    REQUIRE(o2.s != nullptr);
    CHECK(o2.parsed()["identifiable"] == false);

    Out o3;
    CHECK(scgadj_identify(fig.g, R"({"treatment": "Q", "outcome": "Y"})", &o3.s) == SCGADJ_INPUT_ERROR);
    CHECK(o3.s == nullptr);
    CHECK(scgadj_identify(nullptr, kQuery, &o3.s) == SCGADJ_INPUT_ERROR);
}

TEST_CASE("not identifiable still writes the report") {
    Graph g(R"({"nodes": ["X", "Y", "U"], "edges": [["X", "Y"], ["U", "X"], ["X", "U"], ["U", "Y"], ["Y", "U"]]})");
    Out o;
    const auto st = scgadj_identify(g.g, R"({"treatment": "X", "outcome": "Y", "gamma": 0, "gamma_max": 1})", &o.s);
    CHECK(st == SCGADJ_NOT_IDENTIFIABLE);
    REQUIRE(o.s != nullptr);
    CHECK(o.parsed()["verdict"] == "NotIdentifiable");
}

TEST_CASE("check") {
    Graph g(kFig2a);
    Out ok, rejected, bad;
    CHECK(scgadj_check(g.g, kQuery, R"([["X", -1]])", &ok.s) == SCGADJ_OK);
    CHECK(ok.parsed()["satisfied"] == true);
    CHECK(scgadj_check(g.g, kQuery, R"([["Y", 0]])", &rejected.s) == SCGADJ_SET_REJECTED);
    REQUIRE(rejected.s != nullptr);
    CHECK(rejected.parsed()["satisfied"] == false);
    CHECK(std::string(scgadj_last_error()).find("Y@0") != std::string::npos);
    CHECK(scgadj_check(g.g, kQuery, R"([["Y", 3]])", &bad.s) == SCGADJ_INPUT_ERROR);
}

TEST_CASE("sets and qopt") {
    Graph g(kFig2a);
    Out sets, q;
    REQUIRE(scgadj_sets(g.g, kQuery, &sets.s) == SCGADJ_OK);
    CHECK(sets.parsed().dump().find("qopt") != std::string::npos);
    REQUIRE(scgadj_qopt(g.g, kQuery, &q.s) == SCGADJ_OK);
    CHECK(q.parsed()["qopt"] == json::parse(R"([["X", -1]])"));
}

TEST_CASE("templates and unroll") {
    Graph g(kFig1);
    Out all, over, dense;
    REQUIRE(scgadj_templates(g.g, 1, 100, 0, &all.s) == SCGADJ_OK);
    CHECK(all.parsed()["count"] == 45);
    CHECK(scgadj_templates(g.g, 1, 10, 0, &over.s) == SCGADJ_OVER_CAP);
    REQUIRE(scgadj_templates(g.g, 1, 100, 1, &dense.s) == SCGADJ_OK);
    CHECK(dense.parsed()["templates"].size() == 2);

    const auto tmpl = dense.parsed()["templates"][0].dump();
    Out text, js, bad;
    REQUIRE(scgadj_unroll(tmpl.c_str(), -1, 0, SCGADJ_FORMAT_TEXT, &text.s) == SCGADJ_OK);
    CHECK(std::string(text.s).find("W@-1 -> X@0") != std::string::npos);
    REQUIRE(scgadj_unroll(tmpl.c_str(), -1, 0, SCGADJ_FORMAT_JSON, &js.s) == SCGADJ_OK);
    CHECK(scgadj_unroll(tmpl.c_str(), 0, -1, SCGADJ_FORMAT_TEXT, &bad.s) == SCGADJ_INPUT_ERROR);
}

TEST_CASE("validate") {
    Out o, csv, bad;
    REQUIRE(scgadj_validate(R"({"n_graphs": 3, "threads": 1})", SCGADJ_FORMAT_JSON, &o.s) == SCGADJ_OK);
    CHECK(o.parsed()["counterexample_count"] == 0);
    REQUIRE(scgadj_validate(R"({"n_graphs": 3, "threads": 1})", SCGADJ_FORMAT_CSV, &csv.s) == SCGADJ_OK);
    CHECK(std::string(csv.s).rfind("graph,gamma", 0) == 0);
    CHECK(scgadj_validate(R"({"n_graphs": -3})", SCGADJ_FORMAT_JSON, &bad.s) == SCGADJ_INPUT_ERROR);
}

TEST_CASE("probe and simulate") {
    Graph g(kFig2a);
    Out p;
    REQUIRE(scgadj_probe(g.g, kQuery, nullptr, &p.s) == SCGADJ_OK);
    CHECK(p.parsed()["sets_scanned"].get<int>() > 0);

    Out s, d, bad, empty;
    REQUIRE(scgadj_simulate(g.g, kQuery, R"({"n": 300, "reps": 5, "seed": 3, "threads": 1})", &s.s) == SCGADJ_OK);
    CHECK(s.parsed().contains("blocks"));
    REQUIRE(scgadj_simulate(g.g, kQuery, R"({"n": 4, "dataset": true, "threads": 1})", &d.s) == SCGADJ_OK);
    CHECK(std::string(d.s).rfind("replicate,time,series,value", 0) == 0);
    CHECK(scgadj_simulate(g.g, kQuery, R"({"n": 0})", &bad.s) == SCGADJ_INPUT_ERROR);
    CHECK(scgadj_simulate(g.g, kQuery, R"({"sets": {}})", &empty.s) == SCGADJ_INPUT_ERROR);
}
