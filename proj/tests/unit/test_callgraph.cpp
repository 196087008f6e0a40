#include "support.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace nocfg;

namespace {

CallGraph bananas_graph()
{
    auto p = nocfg::testing::load_fixture("bananas.py");
    return run_analysis(p, std::vector<std::string>{"main"}).graph;
}

/// A static and a dynamic graph with the given bucket sizes.
std::pair<CallGraph, CallGraph> with_counts(std::size_t matched, std::size_t over, std::size_t missed)
{
    CallGraph s, d;
    for (std::size_t i = 0; i < matched; ++i) {
        s.add_edge("m", "t" + std::to_string(i));
        d.add_edge("m", "t" + std::to_string(i));
    }
    for (std::size_t i = 0; i < over; ++i)
        s.add_edge("o", "t" + std::to_string(i));
    for (std::size_t i = 0; i < missed; ++i)
        d.add_edge("x", "t" + std::to_string(i));
    return {s, d};
}

} // namespace

TEST_CASE("add_edge")
{
    CallGraph g;
    g.add_edge("main", "Person:eat_bananas", CallSite{std::nullopt, 22});
    CHECK(g.has_edge("main", "Person:eat_bananas"));
    CHECK_FALSE(g.has_edge("Person:eat_bananas", "main"));
    CHECK(g.nodes() == std::set<std::string>{"Person:eat_bananas", "main"});

    g.add_edge("main", "Person:eat_bananas", CallSite{std::nullopt, 22});
    CHECK(g.edge_count() == 1);
    CHECK(g.edges().at({"main", "Person:eat_bananas"}).size() == 1);

    g.add_edge("f", "f");
    CHECK(g.has_edge("f", "f"));
    CHECK(g.edge_count() == 2);
}

TEST_CASE("merge unions nodes, edges and sites")
{
    CallGraph a, b;
    a.add_edge("x", "y", CallSite{std::nullopt, 1});
    b.add_edge("x", "y", CallSite{std::nullopt, 2});
    b.add_node("z");
    a.merge(b);
    CHECK(a.edges().at({"x", "y"}).size() == 2);
    CHECK(a.nodes().contains("z"));
}

TEST_CASE("compare reproduces the published ratios")
{
    struct Row {
        std::size_t m, o, x;
        const char *precision, *recall;
    };
    for (const auto &row : {Row{60, 12, 0, "83.33", "100.00"}, Row{810, 94, 109, "89.60", "88.14"},
                            Row{232, 20, 9, "92.06", "96.27"}, Row{189, 28, 34, "87.10", "84.75"},
                            Row{70, 3, 16, "95.89", "81.40"}}) {
        auto [s, d] = with_counts(row.m, row.o, row.x);
        auto r = compare(s, d);
        CHECK(r.matched == row.m);
        CHECK(r.over_approx == row.o);
        CHECK(r.missed == row.x);
        CHECK(format_percent(r.precision) == row.precision);
        CHECK(format_percent(r.recall) == row.recall);
        CHECK(r.matched + r.missed == d.edge_count());
        CHECK(r.matched + r.over_approx == s.edge_count());
    }
}

TEST_CASE("compare edge cases")
{
    auto g = bananas_graph();
    auto same = compare(g, g);
    CHECK(same.precision == 1.0);
    CHECK(same.recall == 1.0);

    CallGraph a, b;
    a.add_edge("a", "b");
    b.add_edge("c", "d");
    auto disjoint = compare(a, b);
    CHECK(format_percent(disjoint.precision) == "0.00");
    CHECK(format_percent(disjoint.recall) == "0.00");

    auto empty = compare(CallGraph{}, CallGraph{});
    CHECK(empty.precision == 1.0);
    CHECK(empty.recall == 1.0);
}

TEST_CASE("compare(g, g) is perfect for random graphs")
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        CallGraph g;
        int n = std::uniform_int_distribution<int>(0, 20)(rng);
        for (int i = 0; i < n; ++i)
            g.add_edge("n" + std::to_string(rng() % 8), "n" + std::to_string(rng() % 8));
        auto r = compare(g, g);
        CHECK(r.precision == 1.0);
        CHECK(r.recall == 1.0);
        CHECK(r.matched == g.edge_count());
    }
}

TEST_CASE("reachable")
{
    auto g = bananas_graph();
    CHECK(reachable(g, {"main"}, {"Banana:eat"}) ==
          std::vector<std::string>{"main", "Person:eat_bananas", "Banana:eat"});
    CHECK_FALSE(reachable(g, {"main"}, {"Carrot:eat"}));
    CHECK_FALSE(reachable(g, {}, {"Banana:eat"}));
    CHECK(reachable(g, {"main"}, {"main"}) == std::vector<std::string>{"main"});
}

TEST_CASE("reachable respects edge direction")
{
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        CallGraph g;
        for (int i = 0; i < 12; ++i)
            g.add_edge("n" + std::to_string(rng() % 7), "n" + std::to_string(rng() % 7));
        std::string s = "n" + std::to_string(rng() % 7), t = "n" + std::to_string(rng() % 7);
        auto path = reachable(g, {s}, {t});
        // Independent check: forward closure by repeated relaxation.
        std::set<std::string> seen{s};
        for (bool grew = true; grew;) {
            grew = false;
            for (const auto &e : g.edge_set())
                if (seen.contains(e.caller))
                    grew |= seen.insert(e.callee).second;
        }
        CHECK(path.has_value() == seen.contains(t));
        if (path) {
            CHECK(path->front() == s);
            CHECK(path->back() == t);
            for (std::size_t i = 0; i + 1 < path->size(); ++i)
                CHECK(g.has_edge((*path)[i], (*path)[i + 1]));
        }
    }
}

TEST_CASE("JSON encoding")
{
    CHECK(to_json(CallGraph{}) == "{\n  \"edges\": [],\n  \"nodes\": []\n}\n");
    CHECK(to_dot(CallGraph{}) == "digraph callgraph {\n}\n");

    auto g = bananas_graph();
    auto text = to_json(g);
    auto doc = nlohmann::json::parse(text);
    REQUIRE(doc["edges"].size() == 8);
    std::vector<std::pair<std::string, std::string>> listed;
    for (const auto &e : doc["edges"])
        listed.emplace_back(e["caller"], e["callee"]);
    CHECK(std::is_sorted(listed.begin(), listed.end()));
    CHECK(call_graph_from_json(text) == g);
    CHECK(to_json(bananas_graph()) == text);
}

TEST_CASE("JSON round trip of random graphs")
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        CallGraph g;
        for (int i = 0; i < 10; ++i) {
            std::optional<CallSite> site;
            if (rng() % 2)
                site = CallSite{rng() % 2 ? std::optional<std::uint32_t>(rng() % 50) : std::nullopt,
                                static_cast<int>(rng() % 30)};
            g.add_edge("a:" + std::to_string(rng() % 5), "b" + std::to_string(rng() % 5), site);
        }
        g.add_node("lonely");
        CHECK(call_graph_from_json(to_json(g)) == g);
    }
}

TEST_CASE("schema violations")
{
    CHECK_THROWS_AS(call_graph_from_json("not json"), SchemaError);
    CHECK_THROWS_AS(call_graph_from_json("[]"), SchemaError);
    CHECK_THROWS_AS(call_graph_from_json(R"({"nodes": [], "edges": [{"caller": "a"}]})"), SchemaError);
    CHECK_THROWS_AS(call_graph_from_json(R"({"nodes": [1], "edges": []})"), SchemaError);
}

TEST_CASE("DOT lists every node and edge")
{
    auto dot = to_dot(bananas_graph());
    CHECK(dot.rfind("digraph callgraph {", 0) == 0);
    CHECK(dot.find("\"main\" -> \"Person:eat_bananas\"") != std::string::npos);
    CHECK(dot.find("Carrot") == std::string::npos);
}

TEST_CASE("report rendering")
{
    auto [s, d] = with_counts(60, 12, 0);
    auto r = compare(s, d);
    auto table = report_to_table(r);
    CHECK(table.find("83.33%") != std::string::npos);
    CHECK(table.find("100.00%") != std::string::npos);
    auto j = nlohmann::json::parse(report_to_json(r));
    CHECK(j["matched"] == 60);
    CHECK(j["over_approx"] == 12);
    CHECK(j["missed"] == 0);
}
