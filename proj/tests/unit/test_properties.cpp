// Properties checked over the fixture corpus and over generated programs.

#include "support.hpp"

#include <doctest.h>

using namespace nocfg;
namespace t = nocfg::testing;

namespace {

constexpr std::uint32_t kGenerated = 150;

const std::vector<std::string> kMain{"main"};

Program generated(std::uint32_t seed) { return parse({"gen" + std::to_string(seed) + ".py", t::generate_program(seed)}); }

std::vector<std::pair<std::string, Program>> corpus()
{
    std::vector<std::pair<std::string, Program>> out;
    for (const auto &name : t::all_fixtures())
        out.emplace_back(name, t::load_fixture(name));
    for (std::uint32_t seed = 0; seed < 30; ++seed)
        out.emplace_back("generated " + std::to_string(seed), generated(seed));
    return out;
}

} // namespace

TEST_CASE("generated programs parse and run to completion")
{
    for (std::uint32_t seed = 0; seed < kGenerated; ++seed) {
        auto source = t::generate_program(seed);
        CAPTURE(seed);
        CAPTURE(source);
        Program p;
        REQUIRE_NOTHROW(p = parse({"gen.py", source}));
        auto run = interpret(p, *p.find("main"));
        CHECK(run.outcome == Outcome::Completed);
        CHECK(run.detail == "");
    }
    CHECK(t::generate_program(5) == t::generate_program(5));
}

TEST_CASE("soundness over hand-written fixtures")
{
    const auto names = t::soundness_fixtures();
    CHECK(names.size() >= 30);
    for (const auto &name : names) {
        auto p = t::load_fixture(name);
        auto run = interpret(p, *p.find("main"));
        auto analysis = run_analysis(p, kMain);
        CAPTURE(name);
        CHECK(run.outcome == Outcome::Completed);
        auto report = t::check_soundness(p, analysis, run);
        CHECK_MESSAGE(report.ok(), report.describe());
    }
}

TEST_CASE("soundness over generated programs")
{
    for (std::uint32_t seed = 0; seed < kGenerated; ++seed) {
        auto p = generated(seed);
        auto run = interpret(p, *p.find("main"));
        auto analysis = run_analysis(p, kMain);
        CAPTURE(seed);
        auto report = t::check_soundness(p, analysis, run);
        CHECK_MESSAGE(report.ok(), report.describe() << t::generate_program(seed));
    }
}

TEST_CASE("reflective fixtures stay sound")
{
    for (const char *name : {"visitor.py", "bananas.py"}) {
        auto p = t::load_fixture(name);
        auto report = t::check_soundness(p, run_analysis(p, kMain), interpret(p, *p.find("main")));
        CAPTURE(name);
        CHECK_MESSAGE(report.ok(), report.describe());
    }
}

TEST_CASE("statement order within bodies does not matter")
{
    std::mt19937 rng(2024);
    std::size_t trials = 0;
    for (const auto &[name, p] : corpus()) {
        auto base = run_analysis(p, kMain);
        const auto base_env = t::named_env(p, base.env);
        for (int k = 0; k < 3; ++k) {
            auto q = t::shuffle_bodies(p, rng);
            auto r = run_analysis(q, kMain);
            CAPTURE(name);
            CHECK(t::named_env(q, r.env) == base_env);
            CHECK(r.graph.edge_set() == base.graph.edge_set());
            ++trials;
        }
    }
    CHECK(trials >= 100);
}

TEST_CASE("tables only grow and stay within the growth bound")
{
    for (const auto &[name, p] : corpus()) {
        t::MonotonicityObserver observer;
        AnalysisOptions options;
        options.observer = &observer;
        auto r = run_analysis(p, kMain, options);
        CAPTURE(name);
        CHECK(observer.violations == 0);
        CHECK(observer.updates == r.stats.contexts + r.stats.state_growths + r.stats.summary_growths);
        CHECK(t::within_growth_bound(r.stats));
    }
}

TEST_CASE("the final environment is a fixed point of every call-free transfer")
{
    for (const auto &[name, p] : corpus()) {
        AnalysisOptions options;
        options.keep_contexts = true;
        auto r = run_analysis(p, kMain, options);
        auto failures = t::reapplication_failures(p, r);
        CAPTURE(name);
        CHECK(failures.empty());
        for (const auto &f : failures)
            MESSAGE(f);
    }
}

TEST_CASE("every vertex of a fully reached context holds the same state")
{
    // Transfers only add bindings and the vertices form one cycle, so at the
    // fixed point each stored state includes its predecessor's.
    for (const auto &[name, p] : corpus()) {
        AnalysisOptions options;
        options.keep_contexts = true;
        auto r = run_analysis(p, kMain, options);
        for (const auto &c : r.contexts) {
            if (!std::all_of(c.states.begin(), c.states.end(), [](const auto &s) { return s.has_value(); }))
                continue;
            CAPTURE(name);
            CAPTURE(p.name_of(c.key.method));
            for (const auto &s : c.states)
                CHECK(*s == *c.states.front());
        }
    }
}

TEST_CASE("context summaries match a replay of their method")
{
    for (const auto &[name, p] : corpus()) {
        AnalysisOptions options;
        options.keep_contexts = true;
        auto r = run_analysis(p, kMain, options);
        for (std::size_t c = 0; c < r.contexts.size(); ++c) {
            if (!r.contexts[c].summary)
                continue;
            CAPTURE(name);
            CAPTURE(p.name_of(r.contexts[c].key.method));
            CHECK(replay_context(p, r, c, options) == *r.contexts[c].summary);
        }
    }
}

TEST_CASE("analysis output is byte-identical across runs")
{
    for (const auto &[name, p] : corpus()) {
        auto a = run_analysis(p, kMain);
        auto b = run_analysis(p, kMain);
        CAPTURE(name);
        CHECK(to_json(a.graph) == to_json(b.graph));
        CHECK(a.env == b.env);
        CHECK(a.diagnostics == b.diagnostics);
    }
}

TEST_CASE("every static edge has provenance")
{
    for (const auto &[name, p] : corpus()) {
        auto r = run_analysis(p, kMain);
        for (const auto &[edge, sites] : r.graph.edges()) {
            CAPTURE(name);
            CHECK_FALSE(sites.empty());
            CHECK(r.graph.nodes().contains(edge.caller));
            CHECK(r.graph.nodes().contains(edge.callee));
        }
    }
}
