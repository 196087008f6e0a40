// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <sys/wait.h>

using namespace nocfg;
namespace t = nocfg::testing;

namespace {

using Clock = std::chrono::steady_clock;
using Names = std::set<std::string>;

const std::vector<std::string> kMain{"main"};

struct Verdict {
    bool pass = true;
    std::string detail;
    void fail(const std::string &why)
    {
        pass = false;
        if (!detail.empty())
            detail += "; ";
        detail += why;
    }
};

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Verdict check_type_mappings()
{
    Verdict o;
    auto start = Clock::now();
    auto p = t::load_fixture("bananas.py");
    auto r = run_analysis(p, kMain);
    const std::map<std::string, Names> expected = {
        {"Banana:eat self", {"Banana"}},
        {"Person bananas", {"array"}},
        {"Person:__init__ self", {"Person"}},
        {"Person:no_bananas self", {"Person"}},
        {"Person:add_banana self", {"Person"}},
        {"Person:add_banana banana", {"Banana"}},
        {"Person:eat_bananas self", {"Person"}},
        {"Person:eat_bananas banana", {"Banana", "Integer"}},
        {"main person", {"Person"}},
        {"main a", {"Banana", "Integer"}},
        {"array items", {"Banana", "Integer"}},
    };
    // Return slots are bookkeeping outside the published rows.
    std::map<std::string, Names> got;
    for (const auto &[key, names] : t::named_env(p, r.env))
        if (!key.ends_with(kReturnSlot) && !names.empty())
            got[key] = names;
    if (got != expected)
        o.fail("environment differs: " + to_string(p, r.env));
    if (!r.env.at({*p.find("Carrot:eat"), "self"}).empty())
        o.fail("Carrot:eat self is bound");
    double s = seconds_since(start);
    if (s >= 1.0)
        o.fail("took " + std::to_string(s) + " s");
    if (o.pass)
        o.detail = "12 rows equal (Carrot:eat self empty)";
    return o;
}

Verdict check_call_graph()
{
    Verdict o;
    auto start = Clock::now();
    auto p = t::load_fixture("bananas.py");
    auto r = run_analysis(p, kMain);
    const std::set<Edge> expected = {
        {"main", "Person:__init__"},    {"Person:__init__", "Person:no_bananas"},
        {"main", "Person:add_banana"},  {"Person:add_banana", "array:append"},
        {"main", "Person:eat_bananas"}, {"Person:eat_bananas", "Banana:eat"},
        {"Person:eat_bananas", "Person:no_bananas"},
        {"main", "Banana:__init__"}};
    if (r.graph.edge_set() != expected)
        o.fail("edge set differs:\n" + to_json(r.graph));
    for (const auto &e : r.graph.edge_set())
        if (e.callee == "Carrot:eat")
            o.fail("edge into Carrot:eat from " + e.caller);
    if (seconds_since(start) >= 1.0)
        o.fail("too slow");
    if (o.pass)
        o.detail = "8 edges, none into Carrot:eat";
    return o;
}

Verdict check_reflection()
{
    Verdict o;
    auto start = Clock::now();
    auto p = t::load_fixture("visitor.py");
    auto r = run_analysis(p, kMain);
    auto env = t::named_env(p, r.env);
    if (env["Visitor:visit node"] != Names{"If", "Name"})
        o.fail("node types are not {Name, If}");
    const Names expected{"Visitor:generic_visit", "Visitor:visit_If", "Visitor:visit_Name"};
    if (env["Visitor:visit visitor"] != expected)
        o.fail("visitor resolves to a different set");
    Names callees;
    for (const auto &e : r.graph.edge_set())
        if (e.caller == "Visitor:visit")
            callees.insert(e.callee);
    if (callees != expected)
        o.fail("call edges from visit differ");
    if (seconds_since(start) >= 1.0)
        o.fail("too slow");
    if (o.pass)
        o.detail = "{visit_If, visit_Name, generic_visit}";
    return o;
}

Verdict check_metrics()
{
    Verdict o;
    struct Row {
        std::size_t m, over, missed;
        const char *precision, *recall;
    };
    const Row rows[] = {{60, 12, 0, "83.33", "100.00"},
                        {810, 94, 109, "89.60", "88.14"},
                        {232, 20, 9, "92.06", "96.27"},
                        {189, 28, 34, "87.10", "84.75"},
                        {70, 3, 16, "95.89", "81.40"}};
    for (const auto &row : rows) {
        CallGraph s, d;
        for (std::size_t i = 0; i < row.m; ++i) {
            s.add_edge("caller", "m" + std::to_string(i));
            d.add_edge("caller", "m" + std::to_string(i));
        }
        for (std::size_t i = 0; i < row.over; ++i)
            s.add_edge("caller", "o" + std::to_string(i));
        for (std::size_t i = 0; i < row.missed; ++i)
            d.add_edge("caller", "x" + std::to_string(i));
        auto r = compare(s, d);
        auto p = format_percent(r.precision), rc = format_percent(r.recall);
        if (r.matched != row.m || r.over_approx != row.over || r.missed != row.missed || p != row.precision ||
            rc != row.recall)
            o.fail("(" + std::to_string(row.m) + "," + std::to_string(row.over) + "," + std::to_string(row.missed) +
                   ") gave " + p + "/" + rc);
    }
    if (o.pass)
        o.detail = "5 rows reproduced at two decimals";
    return o;
}

Verdict check_soundness()
{
    Verdict o;
    auto check = [&](const std::string &name, const Program &p) {
        auto run = interpret(p, *p.find("main"));
        if (run.outcome != nocfg::Outcome::Completed)
            o.fail(name + " did not complete under the interpreter");
        auto report = t::check_soundness(p, run_analysis(p, kMain), run);
        if (!report.ok())
            o.fail(name + ": " + report.describe());
    };
    auto fixtures = t::soundness_fixtures();
    if (fixtures.size() < 30)
        o.fail("only " + std::to_string(fixtures.size()) + " hand-written fixtures");
    for (const auto &name : fixtures)
        check(name, t::load_fixture(name));
    constexpr std::uint32_t kGenerated = 100;
    for (std::uint32_t seed = 0; seed < kGenerated; ++seed)
        check("generated " + std::to_string(seed), parse({"gen.py", t::generate_program(seed)}));
    if (o.pass)
        o.detail = std::to_string(fixtures.size()) + " fixtures + " + std::to_string(kGenerated) +
                   " generated programs, 0 violations";
    return o;
}

std::vector<std::pair<std::string, Program>> corpus()
{
    std::vector<std::pair<std::string, Program>> out;
    for (const auto &name : t::all_fixtures())
        out.emplace_back(name, t::load_fixture(name));
    for (std::uint32_t seed = 0; seed < 20; ++seed)
        out.emplace_back("generated " + std::to_string(seed), parse({"gen.py", t::generate_program(seed)}));
    return out;
}

Verdict check_order_insensitivity()
{
    Verdict o;
    std::mt19937 rng(1);
    std::size_t trials = 0;
    for (const auto &[name, p] : corpus()) {
        auto base = run_analysis(p, kMain);
        auto env = t::named_env(p, base.env);
        auto edges = base.graph.edge_set();
        for (int k = 0; k < 3; ++k, ++trials) {
            auto q = t::shuffle_bodies(p, rng);
            auto r = run_analysis(q, kMain);
            if (t::named_env(q, r.env) != env)
                o.fail(name + ": environment changed under permutation");
            if (r.graph.edge_set() != edges)
                o.fail(name + ": edges changed under permutation");
        }
    }
    if (trials < 100)
        o.fail("only " + std::to_string(trials) + " trials");
    if (o.pass)
        o.detail = std::to_string(trials) + " permutation trials identical";
    return o;
}

Verdict check_monotonicity()
{
    Verdict o;
    double slowest = 0;
    std::size_t runs = 0;
    for (const auto &[name, p] : corpus()) {
        t::MonotonicityObserver observer;
        AnalysisOptions options;
        options.observer = &observer;
        options.keep_contexts = true;
        auto start = Clock::now();
        auto r = run_analysis(p, kMain, options);
        double s = seconds_since(start);
        slowest = std::max(slowest, s);
        ++runs;
        if (observer.violations)
            o.fail(name + ": a table entry failed to grow");
        if (!t::within_growth_bound(r.stats))
            o.fail(name + ": growth bound exceeded");
        if (s >= 10.0)
            o.fail(name + " took " + std::to_string(s) + " s");
        if (!t::reapplication_failures(p, r).empty())
            o.fail(name + ": final environment is not a fixed point");
    }
    if (o.pass) {
        std::ostringstream os;
        os << runs << " runs monotone and within bound, slowest " << static_cast<int>(slowest * 1000) << " ms";
        o.detail = os.str();
    }
    return o;
}

std::pair<int, std::string> run_cli(const std::string &args)
{
    std::string cmd = std::string("NOCFG_LOG=off \"") + NOCFG_CLI_PATH + "\" " + args;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe)
        return {-1, ""};
    std::string out;
    char buf[1024];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe))
        out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

Verdict check_reach()
{
    Verdict o;
    const std::string input = "\"" + t::fixture_path("bananas.py") + "\" --entry main";
    auto [hit_code, hit] = run_cli("reach " + input + " --target Banana:eat");
    if (hit_code != 1 || hit != "Banana:eat\nPerson:eat_bananas\nmain\n")
        o.fail("Banana:eat gave exit " + std::to_string(hit_code) + " and output '" + hit + "'");
    auto [miss_code, miss] = run_cli("reach " + input + " --target Carrot:eat");
    if (miss_code != 0 || miss != "Carrot:eat: not reachable\n")
        o.fail("Carrot:eat gave exit " + std::to_string(miss_code) + " and output '" + miss + "'");
    if (o.pass)
        o.detail = "Banana:eat path reported (exit 1), Carrot:eat not reachable (exit 0)";
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Verdict()>>> criteria = {
        {"type mappings of the banana example", check_type_mappings},
        {"call graph of the banana example", check_call_graph},
        {"reflective visitor dispatch", check_reflection},
        {"precision and recall arithmetic", check_metrics},
        {"soundness against the interpreter", check_soundness},
        {"statement order insensitivity", check_order_insensitivity},
        {"monotonicity and termination", check_monotonicity},
        {"reachability gate", check_reach},
    };
    int failures = 0;
    int index = 0;
    for (const auto &[title, check] : criteria) {
        ++index;
        Verdict o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o.fail(std::string("exception: ") + e.what());
        }
        failures += !o.pass;
        std::cout << "criterion " << index << ": " << (o.pass ? "PASS" : "FAIL") << "  " << title << " ("
                  << o.detail << ")\n";
    }
    std::cout << "criterion 9: N/A   real-project precision/recall and vulnerability-audit timings need the "
                 "original third-party codebases and test suites; criterion 5 stands in for them\n";
    return failures == 0 ? 0 : 1;
}
