// nocfg: build, compare and query call graphs of subject-language programs.

#include "nocfg/analysis.hpp"
#include "nocfg/callgraph.hpp"
#include "nocfg/frontend.hpp"
#include "nocfg/json_ast.hpp"
#include "nocfg/oracle.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace nocfg;

enum Exit { kOk = 0, kReachable = 1, kInputError = 2, kNameError = 3 };

/// NOCFG_LOG: off | warn (default) | debug.
int log_level()
{
    const char *v = std::getenv("NOCFG_LOG");
    if (!v)
        return 1;
    std::string s = v;
    if (s == "off" || s == "quiet" || s == "0")
        return 0;
    if (s == "debug" || s == "2")
        return 2;
    return 1;
}

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NameError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool ends_with(const std::string &s, const std::string &suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Program load_program(const std::string &path)
{
    std::string text = read_file(path);
    try {
        if (ends_with(path, ".json"))
            return program_from_json(text);
        return parse(SourceModule{path, std::move(text)});
    } catch (const FrontendError &e) {
        throw InputError(e.what());
    } catch (const JsonAstError &e) {
        throw InputError(path + ": " + e.what());
    }
}

std::vector<std::string> entry_names(const Program &program, const std::vector<std::string> &given)
{
    if (!given.empty())
        return given;
    std::vector<std::string> out;
    for (TypeId e : program.entry_points)
        out.push_back(program.name_of(e));
    if (out.empty())
        out.push_back("main");
    return out;
}

void write_output(const std::string &text, const std::string &out_path)
{
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
        throw InputError(out_path + ": cannot write file");
    out << text;
}

std::string graph_table(const CallGraph &g)
{
    std::ostringstream os;
    for (const auto &[edge, sites] : g.edges()) {
        os << edge.caller << " -> " << edge.callee;
        if (!sites.empty()) {
            os << "  (line";
            if (sites.size() > 1)
                os << "s";
            bool first = true;
            for (const auto &s : sites) {
                os << (first ? " " : ", ") << s.line;
                first = false;
            }
            os << ")";
        }
        os << "\n";
    }
    return os.str();
}

std::string render_graph(const CallGraph &g, const std::string &format)
{
    if (format == "dot")
        return to_dot(g);
    if (format == "table")
        return graph_table(g);
    return to_json(g);
}

AnalysisResult analyze(const Program &program, const std::vector<std::string> &entries, int depth, std::size_t limit)
{
    AnalysisOptions options;
    options.reflect_depth = depth;
    options.literal_limit = limit;
    try {
        auto result = run_analysis(program, entry_names(program, entries), options);
        if (log_level() >= 1)
            for (const auto &d : result.diagnostics)
                std::cerr << "line " << d.line << ": " << to_string(d.kind) << ": " << d.detail << "\n";
        if (log_level() >= 2)
            std::cerr << "steps " << result.stats.steps << ", contexts " << result.stats.contexts << "\n";
        return result;
    } catch (const EntryNotFound &e) {
        throw NameError(e.what());
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Call-graph construction for a small Python-like language"};
    app.require_subcommand(1);

    std::string input, out_path, format = "json";
    std::vector<std::string> entries, targets;
    int depth = 2;
    std::size_t limit = kDefaultLiteralLimit;
    std::size_t budget = kDefaultStepBudget;

    auto add_common = [&](CLI::App *cmd) {
        cmd->add_option("input", input, "Source file (.py-like text or JSON-AST .json)")->required();
        cmd->add_option("--entry", entries, "Entry method (repeatable)");
        cmd->add_option("--out", out_path, "Write output to a file");
    };
    auto add_analysis = [&](CLI::App *cmd) {
        cmd->add_option("--reflect-depth", depth, "Payloads combined per reflective name")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--literal-limit", limit, "Literal payloads tracked per variable");
    };
    auto formats = CLI::IsMember({"dot", "json", "table"});

    auto *analyze_cmd = app.add_subcommand("analyze", "Build the static call graph");
    add_common(analyze_cmd);
    add_analysis(analyze_cmd);
    analyze_cmd->add_option("--format", format, "dot, json or table")->check(formats);

    std::string static_path, dynamic_path;
    auto *compare_cmd = app.add_subcommand("compare", "Compare a static against a dynamic call graph");
    compare_cmd->add_option("static", static_path, "Static call graph JSON")->required();
    compare_cmd->add_option("dynamic", dynamic_path, "Dynamic call graph JSON")->required();
    compare_cmd->add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));
    compare_cmd->add_option("--out", out_path, "Write output to a file");

    auto *reach_cmd = app.add_subcommand("reach", "Check whether target methods are reachable from the entries");
    add_common(reach_cmd);
    add_analysis(reach_cmd);
    reach_cmd->add_option("--target", targets, "Target method (repeatable)")->required();

    auto *interpret_cmd = app.add_subcommand("interpret", "Run the program and record its dynamic call graph");
    add_common(interpret_cmd);
    interpret_cmd->add_option("--budget", budget, "Step budget")->check(CLI::PositiveNumber);
    interpret_cmd->add_option("--format", format, "dot, json or table")->check(formats);

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze_cmd->parsed()) {
            Program program = load_program(input);
            auto result = analyze(program, entries, depth, limit);
            write_output(render_graph(result.graph, format), out_path);
            return kOk;
        }
        if (compare_cmd->parsed()) {
            CallGraph s, d;
            try {
                s = call_graph_from_json(read_file(static_path));
                d = call_graph_from_json(read_file(dynamic_path));
            } catch (const SchemaError &e) {
                throw InputError(e.what());
            }
            auto report = compare(s, d);
            write_output(format == "table" ? report_to_table(report) : report_to_json(report), out_path);
            return kOk;
        }
        if (reach_cmd->parsed()) {
            Program program = load_program(input);
            for (const auto &t : targets) {
                auto id = program.find(t);
                if (!id || program.info(*id).kind != TypeKind::Method)
                    throw NameError("unknown target method '" + t + "'");
            }
            auto result = analyze(program, entries, depth, limit);
            auto names = entry_names(program, entries);
            std::set<std::string> sources(names.begin(), names.end());
            std::ostringstream os;
            bool any = false;
            for (const auto &t : targets) {
                auto path = reachable(result.graph, sources, {t});
                if (!path) {
                    os << t << ": not reachable\n";
                    continue;
                }
                any = true;
                for (auto it = path->rbegin(); it != path->rend(); ++it)
                    os << *it << "\n";
            }
            write_output(os.str(), out_path);
            return any ? kReachable : kOk;
        }
        if (interpret_cmd->parsed()) {
            Program program = load_program(input);
            CallGraph merged;
            for (const auto &name : entry_names(program, entries)) {
                auto id = program.find(name);
                if (!id || !program.body(*id))
                    throw NameError("entry point '" + name + "' not found");
                auto run = interpret(program, *id, budget);
                if (log_level() >= 1) {
                    std::cerr << name << ": " << to_string(run.outcome);
                    if (!run.detail.empty())
                        std::cerr << " (" << run.detail << ")";
                    std::cerr << ", " << run.steps << " steps\n";
                }
                merged.merge(run.graph);
            }
            write_output(render_graph(merged, format), out_path);
            return kOk;
        }
    } catch (const InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const NameError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNameError;
    }
    return kOk;
}
