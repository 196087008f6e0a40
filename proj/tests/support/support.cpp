#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nocfg::testing {

namespace fs = std::filesystem;

std::string fixture_path(const std::string &relative) { return std::string(NOCFG_FIXTURE_DIR) + "/" + relative; }

std::string read_text(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Program load_fixture(const std::string &relative)
{
    auto path = fixture_path(relative);
    return parse(SourceModule{path, read_text(path)});
}

std::vector<std::string> soundness_fixtures()
{
    std::vector<std::string> out;
    for (const auto &entry : fs::directory_iterator(fixture_path("sound")))
        if (entry.path().extension() == ".py")
            out.push_back("sound/" + entry.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> all_fixtures()
{
    auto out = soundness_fixtures();
    out.insert(out.begin(), {"bananas.py", "visitor.py", "infinite_loop.py"});
    return out;
}

std::string SoundnessReport::describe() const
{
    std::string out;
    for (const auto &e : missing_edges)
        out += "missing edge " + e + "\n";
    for (const auto &t : missing_types)
        out += "missing type " + t + "\n";
    return out;
}

SoundnessReport check_soundness(const Program &program, const AnalysisResult &analysis, const InterpretResult &run)
{
    SoundnessReport report;
    for (const auto &edge : run.graph.edge_set())
        if (!analysis.graph.has_edge(edge.caller, edge.callee))
            report.missing_edges.push_back(edge.caller + " -> " + edge.callee);
    for (const auto &[var, types] : run.observed)
        for (TypeId t : types)
            if (!analysis.env.at(var).contains_type(t))
                report.missing_types.push_back(program.name_of(var.scope) + " " + var.name + " : " +
                                               program.name_of(t));
    return report;
}

Program rebuild(const Program &program,
                const std::function<std::vector<StatementNode>(const std::vector<StatementNode> &)> &reorder)
{
    Program out;
    for (std::uint32_t i = 0; i < program.type_count(); ++i) {
        TypeId t{i};
        if (program.is_builtin(t) || t == program.module())
            continue;
        const auto &info = program.info(t);
        std::optional<TypeId> parent;
        if (info.parent)
            parent = out.find(program.name_of(*info.parent));
        out.add_type(info.kind, info.qualified_name, parent);
    }
    for (std::uint32_t i = 0; i < program.type_count(); ++i) {
        const auto &info = program.info(TypeId{i});
        if (info.base && !program.is_builtin(TypeId{i}))
            out.set_base(*out.find(info.qualified_name), *out.find(program.name_of(*info.base)));
    }
    for (const auto &[method, body] : program.methods()) {
        MethodBody copy = body;
        TypeId id = *out.find(program.name_of(method));
        copy.body = reorder(body.body);
        for (auto &n : copy.body)
            n.owner = id;
        out.add_method(id, std::move(copy));
    }
    for (TypeId e : program.entry_points)
        out.entry_points.push_back(*out.find(program.name_of(e)));
    return out;
}

Program shuffle_bodies(const Program &program, std::mt19937 &rng)
{
    return rebuild(program, [&](const std::vector<StatementNode> &body) {
        auto copy = body;
        std::shuffle(copy.begin(), copy.end(), rng);
        return copy;
    });
}

std::map<std::string, std::set<std::string>> named_env(const Program &program, const TypeEnv &env)
{
    std::map<std::string, std::set<std::string>> out;
    for (const auto &[var, types] : env) {
        auto &names = out[program.name_of(var.scope) + " " + var.name];
        for (TypeId t : types.types())
            names.insert(program.name_of(t));
    }
    return out;
}

void MonotonicityObserver::on_state(std::size_t, Vertex, const TypeEnv *before, const TypeEnv &after)
{
    ++updates;
    if (before && (!before->leq(after) || *before == after))
        ++violations;
}

void MonotonicityObserver::on_summary(std::size_t, const TypeEnv *before, const TypeEnv &after)
{
    ++updates;
    if (before && (!before->leq(after) || *before == after))
        ++violations;
}

bool within_growth_bound(const AnalysisStats &stats)
{
    // One definition per stored state, then every growth adds a new
    // (variable, value) pair.
    return stats.state_growths <= stats.context_vertices * (1 + stats.variables * stats.type_values);
}

namespace {

bool expr_call_free(const ExprPtr &e)
{
    if (!e)
        return true;
    if (std::holds_alternative<InvocationExpr>(e->node))
        return false;
    if (auto *m = std::get_if<MemberExpr>(&e->node))
        return expr_call_free(m->object);
    return true;
}

} // namespace

bool call_free(const StatementNode &node)
{
    if (auto *a = std::get_if<Assignment>(&node.kind))
        return expr_call_free(a->lhs) && expr_call_free(a->rhs);
    if (auto *r = std::get_if<ReturnStmt>(&node.kind))
        return expr_call_free(r->expr);
    return false;
}

std::vector<std::string> reapplication_failures(const Program &program, const AnalysisResult &result)
{
    std::vector<std::string> out;
    for (const auto &c : result.contexts) {
        const auto &body = program.body(c.key.method)->body;
        // Vertex i + 1 carries statement i.
        for (std::size_t i = 0; i < body.size(); ++i) {
            const auto &state = c.states[i + 1];
            const StatementNode &n = body[i];
            if (!state || !call_free(n))
                continue;
            TypeEnv after = std::holds_alternative<Assignment>(n.kind) ? transform_assignment(*state, n, program)
                                                                       : transform_return(*state, n, program);
            if (!(after == *state))
                out.push_back(program.name_of(n.owner) + ": " + to_string(n));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random programs

namespace {

struct MethodSpec {
    const char *name;
    int level;
    bool takes_arg;
};

constexpr MethodSpec kMethods[] = {{"get", 0, false}, {"step", 1, false}, {"put", 2, true}, {"run", 3, true}};

class Generator {
public:
    explicit Generator(std::uint32_t seed) : rng_(seed) {}

    std::string program()
    {
        classes_ = pick(2, 4);
        functions_ = pick(1, 3);
        std::vector<int> base(classes_, -1);
        for (int c = 1; c < classes_; ++c)
            if (chance(40))
                base[c] = pick(0, c - 1);

        for (int c = 0; c < classes_; ++c) {
            out_ << "class C" << c;
            if (base[c] >= 0)
                out_ << "(C" << base[c] << ")";
            out_ << ":\n";
            const bool root = base[c] < 0;
            if (root || chance(30)) {
                out_ << "    def __init__(self, a):\n";
                out_ << "        self.f0 = a\n";
                out_ << "        self.f1 = " << (chance(50) ? "[a]" : "None") << "\n";
            }
            bool any = !root ? false : true;
            for (const auto &m : kMethods) {
                if (!root && !chance(50))
                    continue;
                any = true;
                out_ << "    def " << m.name << "(self" << (m.takes_arg ? ", x" : "") << "):\n";
                Scope scope{2, m.level, true, {"self"}, {}};
                if (m.takes_arg)
                    scope.maybe.push_back("x");
                body(scope, 0);
            }
            if (!any)
                out_ << "    pass\n";
        }
        for (int f = 0; f < functions_; ++f) {
            out_ << "def F" << f << "(p):\n";
            Scope scope{1, 4 + f, false, {}, {"p"}};
            body(scope, 0);
        }
        out_ << "def main():\n";
        Scope scope{1, 100, false, {}, {}};
        line(scope, "seed = C0(None)");
        scope.safe.push_back("seed");
        body(scope, 0);
        return out_.str();
    }

private:
    struct Scope {
        int indent;
        int level;
        bool in_method;
        std::vector<std::string> safe;  // hold instances
        std::vector<std::string> maybe; // anything, including None
    };

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool chance(int percent) { return pick(0, 99) < percent; }
    template <class T>
    const T &choose(const std::vector<T> &v)
    {
        return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
    }

    void line(const Scope &s, const std::string &text) { out_ << std::string(4 * s.indent, ' ') << text << "\n"; }

    std::string fresh() { return "v" + std::to_string(++counter_); }

    std::string any_value(const Scope &s)
    {
        std::vector<std::string> all = s.safe;
        all.insert(all.end(), s.maybe.begin(), s.maybe.end());
        if (all.empty() || chance(10))
            return "None";
        return choose(all);
    }

    std::string klass() { return "C" + std::to_string(pick(0, classes_ - 1)); }

    void body(Scope s, int depth)
    {
        const int count = pick(1, 4);
        for (int i = 0; i < count; ++i)
            statement(s, depth);
        if (!s.in_method && s.level == 100)
            return;
        if (depth == 0 && chance(70))
            line(s, "return " + any_value(s));
    }

    void statement(Scope &s, int depth)
    {
        const int kind = pick(0, 11);
        switch (kind) {
        case 0: {
            auto v = fresh();
            line(s, v + " = " + klass() + "(" + any_value(s) + ")");
            s.safe.push_back(v);
            return;
        }
        case 1:
        case 2: {
            std::vector<const MethodSpec *> callable;
            for (const auto &m : kMethods)
                if (m.level < s.level)
                    callable.push_back(&m);
            if (callable.empty() || s.safe.empty())
                break;
            const auto *m = choose(callable);
            auto v = fresh();
            line(s, v + " = " + choose(s.safe) + "." + m->name + "(" + (m->takes_arg ? any_value(s) : "") + ")");
            s.maybe.push_back(v);
            return;
        }
        case 3:
            if (!s.in_method)
                break;
            line(s, "self.f" + std::to_string(pick(0, 1)) + " = " + any_value(s));
            return;
        case 4: {
            if (!s.in_method)
                break;
            auto v = fresh();
            line(s, v + " = self.f" + std::to_string(pick(0, 1)));
            s.maybe.push_back(v);
            return;
        }
        case 5: {
            int callable = s.level >= 100 ? functions_ : s.level - 4;
            if (callable <= 0)
                break;
            auto v = fresh();
            auto fn = "F" + std::to_string(pick(0, callable - 1));
            if (chance(50)) {
                auto g = fresh();
                line(s, g + " = " + fn);
                fn = g;
            }
            line(s, v + " = " + fn + "(" + any_value(s) + ")");
            s.maybe.push_back(v);
            return;
        }
        case 6: {
            if (s.level <= 0 || s.safe.empty())
                break;
            auto m = fresh();
            auto v = fresh();
            line(s, m + " = " + choose(s.safe) + ".get");
            line(s, v + " = " + m + "()");
            s.maybe.push_back(v);
            return;
        }
        case 7: {
            if (s.safe.empty())
                break;
            auto l = fresh();
            line(s, l + " = [" + choose(s.safe) + "]");
            if (chance(50))
                line(s, l + ".append(" + choose(s.safe) + ")");
            if (depth < 2 && s.level > 0) {
                auto e = fresh();
                line(s, "for " + e + " in " + l + ":");
                Scope inner = s;
                inner.indent++;
                inner.safe.push_back(e);
                block(inner, depth + 1);
            }
            s.maybe.push_back(l);
            return;
        }
        case 8: {
            if (depth >= 2)
                break;
            static const char *conds[] = {"0", "1", "None", "len([1, 2]) > 1"};
            line(s, std::string("if ") + conds[pick(0, 3)] + ":");
            Scope inner = s;
            inner.indent++;
            block(inner, depth + 1);
            if (chance(50)) {
                line(s, "else:");
                block(inner, depth + 1);
            }
            return;
        }
        case 9: {
            if (depth >= 2)
                break;
            auto i = fresh();
            line(s, i + " = 0");
            line(s, "while " + i + " < " + std::to_string(pick(1, 3)) + ":");
            Scope inner = s;
            inner.indent++;
            block(inner, depth + 1);
            line(inner, i + " = " + i + " + 1");
            return;
        }
        case 10: {
            auto k = fresh();
            auto v = fresh();
            line(s, k + " = " + klass());
            line(s, v + " = " + k + "(" + any_value(s) + ")");
            s.safe.push_back(v);
            return;
        }
        default:
            break;
        }
        auto v = fresh();
        line(s, v + " = " + any_value(s));
        s.maybe.push_back(v);
    }

    /// Nested statements; names bound inside are visible afterwards only as
    /// possibly-unbound, so they are not exported.
    void block(const Scope &s, int depth)
    {
        Scope inner = s;
        const int count = pick(1, 3);
        for (int i = 0; i < count; ++i)
            statement(inner, depth);
    }

    std::mt19937 rng_;
    std::ostringstream out_;
    int classes_ = 0;
    int functions_ = 0;
    int counter_ = 0;
};

} // namespace

std::string generate_program(std::uint32_t seed) { return Generator(seed).program(); }

} // namespace nocfg::testing
