#include "nocfg/analysis.hpp"

#include "nocfg/frontend.hpp"

#include <cstdlib>
#include <deque>
#include <map>
#include <set>

namespace nocfg {

std::string_view to_string(Diagnostic::Kind kind)
{
    switch (kind) {
    case Diagnostic::Kind::UnresolvedCall: return "unresolved_call";
    case Diagnostic::Kind::ArityMismatch: return "arity_mismatch";
    case Diagnostic::Kind::LiteralWidened: return "literal_widened";
    }
    return "?";
}

namespace {

Variable return_slot(TypeId method) { return Variable{method, std::string(kReturnSlot)}; }

bool is_bound_method(const Program &program, TypeId method)
{
    const auto &info = program.info(method);
    return info.kind == TypeKind::Method && info.parent && program.info(*info.parent).kind != TypeKind::Module;
}

/// Types that may own fields: no method locals, no module scope.
bool can_hold_fields(const Program &program, TypeId t)
{
    auto kind = program.info(t).kind;
    return kind == TypeKind::Class || kind == TypeKind::Builtin;
}

TypeSet member_of(const TypeEnv &env, const TypeSet &receivers, const std::string &field, const Program &program)
{
    TypeSet out;
    for (TypeId t : receivers.types()) {
        out.join(env.at(Variable{t, field}));
        if (auto m = program.lookup_method(t, field))
            out.insert(TypeValue{*m, {}});
        if (field == "__class__")
            out.insert(TypeValue{t, {}});
        else if (field == "__name__" && program.info(t).kind != TypeKind::Module)
            out.insert(TypeValue{program.builtins().str, program.info(t).name});
    }
    return out;
}

/// Accumulates targets, merging self sets of identical callees.
class TargetSet {
public:
    void add(TypeId callee, const TypeSet &self, std::optional<TypeId> instantiates = std::nullopt)
    {
        targets_[{callee, instantiates}].join(self);
    }
    std::vector<CallTarget> list() const
    {
        std::vector<CallTarget> out;
        for (const auto &[key, self] : targets_)
            out.push_back(CallTarget{key.first, self, key.second});
        return out;
    }

private:
    std::map<std::pair<TypeId, std::optional<TypeId>>, TypeSet> targets_;
};

void add_value_targets(TargetSet &out, const TypeSet &values, const Program &program)
{
    for (TypeId t : values.types()) {
        const auto &info = program.info(t);
        if (info.kind == TypeKind::Method) {
            TypeSet self;
            if (is_bound_method(program, t))
                for (TypeId owner : program.owners_of(t))
                    self.insert(TypeValue{owner, {}});
            out.add(t, self);
        } else if (program.is_user_class(t)) {
            if (auto ctor = program.lookup_method(t, "__init__"))
                out.add(*ctor, singleton(t), t);
        } else if (info.kind == TypeKind::Builtin && info.intrinsic != Intrinsic::None) {
            out.add(t, {});
        }
    }
}

void add_member_targets(TargetSet &out, const TypeEnv &env, const TypeSet &receivers, const std::string &field,
                        const Program &program)
{
    for (TypeId t : receivers.types()) {
        auto method = program.lookup_method(t, field);
        if (method)
            out.add(*method, singleton(t));
        TypeSet others = member_of(env, singleton(t), field, program);
        TypeSet rest;
        for (const auto &v : others)
            if (!method || v.type != *method)
                rest.insert(v);
        add_value_targets(out, rest, program);
    }
}

std::vector<Variable> member_variables(const TypeSet &receivers, const std::string &field, const Program &program)
{
    std::vector<Variable> out;
    for (TypeId t : receivers.types())
        if (can_hold_fields(program, t))
            out.push_back(Variable{t, field});
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

TypeSet eval_expr(const TypeEnv &env, const Expression &expr, TypeId scope, const Program &program)
{
    const auto &b = program.builtins();
    return std::visit(
        [&](const auto &node) -> TypeSet {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NameExpr>) {
                TypeSet out = env.at(Variable{scope, node.identifier});
                if (auto t = program.resolve_name(node.identifier))
                    out.insert(TypeValue{*t, {}});
                return out;
            } else if constexpr (std::is_same_v<T, MemberExpr>) {
                return member_of(env, eval_expr(env, *node.object, scope, program), node.field, program);
            } else if constexpr (std::is_same_v<T, LiteralExpr>) {
                switch (node.kind) {
                case LiteralKind::Int: return TypeSet{TypeValue{b.integer, node.value}};
                case LiteralKind::Str: return TypeSet{TypeValue{b.str, node.value}};
                case LiteralKind::List: return singleton(b.array);
                case LiteralKind::None: return singleton(b.none);
                }
                return {};
            } else {
                return {}; // call results come from the engine
            }
        },
        expr.node);
}

std::vector<Variable> lhs_variables(const TypeEnv &env, const Expression &lhs, TypeId scope, const Program &program)
{
    if (auto *name = std::get_if<NameExpr>(&lhs.node))
        return {Variable{scope, name->identifier}};
    if (auto *member = std::get_if<MemberExpr>(&lhs.node))
        return member_variables(eval_expr(env, *member->object, scope, program), member->field, program);
    return {};
}

TypeEnv transform_assignment(const TypeEnv &env, const Assignment &node, TypeId scope, const TypeSet &rhs,
                             const Program &program, std::size_t literal_limit)
{
    TypeEnv out = env;
    for (const auto &var : lhs_variables(env, *node.lhs, scope, program))
        out.join(var, rhs, literal_limit);
    return out;
}

TypeEnv transform_assignment(const TypeEnv &env, const StatementNode &node, const Program &program)
{
    const auto &assign = std::get<Assignment>(node.kind);
    return transform_assignment(env, assign, node.owner, eval_expr(env, *assign.rhs, node.owner, program), program);
}

TypeEnv transform_return(const TypeEnv &env, const StatementNode &node, const Program &program)
{
    const auto &ret = std::get<ReturnStmt>(node.kind);
    TypeEnv out = env;
    out.join(return_slot(node.owner),
             ret.expr ? eval_expr(env, *ret.expr, node.owner, program) : singleton(program.builtins().none));
    return out;
}

std::vector<CallTarget> resolve_targets(const TypeEnv &env, const InvocationExpr &call, TypeId scope,
                                        const Program &program)
{
    TargetSet out;
    if (auto *member = std::get_if<MemberExpr>(&call.target->node))
        add_member_targets(out, env, eval_expr(env, *member->object, scope, program), member->field, program);
    else
        add_value_targets(out, eval_expr(env, *call.target, scope, program), program);
    return out.list();
}

std::vector<std::string> reflective_names(const TypeSet &names, const Program &program, int k)
{
    std::vector<std::string> parts;
    for (const auto &v : names)
        if (v.type == program.builtins().str)
            if (auto *s = std::get_if<std::string>(&v.literal))
                parts.push_back(*s);
    std::set<std::string> out;
    std::vector<bool> used(parts.size(), false);
    std::string current;
    auto extend = [&](auto &&self, int depth) -> void {
        if (depth > 0)
            out.insert(current);
        if (depth == k)
            return;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (used[i])
                continue;
            used[i] = true;
            auto saved = current.size();
            current += parts[i];
            self(self, depth + 1);
            current.resize(saved);
            used[i] = false;
        }
    };
    extend(extend, 0);
    return {out.begin(), out.end()};
}

TypeSet resolve_reflective(const TypeEnv &env, const TypeSet &receivers, const TypeSet &names,
                           const TypeSet &fallback, const Program &program, int k)
{
    TypeSet out = fallback;
    const bool any_name = names.contains(TypeValue{program.builtins().str, {}});
    const auto candidates = any_name ? std::vector<std::string>{} : reflective_names(names, program, k);
    for (TypeId t : receivers.types()) {
        if (any_name) {
            for (TypeId m : program.methods_of(t))
                out.insert(TypeValue{m, {}});
            for (const auto &[var, types] : env)
                if (var.scope == t)
                    out.join(types);
            continue;
        }
        for (const auto &name : candidates) {
            if (auto m = program.lookup_method(t, name))
                out.insert(TypeValue{*m, {}});
            out.join(env.at(Variable{t, name}));
        }
    }
    return out;
}

TypeEnv bind_parameters(const TypeEnv &env, const CallTarget &target, const std::vector<TypeSet> &args,
                        const Program &program, int *arity_gap)
{
    TypeEnv out = env.filtered([&](const Variable &v) { return is_field(program, v); });
    const MethodBody *body = program.body(target.callee);
    const std::vector<std::string> none;
    const auto &params = body ? body->params : none;
    std::size_t first = 0;
    int missing_self = 0;
    if (target.instantiates || is_bound_method(program, target.callee)) {
        if (params.empty())
            missing_self = 1;
        else {
            out.join(Variable{target.callee, params[0]}, target.self);
            first = 1;
        }
    }
    const std::size_t slots = params.size() - first;
    for (std::size_t i = 0; i < args.size() && i < slots; ++i)
        out.join(Variable{target.callee, params[first + i]}, args[i]);
    if (arity_gap)
        *arity_gap = missing_self + std::abs(static_cast<int>(args.size()) - static_cast<int>(slots));
    return out;
}

TypeEnv strip_locals(const TypeEnv &env, TypeId method, const Program &program)
{
    return env.filtered([&](const Variable &v) {
        return is_field(program, v) || (v.scope == method && v.name == kReturnSlot);
    });
}

// ---------------------------------------------------------------------------
// Worklist engine

namespace {

class Engine {
public:
    struct Context {
        ContextKey key;
        const Scfg *graph = nullptr;
        const MethodBody *body = nullptr;
        std::vector<std::optional<TypeEnv>> states;
        std::optional<TypeEnv> summary;
        std::set<std::pair<std::size_t, std::uint32_t>> return_sites;
    };

    Engine(const Program &program, const AnalysisOptions &options, bool frozen)
        : program_(program), options_(options), frozen_(frozen)
    {
    }

    const Scfg &graph_of(TypeId method)
    {
        auto it = graphs_.find(method);
        if (it == graphs_.end())
            it = graphs_.emplace(method, build_scfg(program_.body(method)->body, method)).first;
        return it->second;
    }

    /// Returns the context index and whether it was created by this call.
    std::pair<std::size_t, bool> context(TypeId method, TypeEnv input)
    {
        ContextKey key{method, std::move(input)};
        if (auto it = index_.find(key); it != index_.end())
            return {it->second, false};
        if (frozen_)
            throw std::logic_error("replay reached a context the run never created: " + program_.name_of(method));
        Context c;
        c.graph = &graph_of(method);
        c.body = program_.body(method);
        c.states.resize(c.graph->vertex_count());
        c.states[c.graph->entry.index] = key.input;
        c.key = key;
        const std::size_t id = contexts_.size();
        contexts_.push_back(std::move(c));
        index_.emplace(std::move(key), id);
        note_state(id, contexts_[id].graph->entry, nullptr, *contexts_[id].states[contexts_[id].graph->entry.index]);
        enqueue(id, contexts_[id].graph->entry.index);
        graph_.add_node(program_.name_of(method));
        return {id, true};
    }

    void adopt(const ContextRecord &record)
    {
        Context c;
        c.key = record.key;
        c.graph = &graph_of(record.key.method);
        c.body = program_.body(record.key.method);
        c.summary = record.summary;
        index_.emplace(c.key, contexts_.size());
        contexts_.push_back(std::move(c));
    }

    void run(const std::vector<TypeId> &entries)
    {
        for (TypeId e : entries)
            context(e, TypeEnv{});
        while (!worklist_.empty()) {
            auto item = worklist_.front();
            worklist_.pop_front();
            pending_.erase(item);
            if (options_.max_steps && stats_.steps >= options_.max_steps)
                throw BudgetExceeded("analysis exceeded " + std::to_string(options_.max_steps) + " steps");
            ++stats_.steps;
            step(item.first, Vertex{item.second});
        }
    }

    /// Applies one vertex to `in`. Returns nothing when the vertex is waiting
    /// for a callee that was just discovered.
    std::optional<TypeEnv> apply(std::size_t ctx, Vertex v, const TypeEnv &in);

    TypeEnv replay(std::size_t ctx)
    {
        const Context &c = contexts_[ctx];
        const Scfg &g = *c.graph;
        std::vector<std::optional<TypeEnv>> states(g.vertex_count());
        states[g.entry.index] = c.key.input;
        for (bool changed = true; changed;) {
            changed = false;
            for (std::uint32_t i = 0; i < g.vertex_count(); ++i) {
                if (!states[i])
                    continue;
                auto out = apply(ctx, Vertex{i}, *states[i]);
                if (!out)
                    throw std::logic_error("replay blocked on a call");
                auto &succ = states[g.successor(Vertex{i}).index];
                if (!succ) {
                    succ = std::move(*out);
                    changed = true;
                } else {
                    changed |= succ->join(*out, options_.literal_limit);
                }
            }
        }
        TypeEnv all;
        for (const auto &s : states)
            if (s)
                all.join(*s, options_.literal_limit);
        return strip_locals(all, c.key.method, program_);
    }

    AnalysisResult finish()
    {
        AnalysisResult r;
        std::set<Variable> vars;
        for (auto &c : contexts_) {
            stats_.context_vertices += c.graph->vertex_count();
            for (const auto &s : c.states)
                if (s)
                    r.env.join(*s, options_.literal_limit);
        }
        for (const auto &c : contexts_)
            for (const auto &s : c.states)
                if (s)
                    for (const auto &binding : *s)
                        vars.insert(binding.first);
        stats_.contexts = contexts_.size();
        stats_.variables = vars.size();
        stats_.type_values = seen_values_.size();
        r.stats = stats_;
        r.graph = std::move(graph_);

        for (const auto &[site, resolved] : sites_)
            if (!resolved) {
                const auto *node = program_.node(site.first);
                diagnostics_.insert(Diagnostic{Diagnostic::Kind::UnresolvedCall, site.first, node ? node->line : 0,
                                               site_text_[site]});
            }
        r.diagnostics.assign(diagnostics_.begin(), diagnostics_.end());
        if (options_.keep_contexts)
            for (auto &c : contexts_)
                r.contexts.push_back(ContextRecord{c.key, c.states, c.summary});
        return r;
    }

private:
    friend class NodeEval;

    void enqueue(std::size_t ctx, std::uint32_t vertex)
    {
        if (pending_.emplace(ctx, vertex).second)
            worklist_.emplace_back(ctx, vertex);
    }

    void note_state(std::size_t ctx, Vertex v, const TypeEnv *before, const TypeEnv &after)
    {
        for (const auto &binding : after)
            for (const auto &value : binding.second)
                seen_values_.insert(value);
        if (options_.observer)
            options_.observer->on_state(ctx, v, before, after);
    }

    void step(std::size_t ctx, Vertex v)
    {
        auto out = apply(ctx, v, *contexts_[ctx].states[v.index]);
        if (!out)
            return;
        Context &c = contexts_[ctx];
        const Vertex succ = c.graph->successor(v);
        auto &stored = c.states[succ.index];
        if (stored && out->leq(*stored)) {
            record_summary(ctx, strip_locals(*out, c.key.method, program_));
            return;
        }
        std::optional<TypeEnv> before = stored;
        if (!stored)
            stored = std::move(*out);
        else
            stored->join(*out, options_.literal_limit);
        ++stats_.state_growths;
        note_state(ctx, succ, before ? &*before : nullptr, *stored);
        enqueue(ctx, succ.index);
    }

    void record_summary(std::size_t ctx, const TypeEnv &summary)
    {
        Context &c = contexts_[ctx];
        std::optional<TypeEnv> before = c.summary;
        bool grew;
        if (!c.summary) {
            c.summary = summary;
            grew = true;
        } else {
            grew = c.summary->join(summary, options_.literal_limit);
        }
        if (!grew)
            return;
        ++stats_.summary_growths;
        if (options_.observer)
            options_.observer->on_summary(ctx, before ? &*before : nullptr, *c.summary);
        for (const auto &[caller, vertex] : c.return_sites)
            enqueue(caller, vertex);
    }

    const Program &program_;
    const AnalysisOptions &options_;
    const bool frozen_;
    std::map<TypeId, Scfg> graphs_;
    std::vector<Context> contexts_;
    std::map<ContextKey, std::size_t> index_;
    std::deque<std::pair<std::size_t, std::uint32_t>> worklist_;
    std::set<std::pair<std::size_t, std::uint32_t>> pending_;
    CallGraph graph_;
    std::set<Diagnostic> diagnostics_;
    std::map<std::pair<NodeId, int>, bool> sites_;
    std::map<std::pair<NodeId, int>, std::string> site_text_;
    std::set<TypeValue> seen_values_;
    AnalysisStats stats_;
};

/// Evaluates the expressions of one statement, numbering call sites inner
/// first and left to right.
class NodeEval {
public:
    NodeEval(Engine &engine, std::size_t ctx, Vertex vertex, const StatementNode &node, TypeEnv &env)
        : e_(engine), program_(engine.program_), ctx_(ctx), vertex_(vertex), node_(node), env_(env)
    {
    }

    bool blocked() const { return blocked_; }

    TypeSet eval(const Expression &expr)
    {
        if (blocked_)
            return {};
        if (auto *member = std::get_if<MemberExpr>(&expr.node)) {
            TypeSet receivers = eval(*member->object);
            return member_of(env_, receivers, member->field, program_);
        }
        if (auto *call = std::get_if<InvocationExpr>(&expr.node))
            return eval_call(*call);
        return eval_expr(env_, expr, node_.owner, program_);
    }

    std::vector<Variable> targets(const Expression &lhs)
    {
        if (auto *member = std::get_if<MemberExpr>(&lhs.node))
            return member_variables(eval(*member->object), member->field, program_);
        return lhs_variables(env_, lhs, node_.owner, program_);
    }

    void bind(const Variable &var, const TypeSet &types)
    {
        bool widened = false;
        env_.join(var, types, e_.options_.literal_limit, &widened);
        if (widened)
            widened_note(program_.name_of(var.scope) + " " + var.name);
    }

    void widened_note(const std::string &what)
    {
        if (!e_.frozen_)
            e_.diagnostics_.insert(Diagnostic{Diagnostic::Kind::LiteralWidened, node_.id, node_.line,
                                              "literal payloads of " + what + " collapsed"});
    }

private:
    TypeSet eval_call(const InvocationExpr &call)
    {
        TargetSet found;
        std::vector<TypeSet> args;
        auto eval_args = [&] {
            for (const auto &a : call.args)
                args.push_back(eval(*a));
        };
        if (auto *member = std::get_if<MemberExpr>(&call.target->node)) {
            TypeSet receivers = eval(*member->object);
            eval_args();
            if (blocked_)
                return {};
            add_member_targets(found, env_, receivers, member->field, program_);
        } else {
            TypeSet values = eval(*call.target);
            eval_args();
            if (blocked_)
                return {};
            add_value_targets(found, values, program_);
        }
        const int site = next_site_++;
        const auto targets = found.list();
        if (!e_.frozen_) {
            auto key = std::pair{node_.id, site};
            e_.sites_[key] = e_.sites_[key] || !targets.empty();
            if (!e_.site_text_.contains(key))
                e_.site_text_[key] = to_string(*call.target);
        }

        TypeSet value;
        bool waiting = false;
        for (const auto &target : targets) {
            const auto &info = program_.info(target.callee);
            if (info.kind == TypeKind::Builtin) {
                value.join(intrinsic(info.intrinsic, args), e_.options_.literal_limit);
                continue;
            }
            edge(target.callee);
            if (info.intrinsic == Intrinsic::Append || info.intrinsic == Intrinsic::Pop) {
                value.join(array_method(info.intrinsic, args));
                continue;
            }
            const MethodBody *body = program_.body(target.callee);
            if (!body)
                continue;
            if (target.instantiates)
                value.insert(TypeValue{*target.instantiates, {}});
            if (body->synthesized) {
                if (!args.empty())
                    arity(target.callee, "constructor takes no arguments");
                continue;
            }
            int gap = 0;
            TypeEnv input = bind_parameters(env_, target, args, program_, &gap);
            if (gap)
                arity(target.callee, std::to_string(args.size()) + " argument(s) for " +
                                         std::to_string(body->params.size()) + " parameter(s)");
            auto [callee, created] = e_.context(target.callee, std::move(input));
            if (!e_.frozen_)
                e_.contexts_[callee].return_sites.emplace(ctx_, vertex_.index);
            if (created) {
                waiting = true;
                continue;
            }
            const auto &summary = e_.contexts_[callee].summary;
            if (!summary)
                continue; // in flight; revisited when its summary lands
            bool widened = false;
            env_.join(summary->filtered([&](const Variable &v) { return is_field(program_, v); }),
                      e_.options_.literal_limit, &widened);
            if (widened)
                widened_note("fields returned by " + program_.name_of(target.callee));
            if (!target.instantiates)
                value.join(summary->at(return_slot(target.callee)), e_.options_.literal_limit);
        }
        if (waiting) {
            blocked_ = true;
            return {};
        }
        return value;
    }

    void edge(TypeId callee)
    {
        if (!e_.frozen_)
            e_.graph_.add_edge(program_.name_of(node_.owner), program_.name_of(callee),
                               CallSite{node_.id.value, node_.line});
    }

    void arity(TypeId callee, const std::string &detail)
    {
        if (!e_.frozen_)
            e_.diagnostics_.insert(Diagnostic{Diagnostic::Kind::ArityMismatch, node_.id, node_.line,
                                              program_.name_of(callee) + ": " + detail});
    }

    Variable items() const { return Variable{program_.builtins().array, "items"}; }

    TypeSet array_method(Intrinsic which, const std::vector<TypeSet> &args)
    {
        const auto &b = program_.builtins();
        if (which == Intrinsic::Append) {
            if (args.size() != 1)
                arity(b.append, "takes exactly one argument");
            if (!args.empty())
                bind(items(), args[0]);
            return singleton(b.none);
        }
        if (args.size() > 1)
            arity(b.pop, "takes at most one argument");
        return env_.at(items());
    }

    TypeSet intrinsic(Intrinsic which, const std::vector<TypeSet> &args)
    {
        const auto &b = program_.builtins();
        auto arg = [&](std::size_t i) { return i < args.size() ? args[i] : TypeSet{}; };
        switch (which) {
        case Intrinsic::Range:
            bind(items(), singleton(b.integer));
            return singleton(b.array);
        case Intrinsic::Len:
        case Intrinsic::Compare:
        case Intrinsic::Not:
            return singleton(b.integer);
        case Intrinsic::Arith: {
            TypeSet out = singleton(b.integer);
            for (const auto &a : args) {
                if (a.contains_type(b.str))
                    out.insert(TypeValue{b.str, {}});
                if (a.contains_type(b.array))
                    out.insert(TypeValue{b.array, {}});
            }
            return out;
        }
        case Intrinsic::Print:
            return singleton(b.none);
        case Intrinsic::ItemOf:
            return item_of(arg(0), env_, program_);
        case Intrinsic::ListDisplay: {
            TypeSet elems;
            for (const auto &a : args)
                elems.join(a, e_.options_.literal_limit);
            bind(items(), elems);
            return singleton(b.array);
        }
        case Intrinsic::Add: {
            TypeSet out;
            bool widened = false;
            for (const auto &a : args)
                for (const auto &v : a) {
                    if (v.type == b.str)
                        out.insert(v, e_.options_.literal_limit, &widened);
                    else if (v.type == b.integer || v.type == b.array)
                        out.insert(TypeValue{v.type, {}});
                }
            if (widened)
                widened_note("string operands");
            return out;
        }
        case Intrinsic::Either: {
            TypeSet out;
            for (const auto &a : args)
                out.join(a, e_.options_.literal_limit);
            return out;
        }
        case Intrinsic::GetAttr:
            return resolve_reflective(env_, arg(0), arg(1), arg(2), program_, e_.options_.reflect_depth);
        default:
            return {};
        }
    }

    Engine &e_;
    const Program &program_;
    std::size_t ctx_;
    Vertex vertex_;
    const StatementNode &node_;
    TypeEnv &env_;
    int next_site_ = 0;
    bool blocked_ = false;
};

std::optional<TypeEnv> Engine::apply(std::size_t ctx, Vertex v, const TypeEnv &in)
{
    const Context &c = contexts_[ctx];
    TypeEnv env = in;
    if (v == c.graph->exit) {
        if (c.body->falls_through)
            env.join(return_slot(c.key.method), singleton(program_.builtins().none));
        return env;
    }
    const auto &payload = c.graph->payload[v.index];
    if (!payload)
        return env;
    const StatementNode &node = *program_.node(*payload);
    NodeEval eval(*this, ctx, v, node, env);
    std::visit(
        [&](const auto &stmt) {
            using T = std::decay_t<decltype(stmt)>;
            if constexpr (std::is_same_v<T, Assignment>) {
                TypeSet rhs = eval.eval(*stmt.rhs);
                auto vars = eval.targets(*stmt.lhs);
                if (eval.blocked())
                    return;
                for (const auto &var : vars)
                    eval.bind(var, rhs);
            } else if constexpr (std::is_same_v<T, InvocationStmt>) {
                InvocationExpr call{stmt.target, stmt.args};
                eval.eval(Expression{call});
            } else {
                TypeSet value = stmt.expr ? eval.eval(*stmt.expr) : singleton(program_.builtins().none);
                if (!eval.blocked())
                    eval.bind(return_slot(node.owner), value);
            }
        },
        node.kind);
    if (eval.blocked())
        return std::nullopt;
    return env;
}

std::vector<TypeId> checked_entries(const Program &program, const std::vector<TypeId> &entries)
{
    if (entries.empty())
        throw EntryNotFound("no entry point given");
    for (TypeId e : entries) {
        if (e.index >= program.type_count() || program.info(e).kind != TypeKind::Method || !program.body(e))
            throw EntryNotFound("entry point is not a method with a body");
    }
    return entries;
}

} // namespace

AnalysisResult run_analysis(const Program &program, const std::vector<TypeId> &entries, const AnalysisOptions &options)
{
    Engine engine(program, options, false);
    engine.run(checked_entries(program, entries));
    return engine.finish();
}

AnalysisResult run_analysis(const Program &program, const std::vector<std::string> &entries,
                            const AnalysisOptions &options)
{
    std::vector<TypeId> ids;
    for (const auto &name : entries) {
        auto id = program.find(name);
        if (!id || program.info(*id).kind != TypeKind::Method || !program.body(*id))
            throw EntryNotFound("entry point '" + name + "' not found");
        ids.push_back(*id);
    }
    return run_analysis(program, ids, options);
}

TypeEnv replay_context(const Program &program, const AnalysisResult &result, std::size_t context,
                       const AnalysisOptions &options)
{
    AnalysisOptions quiet = options;
    quiet.observer = nullptr;
    Engine engine(program, quiet, true);
    for (const auto &record : result.contexts)
        engine.adopt(record);
    return engine.replay(context);
}

} // namespace nocfg
