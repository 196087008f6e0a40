#include "nocfg/frontend.hpp"

#include <functional>
#include <map>

namespace nocfg {

ExprPtr lower_expr(const ast::Expr &expr)
{
    return std::visit(
        [&](const auto &node) -> ExprPtr {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ast::Name>) {
                return make_name(node.id);
            } else if constexpr (std::is_same_v<T, ast::Attribute>) {
                return make_member(lower_expr(*node.object), node.attr);
            } else if constexpr (std::is_same_v<T, ast::IntLit>) {
                return make_int(node.value);
            } else if constexpr (std::is_same_v<T, ast::StrLit>) {
                return make_str(node.value);
            } else if constexpr (std::is_same_v<T, ast::NoneLit>) {
                return make_none();
            } else if constexpr (std::is_same_v<T, ast::ListDisplay>) {
                if (node.elements.empty())
                    return make_list();
                std::vector<ExprPtr> elems;
                for (const auto &e : node.elements)
                    elems.push_back(lower_expr(*e));
                return make_call(make_name(std::string(kListDisplay)), std::move(elems));
            } else if constexpr (std::is_same_v<T, ast::Call>) {
                std::vector<ExprPtr> args;
                for (const auto &a : node.args)
                    args.push_back(lower_expr(*a));
                return make_call(lower_expr(*node.func), std::move(args));
            } else if constexpr (std::is_same_v<T, ast::Binary>) {
                auto op = node.op == ast::BinaryOp::Add ? kAddOp : kArithOp;
                return make_call(make_name(std::string(op)), {lower_expr(*node.lhs), lower_expr(*node.rhs)});
            } else if constexpr (std::is_same_v<T, ast::Comparison>) {
                return make_call(make_name(std::string(kCompareOp)), {lower_expr(*node.lhs), lower_expr(*node.rhs)});
            } else if constexpr (std::is_same_v<T, ast::Logical>) {
                return make_call(make_name(std::string(kEitherOp)), {lower_expr(*node.lhs), lower_expr(*node.rhs)});
            } else {
                return make_call(make_name(std::string(kNotOp)), {lower_expr(*node.operand)});
            }
        },
        expr.node);
}

namespace {

/// Emits one invocation node per outermost call inside `expr`; everything
/// around the calls has no effect on types.
void lower_calls(const ast::Expr &expr, TypeId owner, NodeIdSource &ids, std::vector<StatementNode> &out)
{
    std::visit(
        [&](const auto &node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ast::Call>) {
                std::vector<ExprPtr> args;
                for (const auto &a : node.args)
                    args.push_back(lower_expr(*a));
                out.push_back(StatementNode{ids(), InvocationStmt{lower_expr(*node.func), std::move(args)}, owner, expr.line});
            } else if constexpr (std::is_same_v<T, ast::Attribute>) {
                lower_calls(*node.object, owner, ids, out);
            } else if constexpr (std::is_same_v<T, ast::ListDisplay>) {
                for (const auto &e : node.elements)
                    lower_calls(*e, owner, ids, out);
            } else if constexpr (std::is_same_v<T, ast::Binary> || std::is_same_v<T, ast::Comparison> ||
                                 std::is_same_v<T, ast::Logical>) {
                lower_calls(*node.lhs, owner, ids, out);
                lower_calls(*node.rhs, owner, ids, out);
            } else if constexpr (std::is_same_v<T, ast::Not>) {
                lower_calls(*node.operand, owner, ids, out);
            }
        },
        expr.node);
}

void lower_block(const ast::Block &block, TypeId owner, NodeIdSource &ids, std::vector<StatementNode> &out)
{
    for (const auto &stmt : block) {
        auto nodes = lower_control_flow(stmt, owner, ids);
        out.insert(out.end(), std::make_move_iterator(nodes.begin()), std::make_move_iterator(nodes.end()));
    }
}

} // namespace

std::vector<StatementNode> lower_control_flow(const ast::Stmt &stmt, TypeId owner, NodeIdSource &ids)
{
    std::vector<StatementNode> out;
    std::visit(
        [&](const auto &node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, ast::Assign>) {
                out.push_back(StatementNode{ids(), Assignment{lower_expr(*node.target), lower_expr(*node.value)}, owner,
                                            stmt.line});
            } else if constexpr (std::is_same_v<T, ast::AugAssign>) {
                auto op = node.op == ast::BinaryOp::Add ? kAddOp : kArithOp;
                auto target = lower_expr(*node.target);
                auto rhs = make_call(make_name(std::string(op)), {target, lower_expr(*node.value)});
                out.push_back(StatementNode{ids(), Assignment{target, rhs}, owner, stmt.line});
            } else if constexpr (std::is_same_v<T, ast::ExprStmt>) {
                lower_calls(*node.expr, owner, ids, out);
            } else if constexpr (std::is_same_v<T, ast::Return>) {
                out.push_back(
                    StatementNode{ids(), ReturnStmt{node.value ? lower_expr(*node.value) : nullptr}, owner, stmt.line});
            } else if constexpr (std::is_same_v<T, ast::If>) {
                lower_calls(*node.condition, owner, ids, out);
                lower_block(node.body, owner, ids, out);
                lower_block(node.orelse, owner, ids, out);
            } else if constexpr (std::is_same_v<T, ast::While>) {
                lower_calls(*node.condition, owner, ids, out);
                lower_block(node.body, owner, ids, out);
            } else if constexpr (std::is_same_v<T, ast::For>) {
                auto items = make_call(make_name(std::string(kItemOf)), {lower_expr(*node.iterable)});
                out.push_back(StatementNode{ids(), Assignment{make_name(node.target), items}, owner, stmt.line});
                lower_block(node.body, owner, ids, out);
            }
            // pass / break / continue carry no types.
        },
        stmt.node);
    return out;
}

Program build_program(const ast::Module &module, const std::string &path)
{
    Program program;
    const TypeId mod = program.module();

    auto redefinition = [&](const std::string &name, int line) {
        throw UnsupportedConstruct(path, line, 1, "redefinition of '" + name + "' is not supported");
    };
    auto declare = [&](TypeKind kind, const std::string &qualified, std::optional<TypeId> parent, int line) {
        if (program.find(qualified))
            redefinition(qualified, line);
        return program.add_type(kind, qualified, parent);
    };

    struct PendingMethod {
        TypeId id;
        std::shared_ptr<const ast::FunctionDef> def;
    };
    std::vector<PendingMethod> pending;
    std::vector<std::pair<TypeId, const ast::ClassDef *>> classes;

    for (const auto &def : module.definitions) {
        if (auto *cls = std::get_if<ast::ClassDef>(&def)) {
            TypeId c = declare(TypeKind::Class, cls->name, mod, cls->line);
            classes.emplace_back(c, cls);
            for (const auto &m : cls->methods)
                pending.push_back({declare(TypeKind::Method, cls->name + ":" + m->name, c, m->line), m});
        } else {
            const auto &fn = std::get<std::shared_ptr<const ast::FunctionDef>>(def);
            pending.push_back({declare(TypeKind::Method, fn->name, mod, fn->line), fn});
        }
    }

    for (const auto &[c, cls] : classes) {
        if (!cls->base)
            continue;
        auto base = program.find(*cls->base);
        if (!base || !program.is_user_class(*base))
            throw UnsupportedConstruct(path, cls->line, 1,
                                       "base class '" + *cls->base + "' is not a class of this module");
        try {
            program.set_base(c, *base);
        } catch (const std::invalid_argument &e) {
            throw SyntaxError(path, cls->line, 1, e.what());
        }
    }

    NodeIdSource ids;
    for (const auto &[id, def] : pending) {
        MethodBody body;
        body.params = def->params;
        lower_block(def->body, id, ids, body.body);
        body.falls_through = !ast::always_returns(def->body);
        body.source = def;
        program.add_method(id, std::move(body));
    }

    add_missing_constructors(program);

    return program;
}

Program parse(const SourceModule &source) { return build_program(parse_syntax(source), source.path); }

TypeSet item_of(const TypeSet &collection_types, const TypeEnv &env, const Program &program)
{
    const auto &b = program.builtins();
    TypeSet out;
    for (const auto &value : collection_types) {
        if (value.type == b.array)
            out.join(env.at(Variable{b.array, "items"}));
        else if (value.type == b.str)
            out.insert(TypeValue{b.str, {}});
    }
    return out;
}

} // namespace nocfg
