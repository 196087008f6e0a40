#include "nocfg/ir.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nocfg {

std::string_view to_string(TypeKind kind)
{
    switch (kind) {
    case TypeKind::Module: return "Module";
    case TypeKind::Class: return "Class";
    case TypeKind::Method: return "Method";
    case TypeKind::Builtin: return "Builtin";
    }
    return "?";
}

std::optional<TypeKind> type_kind_from_string(std::string_view text)
{
    if (text == "Module") return TypeKind::Module;
    if (text == "Class") return TypeKind::Class;
    if (text == "Method") return TypeKind::Method;
    if (text == "Builtin") return TypeKind::Builtin;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Expressions

ExprPtr make_name(std::string identifier)
{
    return std::make_shared<const Expression>(Expression{NameExpr{std::move(identifier)}});
}

ExprPtr make_member(ExprPtr object, std::string field)
{
    return std::make_shared<const Expression>(Expression{MemberExpr{std::move(object), std::move(field)}});
}

ExprPtr make_int(std::int64_t value)
{
    return std::make_shared<const Expression>(Expression{LiteralExpr{LiteralKind::Int, value}});
}

ExprPtr make_str(std::string value)
{
    return std::make_shared<const Expression>(Expression{LiteralExpr{LiteralKind::Str, std::move(value)}});
}

ExprPtr make_list()
{
    return std::make_shared<const Expression>(Expression{LiteralExpr{LiteralKind::List, {}}});
}

ExprPtr make_none()
{
    return std::make_shared<const Expression>(Expression{LiteralExpr{LiteralKind::None, {}}});
}

ExprPtr make_call(ExprPtr target, std::vector<ExprPtr> args)
{
    return std::make_shared<const Expression>(Expression{InvocationExpr{std::move(target), std::move(args)}});
}

bool same_expr(const ExprPtr &a, const ExprPtr &b)
{
    if (!a || !b)
        return !a && !b;
    return *a == *b;
}

static bool same_args(const std::vector<ExprPtr> &a, const std::vector<ExprPtr> &b)
{
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), same_expr);
}

bool operator==(const Expression &a, const Expression &b)
{
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        [&](const auto &lhs) -> bool {
            using T = std::decay_t<decltype(lhs)>;
            const auto &rhs = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, NameExpr>)
                return lhs.identifier == rhs.identifier;
            else if constexpr (std::is_same_v<T, MemberExpr>)
                return lhs.field == rhs.field && same_expr(lhs.object, rhs.object);
            else if constexpr (std::is_same_v<T, LiteralExpr>)
                return lhs.kind == rhs.kind && lhs.value == rhs.value;
            else
                return same_expr(lhs.target, rhs.target) && same_args(lhs.args, rhs.args);
        },
        a.node);
}

static std::string quote(const std::string &text)
{
    std::string out = "'";
    for (char c : text) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\'': out += "\\'"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '\'';
    return out;
}

static void render(std::ostream &os, const Expression &expr);

static void render_args(std::ostream &os, const std::vector<ExprPtr> &args)
{
    os << '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i != 0)
            os << ", ";
        render(os, *args[i]);
    }
    os << ')';
}

static void render(std::ostream &os, const Expression &expr)
{
    std::visit(
        [&](const auto &node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NameExpr>) {
                os << node.identifier;
            } else if constexpr (std::is_same_v<T, MemberExpr>) {
                render(os, *node.object);
                os << '.' << node.field;
            } else if constexpr (std::is_same_v<T, LiteralExpr>) {
                switch (node.kind) {
                case LiteralKind::Int: {
                    os << std::get<std::int64_t>(node.value);
                    break;
                }
                case LiteralKind::Str: os << quote(std::get<std::string>(node.value)); break;
                case LiteralKind::List: os << "[]"; break;
                case LiteralKind::None: os << "None"; break;
                }
            } else {
                render(os, *node.target);
                render_args(os, node.args);
            }
        },
        expr.node);
}

std::string to_string(const Expression &expr)
{
    std::ostringstream os;
    render(os, expr);
    return os.str();
}

bool operator==(const StatementNode &a, const StatementNode &b)
{
    if (a.id != b.id || a.owner != b.owner || a.line != b.line || a.kind.index() != b.kind.index())
        return false;
    if (auto *x = std::get_if<Assignment>(&a.kind)) {
        const auto &y = std::get<Assignment>(b.kind);
        return same_expr(x->lhs, y.lhs) && same_expr(x->rhs, y.rhs);
    }
    if (auto *x = std::get_if<InvocationStmt>(&a.kind)) {
        const auto &y = std::get<InvocationStmt>(b.kind);
        return same_expr(x->target, y.target) && same_args(x->args, y.args);
    }
    return same_expr(std::get<ReturnStmt>(a.kind).expr, std::get<ReturnStmt>(b.kind).expr);
}

std::string to_string(const StatementNode &node)
{
    std::ostringstream os;
    if (auto *a = std::get_if<Assignment>(&node.kind)) {
        render(os, *a->lhs);
        os << " = ";
        render(os, *a->rhs);
    } else if (auto *i = std::get_if<InvocationStmt>(&node.kind)) {
        render(os, *i->target);
        render_args(os, i->args);
    } else {
        const auto &r = std::get<ReturnStmt>(node.kind);
        os << "return";
        if (r.expr) {
            os << ' ';
            render(os, *r.expr);
        }
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Program

Program::Program()
{
    auto &b = builtins_;
    b.integer = add_builtin(TypeKind::Builtin, "Integer", std::nullopt, Intrinsic::None);
    b.str = add_builtin(TypeKind::Builtin, "Str", std::nullopt, Intrinsic::None);
    b.none = add_builtin(TypeKind::Builtin, "NoneType", std::nullopt, Intrinsic::None);
    b.array = add_builtin(TypeKind::Builtin, "array", std::nullopt, Intrinsic::None);
    b.append = add_builtin(TypeKind::Method, "array:append", b.array, Intrinsic::Append);
    b.pop = add_builtin(TypeKind::Method, "array:pop", b.array, Intrinsic::Pop);
    b.range = add_builtin(TypeKind::Builtin, "range", std::nullopt, Intrinsic::Range);
    b.len = add_builtin(TypeKind::Builtin, "len", std::nullopt, Intrinsic::Len);
    b.print = add_builtin(TypeKind::Builtin, "print", std::nullopt, Intrinsic::Print);
    b.getattr = add_builtin(TypeKind::Builtin, "getattr", std::nullopt, Intrinsic::GetAttr);
    b.item_of = add_builtin(TypeKind::Builtin, std::string(kItemOf), std::nullopt, Intrinsic::ItemOf);
    b.list_display = add_builtin(TypeKind::Builtin, std::string(kListDisplay), std::nullopt, Intrinsic::ListDisplay);
    b.add = add_builtin(TypeKind::Builtin, std::string(kAddOp), std::nullopt, Intrinsic::Add);
    b.arith = add_builtin(TypeKind::Builtin, std::string(kArithOp), std::nullopt, Intrinsic::Arith);
    b.compare = add_builtin(TypeKind::Builtin, std::string(kCompareOp), std::nullopt, Intrinsic::Compare);
    b.logical_not = add_builtin(TypeKind::Builtin, std::string(kNotOp), std::nullopt, Intrinsic::Not);
    b.either = add_builtin(TypeKind::Builtin, std::string(kEitherOp), std::nullopt, Intrinsic::Either);
    func_lookup_[{b.array, "append"}] = b.append;
    func_lookup_[{b.array, "pop"}] = b.pop;
    first_user_type_ = static_cast<std::uint32_t>(types_.size());
    module_ = add_type(TypeKind::Module, std::string(kModuleName), std::nullopt);
}

TypeId Program::add_builtin(TypeKind kind, std::string name, std::optional<TypeId> parent, Intrinsic intrinsic)
{
    TypeId id{static_cast<std::uint32_t>(types_.size())};
    std::string short_name = name;
    if (auto colon = name.rfind(':'); colon != std::string::npos)
        short_name = name.substr(colon + 1);
    types_.push_back(TypeInfo{kind, name, short_name, parent, std::nullopt, intrinsic});
    by_name_.emplace(std::move(name), id);
    return id;
}

TypeId Program::add_type(TypeKind kind, std::string qualified_name, std::optional<TypeId> parent)
{
    if (by_name_.contains(qualified_name))
        throw std::invalid_argument("duplicate type name '" + qualified_name + "'");
    if (kind == TypeKind::Builtin)
        throw std::invalid_argument("builtin types are pre-registered: '" + qualified_name + "'");
    if (parent && parent->index >= types_.size())
        throw std::invalid_argument("unknown parent for '" + qualified_name + "'");
    auto parent_kind = parent ? std::optional(info(*parent).kind) : std::nullopt;
    switch (kind) {
    case TypeKind::Module:
        if (parent)
            throw std::invalid_argument("module '" + qualified_name + "' cannot have a parent");
        break;
    case TypeKind::Class:
        if (parent_kind != TypeKind::Module)
            throw std::invalid_argument("class '" + qualified_name + "' must be contained in a module");
        break;
    case TypeKind::Method:
        if (parent_kind != TypeKind::Module && parent_kind != TypeKind::Class)
            throw std::invalid_argument("method '" + qualified_name + "' must be contained in a class or module");
        break;
    case TypeKind::Builtin: break;
    }
    return add_builtin(kind, std::move(qualified_name), parent, Intrinsic::None);
}

void Program::set_base(TypeId cls, TypeId base)
{
    if (info(cls).kind != TypeKind::Class || info(base).kind != TypeKind::Class)
        throw std::invalid_argument("inheritance is only defined between classes");
    for (std::optional<TypeId> t = base; t; t = info(*t).base)
        if (*t == cls)
            throw std::invalid_argument("inheritance cycle through '" + name_of(cls) + "'");
    types_[cls.index].base = base;
}

void Program::add_method(TypeId method, MethodBody body)
{
    const auto &mi = info(method);
    if (mi.kind != TypeKind::Method || is_builtin(method))
        throw std::invalid_argument("'" + mi.qualified_name + "' is not a user method");
    for (std::size_t i = 0; i < body.body.size(); ++i) {
        const auto &node = body.body[i];
        if (node.owner != method)
            throw std::invalid_argument("statement owner does not match method '" + mi.qualified_name + "'");
        if (auto *a = std::get_if<Assignment>(&node.kind)) {
            const auto &lhs = a->lhs->node;
            if (!std::holds_alternative<NameExpr>(lhs) && !std::holds_alternative<MemberExpr>(lhs))
                throw std::invalid_argument("assignment target must be a name or member access");
        }
        if (!node_index_.emplace(node.id, std::pair{method, i}).second)
            throw std::invalid_argument("duplicate statement id " + std::to_string(node.id.value));
    }
    if (mi.parent)
        func_lookup_[{*mi.parent, mi.name}] = method;
    methods_[method] = std::move(body);
}

std::optional<TypeId> Program::find(std::string_view qualified_name) const
{
    if (auto it = by_name_.find(qualified_name); it != by_name_.end())
        return it->second;
    return std::nullopt;
}

bool Program::is_user_class(TypeId id) const
{
    return !is_builtin(id) && info(id).kind == TypeKind::Class;
}

std::optional<TypeId> Program::resolve_name(std::string_view name) const
{
    if (auto it = func_lookup_.find(std::pair{module_, std::string(name)}); it != func_lookup_.end())
        return it->second;
    if (auto t = find(name)) {
        const auto &ti = info(*t);
        if (ti.kind == TypeKind::Class && ti.parent == module_)
            return t;
        if (ti.intrinsic != Intrinsic::None && ti.kind == TypeKind::Builtin)
            return t;
    }
    return std::nullopt;
}

std::optional<TypeId> Program::lookup_method(TypeId receiver, std::string_view name) const
{
    for (std::optional<TypeId> t = receiver; t; t = info(*t).base) {
        if (auto it = func_lookup_.find(std::pair{*t, std::string(name)}); it != func_lookup_.end())
            return it->second;
    }
    return std::nullopt;
}

std::vector<TypeId> Program::methods_of(TypeId receiver) const
{
    std::set<std::string> names;
    for (std::optional<TypeId> t = receiver; t; t = info(*t).base) {
        for (auto it = func_lookup_.lower_bound(std::pair{*t, std::string()});
             it != func_lookup_.end() && it->first.first == *t; ++it)
            names.insert(it->first.second);
    }
    std::vector<TypeId> out;
    for (const auto &n : names)
        out.push_back(*lookup_method(receiver, n));
    return out;
}

std::vector<TypeId> Program::owners_of(TypeId method) const
{
    std::vector<TypeId> out;
    const auto &name = info(method).name;
    for (std::uint32_t i = 0; i < types_.size(); ++i) {
        TypeId t{i};
        if ((is_user_class(t) || t == builtins_.array) && lookup_method(t, name) == method)
            out.push_back(t);
    }
    return out;
}

const MethodBody *Program::body(TypeId method) const
{
    auto it = methods_.find(method);
    return it == methods_.end() ? nullptr : &it->second;
}

const StatementNode *Program::node(NodeId id) const
{
    auto it = node_index_.find(id);
    if (it == node_index_.end())
        return nullptr;
    return &methods_.at(it->second.first).body[it->second.second];
}

bool structurally_equal(const Program &a, const Program &b)
{
    if (a.type_count() != b.type_count())
        return false;
    auto name_or_empty = [](const Program &p, std::optional<TypeId> t) {
        return t ? p.name_of(*t) : std::string();
    };
    for (std::uint32_t i = 0; i < a.type_count(); ++i) {
        const auto &x = a.info(TypeId{i});
        auto other = b.find(x.qualified_name);
        if (!other)
            return false;
        const auto &y = b.info(*other);
        if (x.kind != y.kind || name_or_empty(a, x.parent) != name_or_empty(b, y.parent) ||
            name_or_empty(a, x.base) != name_or_empty(b, y.base))
            return false;
    }
    if (a.methods().size() != b.methods().size())
        return false;
    for (const auto &[method, body] : a.methods()) {
        auto other = b.find(a.name_of(method));
        const MethodBody *ob = other ? b.body(*other) : nullptr;
        if (!ob || ob->params != body.params || ob->falls_through != body.falls_through ||
            ob->synthesized != body.synthesized || ob->body.size() != body.body.size())
            return false;
        for (std::size_t i = 0; i < body.body.size(); ++i) {
            auto x = body.body[i];
            auto y = ob->body[i];
            if (a.name_of(x.owner) != b.name_of(y.owner))
                return false;
            y.owner = x.owner;
            if (!(x == y))
                return false;
        }
    }
    if (a.entry_points.size() != b.entry_points.size())
        return false;
    for (std::size_t i = 0; i < a.entry_points.size(); ++i)
        if (a.name_of(a.entry_points[i]) != b.name_of(b.entry_points[i]))
            return false;
    return true;
}

void add_missing_constructors(Program &program)
{
    // Bases first, so derived classes inherit the synthesized constructor.
    std::function<void(TypeId)> ensure = [&](TypeId c) {
        if (auto base = program.info(c).base)
            ensure(*base);
        if (program.lookup_method(c, "__init__"))
            return;
        TypeId ctor = program.add_type(TypeKind::Method, program.name_of(c) + ":__init__", c);
        MethodBody body;
        body.synthesized = true;
        body.falls_through = false;
        program.add_method(ctor, std::move(body));
    };
    const std::size_t count = program.type_count();
    for (std::uint32_t i = 0; i < count; ++i)
        if (program.is_user_class(TypeId{i}))
            ensure(TypeId{i});
}

} // namespace nocfg
