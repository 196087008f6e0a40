#pragma once

// Language-independent intermediate representation: program types, flat
// statements and the whole-program model with scope and method lookup.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace nocfg {

namespace ast {
struct FunctionDef;
}

enum class TypeKind { Module, Class, Method, Builtin };

std::string_view to_string(TypeKind kind);
std::optional<TypeKind> type_kind_from_string(std::string_view text);

/// Handle to a type registered in a Program. Only meaningful together with the
/// Program that issued it.
struct TypeId {
    std::uint32_t index = 0;
    friend auto operator<=>(const TypeId &, const TypeId &) = default;
};

/// Builtins with hard-wired semantics. Operators of the subject language are
/// lowered to invocations of the operator intrinsics.
enum class Intrinsic {
    None,
    Range,
    Len,
    Print,
    GetAttr,
    ItemOf,
    ListDisplay,
    Add,
    Arith,
    Compare,
    Not,
    Either,
    Append,
    Pop,
};

struct TypeInfo {
    TypeKind kind = TypeKind::Builtin;
    std::string qualified_name;
    std::string name; // last component of qualified_name
    std::optional<TypeId> parent;
    std::optional<TypeId> base; // superclass, user classes only
    Intrinsic intrinsic = Intrinsic::None;
};

// ---------------------------------------------------------------------------
// Expressions

using LiteralPayload = std::variant<std::monostate, std::int64_t, std::string>;

enum class LiteralKind { Int, Str, List, None };

struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

struct NameExpr {
    std::string identifier;
};

struct MemberExpr {
    ExprPtr object;
    std::string field;
};

struct LiteralExpr {
    LiteralKind kind = LiteralKind::None;
    LiteralPayload value; // Int and Str only
};

struct InvocationExpr {
    ExprPtr target;
    std::vector<ExprPtr> args;
};

struct Expression {
    std::variant<NameExpr, MemberExpr, LiteralExpr, InvocationExpr> node;
};

ExprPtr make_name(std::string identifier);
ExprPtr make_member(ExprPtr object, std::string field);
ExprPtr make_int(std::int64_t value);
ExprPtr make_str(std::string value);
ExprPtr make_list();
ExprPtr make_none();
ExprPtr make_call(ExprPtr target, std::vector<ExprPtr> args);

bool operator==(const Expression &a, const Expression &b);
bool same_expr(const ExprPtr &a, const ExprPtr &b);

/// Renders an expression in subject-language syntax. The output parses back
/// to the same expression.
std::string to_string(const Expression &expr);

// Reserved identifiers produced by lowering.
inline constexpr std::string_view kItemOf = "itemOf";
inline constexpr std::string_view kListDisplay = "__list__";
inline constexpr std::string_view kAddOp = "__add__";
inline constexpr std::string_view kArithOp = "__arith__";
inline constexpr std::string_view kCompareOp = "__cmp__";
inline constexpr std::string_view kNotOp = "__not__";
inline constexpr std::string_view kEitherOp = "__either__";

// ---------------------------------------------------------------------------
// Statements

struct NodeId {
    std::uint32_t value = 0;
    friend auto operator<=>(const NodeId &, const NodeId &) = default;
};

/// Hands out node identifiers in allocation (parse) order.
class NodeIdSource {
public:
    explicit NodeIdSource(std::uint32_t first = 0) : next_(first) {}
    NodeId operator()() { return NodeId{next_++}; }
    std::uint32_t peek() const { return next_; }

private:
    std::uint32_t next_;
};

struct Assignment {
    ExprPtr lhs;
    ExprPtr rhs;
};

struct InvocationStmt {
    ExprPtr target;
    std::vector<ExprPtr> args;
};

struct ReturnStmt {
    ExprPtr expr; // null for a bare `return`
};

struct StatementNode {
    NodeId id;
    std::variant<Assignment, InvocationStmt, ReturnStmt> kind;
    TypeId owner;
    int line = 0;
};

bool operator==(const StatementNode &a, const StatementNode &b);
std::string to_string(const StatementNode &node);

// ---------------------------------------------------------------------------
// Variables and abstract values

/// Name of the per-method return slot. Not expressible in source.
inline constexpr std::string_view kReturnSlot = "<return>";

struct Variable {
    TypeId scope;
    std::string name;
    friend auto operator<=>(const Variable &, const Variable &) = default;
};

struct TypeValue {
    TypeId type;
    LiteralPayload literal;

    friend auto operator<=>(const TypeValue &, const TypeValue &) = default;
    bool has_literal() const { return !std::holds_alternative<std::monostate>(literal); }
};

// ---------------------------------------------------------------------------
// Program

struct MethodBody {
    std::vector<std::string> params;
    std::vector<StatementNode> body;
    /// Control may reach the end of the method without a `return`.
    bool falls_through = true;
    /// Implicit constructor of a class without `__init__`.
    bool synthesized = false;
    /// Structured source, present when the program came from the frontend.
    std::shared_ptr<const ast::FunctionDef> source;
};

struct Builtins {
    TypeId integer, str, none, array;
    TypeId append, pop;
    TypeId range, len, print, getattr, item_of;
    TypeId list_display, add, arith, compare, logical_not, either;
};

class Program {
public:
    static constexpr std::string_view kModuleName = "<module>";

    Program();

    /// Registers a type. Throws std::invalid_argument on a duplicate name or a
    /// parent that violates the containment rules.
    TypeId add_type(TypeKind kind, std::string qualified_name, std::optional<TypeId> parent);
    void set_base(TypeId cls, TypeId base);
    /// Attaches a body to a Method type and makes it visible to lookup through
    /// its parent.
    void add_method(TypeId method, MethodBody body);

    const TypeInfo &info(TypeId id) const { return types_.at(id.index); }
    const std::string &name_of(TypeId id) const { return info(id).qualified_name; }
    std::size_t type_count() const { return types_.size(); }
    std::span<const TypeInfo> types() const { return types_; }
    std::optional<TypeId> find(std::string_view qualified_name) const;

    TypeId module() const { return module_; }
    const Builtins &builtins() const { return builtins_; }
    bool is_builtin(TypeId id) const { return id.index < first_user_type_; }
    bool is_user_class(TypeId id) const;

    /// Names visible from any method body: module-level functions and classes,
    /// then builtin callables.
    std::optional<TypeId> resolve_name(std::string_view name) const;

    /// Method lookup on a receiver type: own methods, then the superclass
    /// chain. Absence is a normal outcome.
    std::optional<TypeId> lookup_method(TypeId receiver, std::string_view name) const;

    /// Every method reachable by lookup on the receiver, overrides resolved.
    std::vector<TypeId> methods_of(TypeId receiver) const;

    /// Classes whose lookup of the method's name yields the method.
    std::vector<TypeId> owners_of(TypeId method) const;

    const MethodBody *body(TypeId method) const;
    const std::map<TypeId, MethodBody> &methods() const { return methods_; }
    const StatementNode *node(NodeId id) const;

    std::vector<TypeId> entry_points;

private:
    TypeId add_builtin(TypeKind kind, std::string name, std::optional<TypeId> parent, Intrinsic intrinsic);

    std::vector<TypeInfo> types_;
    std::map<std::string, TypeId, std::less<>> by_name_;
    std::map<std::pair<TypeId, std::string>, TypeId> func_lookup_;
    std::map<TypeId, MethodBody> methods_;
    std::map<NodeId, std::pair<TypeId, std::size_t>> node_index_;
    std::uint32_t first_user_type_ = 0;
    TypeId module_;
    Builtins builtins_{};
};

inline std::optional<TypeId> lookup_method(const Program &program, TypeId receiver, std::string_view name)
{
    return program.lookup_method(receiver, name);
}

inline TypeId scope_of(const StatementNode &node) { return node.owner; }

/// Gives every user class without `__init__` on its superclass chain an
/// empty synthesized constructor. Idempotent.
void add_missing_constructors(Program &program);

/// Structural comparison ignoring structured source attachments.
bool structurally_equal(const Program &a, const Program &b);

} // namespace nocfg
