#pragma once

// Structured syntax tree of the subject language, as produced by the parser.
// Lowering flattens it into StatementNodes; the reference interpreter runs it
// as written.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nocfg::ast {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Add, Sub, Mul, FloorDiv, Mod };
enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicalOp { And, Or };

struct Name {
    std::string id;
};
struct Attribute {
    ExprPtr object;
    std::string attr;
};
struct IntLit {
    std::int64_t value = 0;
};
struct StrLit {
    std::string value;
};
struct NoneLit {};
struct ListDisplay {
    std::vector<ExprPtr> elements;
};
struct Call {
    ExprPtr func;
    std::vector<ExprPtr> args;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs, rhs;
};
struct Comparison {
    CompareOp op;
    ExprPtr lhs, rhs;
};
struct Logical {
    LogicalOp op;
    ExprPtr lhs, rhs;
};
struct Not {
    ExprPtr operand;
};

struct Expr {
    std::variant<Name, Attribute, IntLit, StrLit, NoneLit, ListDisplay, Call, Binary, Comparison, Logical, Not> node;
    int line = 0;
    int column = 0;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct Assign {
    ExprPtr target;
    ExprPtr value;
};
struct AugAssign {
    ExprPtr target;
    BinaryOp op;
    ExprPtr value;
};
struct ExprStmt {
    ExprPtr expr;
};
struct Return {
    ExprPtr value; // null for a bare return
};
struct If {
    ExprPtr condition;
    Block body;
    Block orelse;
};
struct While {
    ExprPtr condition;
    Block body;
};
struct For {
    std::string target;
    ExprPtr iterable;
    Block body;
};
struct Pass {};
struct Break {};
struct Continue {};

struct Stmt {
    std::variant<Assign, AugAssign, ExprStmt, Return, If, While, For, Pass, Break, Continue> node;
    int line = 0;
};

struct FunctionDef {
    std::string name;
    std::vector<std::string> params;
    Block body;
    int line = 0;
};

struct ClassDef {
    std::string name;
    std::optional<std::string> base;
    std::vector<std::shared_ptr<const FunctionDef>> methods;
    int line = 0;
};

/// Top-level definitions in source order.
struct Module {
    std::vector<std::variant<ClassDef, std::shared_ptr<const FunctionDef>>> definitions;
};

/// True when every path through the block ends in a `return`.
bool always_returns(const Block &block);

} // namespace nocfg::ast
