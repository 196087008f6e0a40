#pragma once

// Parser for the Python-like subject language and the lowering of structured
// control flow into flat StatementNode lists.

#include "nocfg/ast.hpp"
#include "nocfg/ir.hpp"
#include "nocfg/type_env.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace nocfg {

struct SourceModule {
    std::string path;
    std::string text;
};

/// Base of all frontend failures; carries a 1-based source position.
class FrontendError : public std::runtime_error {
public:
    FrontendError(const std::string &path, int line, int column, const std::string &message);

    const std::string &path() const { return path_; }
    int line() const { return line_; }
    int column() const { return column_; }
    const std::string &message() const { return message_; }

private:
    std::string path_;
    int line_;
    int column_;
    std::string message_;
};

/// Malformed input.
class SyntaxError : public FrontendError {
public:
    using FrontendError::FrontendError;
};

/// Well-formed Python that lies outside the accepted subset.
class UnsupportedConstruct : public FrontendError {
public:
    using FrontendError::FrontendError;
};

/// Parses source text into the structured tree.
ast::Module parse_syntax(const SourceModule &source);

/// Parses and lowers a module. Every method body of the result holds only
/// assignment, invocation and return nodes; each node carries its source line.
Program parse(const SourceModule &source);

/// Builds the Program for an already parsed module.
Program build_program(const ast::Module &module, const std::string &path = {});

/// Flattens one structured statement, keeping only its type-affecting parts
/// in source order. `for x in e` becomes `x = itemOf(e)` followed by the body.
std::vector<StatementNode> lower_control_flow(const ast::Stmt &stmt, TypeId owner, NodeIdSource &ids);

/// Lowers a source expression to the IR.
ExprPtr lower_expr(const ast::Expr &expr);

/// Element types of the collections in `collection_types`: the `items` field
/// of `array`, payload-free strings for `Str`. Other members contribute
/// nothing.
TypeSet item_of(const TypeSet &collection_types, const TypeEnv &env, const Program &program);

} // namespace nocfg
