#pragma once

// Flow-insensitive interprocedural type inference over SCFGs with per-context
// summaries, and the call graph it induces.

#include "nocfg/callgraph.hpp"
#include "nocfg/ir.hpp"
#include "nocfg/scfg.hpp"
#include "nocfg/type_env.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nocfg {

class EntryNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Diagnostic {
    enum class Kind { UnresolvedCall, ArityMismatch, LiteralWidened };
    Kind kind;
    NodeId node;
    int line = 0;
    std::string detail;

    friend auto operator<=>(const Diagnostic &, const Diagnostic &) = default;
};

std::string_view to_string(Diagnostic::Kind kind);

/// A method analyzed from a particular input environment.
struct ContextKey {
    TypeId method;
    TypeEnv input;
    friend auto operator<=>(const ContextKey &, const ContextKey &) = default;
};

/// Receives every table update; used to check that tables only grow.
class AnalysisObserver {
public:
    virtual ~AnalysisObserver() = default;
    virtual void on_state(std::size_t context, Vertex vertex, const TypeEnv *before, const TypeEnv &after) = 0;
    virtual void on_summary(std::size_t context, const TypeEnv *before, const TypeEnv &after) = 0;
};

struct AnalysisOptions {
    /// Maximum number of string payloads concatenated to form a reflective name.
    int reflect_depth = 2;
    std::size_t literal_limit = kDefaultLiteralLimit;
    /// Worklist steps before BudgetExceeded; 0 means unlimited.
    std::size_t max_steps = 0;
    /// Keep per-context tables in the result.
    bool keep_contexts = false;
    AnalysisObserver *observer = nullptr;
};

struct AnalysisStats {
    std::size_t steps = 0;
    std::size_t contexts = 0;
    /// Successful extensions of a stored partial state.
    std::size_t state_growths = 0;
    std::size_t summary_growths = 0;
    /// Sum over contexts of the number of SCFG vertices.
    std::size_t context_vertices = 0;
    /// Distinct variables and type values appearing in any table.
    std::size_t variables = 0;
    std::size_t type_values = 0;
};

struct ContextRecord {
    ContextKey key;
    std::vector<std::optional<TypeEnv>> states; // indexed by SCFG vertex
    std::optional<TypeEnv> summary;
};

struct AnalysisResult {
    /// Join of every partial state of every context.
    TypeEnv env;
    CallGraph graph;
    std::vector<Diagnostic> diagnostics;
    AnalysisStats stats;
    std::vector<ContextRecord> contexts; // filled when keep_contexts is set
};

// ---------------------------------------------------------------------------
// Building blocks. Expressions given to eval_expr must be call-free; call
// results are supplied by the engine.

/// Names resolve to their local binding plus any module-level definition of
/// that name. Member accesses are restricted to the receiver types.
TypeSet eval_expr(const TypeEnv &env, const Expression &expr, TypeId scope, const Program &program);

/// Variables an assignment target denotes under env. A member target yields
/// one variable per receiver type.
std::vector<Variable> lhs_variables(const TypeEnv &env, const Expression &lhs, TypeId scope, const Program &program);

/// Weak update of every target variable with the value set.
TypeEnv transform_assignment(const TypeEnv &env, const Assignment &node, TypeId scope, const TypeSet &rhs,
                             const Program &program, std::size_t literal_limit = kDefaultLiteralLimit);
/// Call-free right-hand side.
TypeEnv transform_assignment(const TypeEnv &env, const StatementNode &node, const Program &program);

/// Extends the owner's return slot; a bare return contributes NoneType.
TypeEnv transform_return(const TypeEnv &env, const StatementNode &node, const Program &program);

/// A possible callee of an invocation and the receiver types bound to its
/// `self` parameter (empty for plain functions and builtins).
struct CallTarget {
    TypeId callee;
    TypeSet self;
    /// Calling a class: the callee is its constructor and the value is the class.
    std::optional<TypeId> instantiates;
    friend auto operator<=>(const CallTarget &, const CallTarget &) = default;
};

/// Targets of a call with a call-free target expression. Calling a class
/// targets its constructor; calling `getattr` targets the intrinsic, whose
/// value is computed by resolve_reflective.
std::vector<CallTarget> resolve_targets(const TypeEnv &env, const InvocationExpr &call, TypeId scope,
                                        const Program &program);

/// Methods and fields reachable from the receivers under every name formed
/// by concatenating 1..k distinct string payloads of `names`, plus `fallback`.
/// A payload-free string in `names` stands for any name.
TypeSet resolve_reflective(const TypeEnv &env, const TypeSet &receivers, const TypeSet &names,
                           const TypeSet &fallback, const Program &program, int k = 2);

/// Candidate names for reflective lookup, in sorted order.
std::vector<std::string> reflective_names(const TypeSet &names, const Program &program, int k);

/// Callee input: the caller's field bindings plus parameter bindings.
/// Returns the number of arguments that found no parameter or parameters that
/// found no argument through `arity_gap`.
TypeEnv bind_parameters(const TypeEnv &env, const CallTarget &target, const std::vector<TypeSet> &args,
                        const Program &program, int *arity_gap = nullptr);

/// Drops method locals, keeping fields and the method's return slot.
TypeEnv strip_locals(const TypeEnv &env, TypeId method, const Program &program);

// ---------------------------------------------------------------------------

AnalysisResult run_analysis(const Program &program, const std::vector<TypeId> &entries,
                            const AnalysisOptions &options = {});
/// Entry names are qualified method names. Throws EntryNotFound.
AnalysisResult run_analysis(const Program &program, const std::vector<std::string> &entries,
                            const AnalysisOptions &options = {});

/// Re-analyzes one context's method from its input against the final summary
/// tables of a completed run (requires keep_contexts) and returns the
/// stripped fixed point.
TypeEnv replay_context(const Program &program, const AnalysisResult &result, std::size_t context,
                       const AnalysisOptions &options = {});

} // namespace nocfg
