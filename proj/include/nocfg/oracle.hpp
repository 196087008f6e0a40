#pragma once

// Reference interpreter: runs the structured source of a program with real
// control flow and per-object state, recording the calls that actually happen.

#include "nocfg/callgraph.hpp"
#include "nocfg/ir.hpp"

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace nocfg {

inline constexpr std::size_t kDefaultStepBudget = 100000;

enum class Outcome { Completed, BudgetExhausted, RuntimeError };

std::string_view to_string(Outcome outcome);

struct InterpretResult {
    /// Calls observed up to the point execution stopped.
    CallGraph graph;
    std::size_t steps = 0;
    Outcome outcome = Outcome::Completed;
    std::string detail; // runtime error message
    /// Runtime types each variable held, keyed like the analysis environment:
    /// method locals and return slots by method, fields by the object's class,
    /// list elements by `(array, items)`.
    std::map<Variable, std::set<TypeId>> observed;
};

/// The entry must be a method without parameters whose structured source is
/// available (programs built by the frontend). Never throws for faults of the
/// interpreted program; they end up in `outcome`.
InterpretResult interpret(const Program &program, TypeId entry, std::size_t step_budget = kDefaultStepBudget);

} // namespace nocfg
