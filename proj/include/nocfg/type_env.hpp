#pragma once

// The analysis lattice: sets of abstract type values and environments mapping
// variables to them.

#include "nocfg/ir.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <set>

namespace nocfg {

inline constexpr std::size_t kDefaultLiteralLimit = 32;

/// A set of TypeValues. A payload-free value of a literal type (e.g. `Str`)
/// stands for every payload of that type and absorbs payload-carrying
/// members. A type with more than `literal_limit` distinct payloads collapses
/// to its payload-free value.
class TypeSet {
public:
    using const_iterator = std::set<TypeValue>::const_iterator;

    TypeSet() = default;
    TypeSet(std::initializer_list<TypeValue> values);

    /// Returns true when the set changed. `widened` is set when the insert
    /// collapsed a type's payloads.
    bool insert(const TypeValue &value, std::size_t literal_limit = kDefaultLiteralLimit, bool *widened = nullptr);
    bool join(const TypeSet &other, std::size_t literal_limit = kDefaultLiteralLimit, bool *widened = nullptr);

    /// Exact membership.
    bool contains(const TypeValue &value) const { return values_.contains(value); }
    /// Membership up to payload subsumption.
    bool covers(const TypeValue &value) const;
    bool contains_type(TypeId type) const;
    /// Lattice order: every member of this set is covered by `other`.
    bool leq(const TypeSet &other) const;

    std::set<TypeId> types() const;

    bool empty() const { return values_.empty(); }
    std::size_t size() const { return values_.size(); }
    const_iterator begin() const { return values_.begin(); }
    const_iterator end() const { return values_.end(); }

    friend bool operator==(const TypeSet &, const TypeSet &) = default;
    friend auto operator<=>(const TypeSet &a, const TypeSet &b) { return a.values_ <=> b.values_; }

private:
    std::set<TypeValue> values_;
};

TypeSet singleton(TypeId type);

/// Mapping Variable -> TypeSet. Absent keys denote the empty set; empty sets
/// are never stored, so structural equality is lattice equality.
class TypeEnv {
public:
    using Map = std::map<Variable, TypeSet>;

    const TypeSet &at(const Variable &var) const;
    bool contains(const Variable &var) const { return bindings_.contains(var); }

    bool join(const Variable &var, const TypeSet &types, std::size_t literal_limit = kDefaultLiteralLimit,
              bool *widened = nullptr);
    bool join(const TypeEnv &other, std::size_t literal_limit = kDefaultLiteralLimit, bool *widened = nullptr);
    bool leq(const TypeEnv &other) const;

    void erase_if(const std::function<bool(const Variable &)> &pred);
    /// Bindings whose variable satisfies the predicate.
    TypeEnv filtered(const std::function<bool(const Variable &)> &pred) const;

    bool empty() const { return bindings_.empty(); }
    std::size_t size() const { return bindings_.size(); }
    Map::const_iterator begin() const { return bindings_.begin(); }
    Map::const_iterator end() const { return bindings_.end(); }

    friend bool operator==(const TypeEnv &, const TypeEnv &) = default;
    friend auto operator<=>(const TypeEnv &a, const TypeEnv &b) { return a.bindings_ <=> b.bindings_; }

private:
    Map bindings_;
};

/// True for variables scoped to a class, module or builtin type (fields),
/// false for method locals and return slots.
bool is_field(const Program &program, const Variable &var);

std::string to_string(const Program &program, const TypeValue &value);
std::string to_string(const Program &program, const TypeSet &set);
/// One `scope name -> {types}` line per binding, sorted by qualified names.
std::string to_string(const Program &program, const TypeEnv &env);

} // namespace nocfg
