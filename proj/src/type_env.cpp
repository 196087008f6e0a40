#include "nocfg/type_env.hpp"

#include <algorithm>
#include <sstream>
#include <vector>

namespace nocfg {

TypeSet::TypeSet(std::initializer_list<TypeValue> values)
{
    for (const auto &v : values)
        insert(v);
}

TypeSet singleton(TypeId type) { return TypeSet{TypeValue{type, {}}}; }

bool TypeSet::insert(const TypeValue &value, std::size_t literal_limit, bool *widened)
{
    TypeValue bare{value.type, {}};
    if (!value.has_literal()) {
        if (values_.contains(bare))
            return false;
        auto first = values_.lower_bound(bare);
        auto last = first;
        while (last != values_.end() && last->type == value.type)
            ++last;
        values_.erase(first, last);
        values_.insert(bare);
        return true;
    }
    if (values_.contains(bare) || values_.contains(value))
        return false;
    values_.insert(value);
    auto first = values_.lower_bound(bare);
    std::size_t count = 0;
    for (auto it = first; it != values_.end() && it->type == value.type; ++it)
        ++count;
    if (count > literal_limit) {
        insert(bare, literal_limit);
        if (widened)
            *widened = true;
    }
    return true;
}

bool TypeSet::join(const TypeSet &other, std::size_t literal_limit, bool *widened)
{
    bool changed = false;
    for (const auto &v : other)
        changed |= insert(v, literal_limit, widened);
    return changed;
}

bool TypeSet::covers(const TypeValue &value) const
{
    return values_.contains(value) || values_.contains(TypeValue{value.type, {}});
}

bool TypeSet::contains_type(TypeId type) const
{
    auto it = values_.lower_bound(TypeValue{type, {}});
    return it != values_.end() && it->type == type;
}

bool TypeSet::leq(const TypeSet &other) const
{
    return std::all_of(values_.begin(), values_.end(), [&](const TypeValue &v) { return other.covers(v); });
}

std::set<TypeId> TypeSet::types() const
{
    std::set<TypeId> out;
    for (const auto &v : values_)
        out.insert(v.type);
    return out;
}

const TypeSet &TypeEnv::at(const Variable &var) const
{
    static const TypeSet empty;
    auto it = bindings_.find(var);
    return it == bindings_.end() ? empty : it->second;
}

bool TypeEnv::join(const Variable &var, const TypeSet &types, std::size_t literal_limit, bool *widened)
{
    if (types.empty())
        return false;
    auto [it, inserted] = bindings_.try_emplace(var);
    bool changed = it->second.join(types, literal_limit, widened);
    return inserted || changed;
}

bool TypeEnv::join(const TypeEnv &other, std::size_t literal_limit, bool *widened)
{
    bool changed = false;
    for (const auto &[var, types] : other)
        changed |= join(var, types, literal_limit, widened);
    return changed;
}

bool TypeEnv::leq(const TypeEnv &other) const
{
    return std::all_of(bindings_.begin(), bindings_.end(),
                       [&](const auto &binding) { return binding.second.leq(other.at(binding.first)); });
}

void TypeEnv::erase_if(const std::function<bool(const Variable &)> &pred)
{
    std::erase_if(bindings_, [&](const auto &binding) { return pred(binding.first); });
}

TypeEnv TypeEnv::filtered(const std::function<bool(const Variable &)> &pred) const
{
    TypeEnv out;
    for (const auto &binding : bindings_)
        if (pred(binding.first))
            out.bindings_.insert(binding);
    return out;
}

bool is_field(const Program &program, const Variable &var)
{
    return program.info(var.scope).kind != TypeKind::Method;
}

std::string to_string(const Program &program, const TypeValue &value)
{
    std::string out = program.name_of(value.type);
    if (auto *s = std::get_if<std::string>(&value.literal))
        out += "(\"" + *s + "\")";
    else if (auto *i = std::get_if<std::int64_t>(&value.literal))
        out += "(" + std::to_string(*i) + ")";
    return out;
}

std::string to_string(const Program &program, const TypeSet &set)
{
    std::vector<std::string> parts;
    for (const auto &v : set)
        parts.push_back(to_string(program, v));
    std::sort(parts.begin(), parts.end());
    std::string out = "{";
    for (std::size_t i = 0; i < parts.size(); ++i)
        out += (i ? ", " : "") + parts[i];
    return out + "}";
}

std::string to_string(const Program &program, const TypeEnv &env)
{
    std::vector<std::string> lines;
    for (const auto &[var, types] : env)
        lines.push_back(program.name_of(var.scope) + " " + var.name + " -> " + to_string(program, types));
    std::sort(lines.begin(), lines.end());
    std::ostringstream os;
    for (const auto &line : lines)
        os << line << '\n';
    return os.str();
}

} // namespace nocfg
