#include "nocfg/json_ast.hpp"

#include <json.hpp>

namespace nocfg {

using nlohmann::json;

namespace {

json expr_to_json(const Expression &e)
{
    return std::visit(
        [](const auto &node) -> json {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NameExpr>) {
                return {{"kind", "name"}, {"identifier", node.identifier}};
            } else if constexpr (std::is_same_v<T, MemberExpr>) {
                return {{"kind", "member"}, {"object", expr_to_json(*node.object)}, {"field", node.field}};
            } else if constexpr (std::is_same_v<T, LiteralExpr>) {
                json j = {{"kind", "literal"}};
                switch (node.kind) {
                case LiteralKind::Int:
                    j["literal_kind"] = "int";
                    j["value"] = std::get<std::int64_t>(node.value);
                    break;
                case LiteralKind::Str:
                    j["literal_kind"] = "str";
                    j["value"] = std::get<std::string>(node.value);
                    break;
                case LiteralKind::List: j["literal_kind"] = "list"; break;
                case LiteralKind::None: j["literal_kind"] = "none"; break;
                }
                return j;
            } else {
                json args = json::array();
                for (const auto &a : node.args)
                    args.push_back(expr_to_json(*a));
                return {{"kind", "invocation"}, {"target", expr_to_json(*node.target)}, {"args", std::move(args)}};
            }
        },
        e.node);
}

json stmt_to_json(const StatementNode &n)
{
    json j = {{"id", n.id.value}, {"line", n.line}};
    std::visit(
        [&](const auto &s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Assignment>) {
                j["kind"] = "assignment";
                j["lhs"] = expr_to_json(*s.lhs);
                j["rhs"] = expr_to_json(*s.rhs);
            } else if constexpr (std::is_same_v<T, InvocationStmt>) {
                j["kind"] = "invocation";
                j["target"] = expr_to_json(*s.target);
                json args = json::array();
                for (const auto &a : s.args)
                    args.push_back(expr_to_json(*a));
                j["args"] = std::move(args);
            } else {
                j["kind"] = "return";
                j["expr"] = s.expr ? expr_to_json(*s.expr) : json(nullptr);
            }
        },
        n.kind);
    return j;
}

[[noreturn]] void fail(const std::string &where, const std::string &what)
{
    throw JsonAstError(where + ": " + what);
}

const json &field(const json &obj, const char *key, const std::string &where)
{
    if (!obj.is_object())
        fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        fail(where, std::string("missing '") + key + "'");
    return *it;
}

std::string string_field(const json &obj, const char *key, const std::string &where)
{
    const auto &v = field(obj, key, where);
    if (!v.is_string())
        fail(where, std::string("'") + key + "' must be a string");
    return v.get<std::string>();
}

std::vector<ExprPtr> args_from_json(const json &arr, const std::string &where);

ExprPtr expr_from_json(const json &j, const std::string &where)
{
    const auto kind = string_field(j, "kind", where);
    if (kind == "name")
        return make_name(string_field(j, "identifier", where));
    if (kind == "member")
        return make_member(expr_from_json(field(j, "object", where), where + ".object"),
                           string_field(j, "field", where));
    if (kind == "invocation")
        return make_call(expr_from_json(field(j, "target", where), where + ".target"),
                         args_from_json(field(j, "args", where), where + ".args"));
    if (kind == "literal") {
        const auto lk = string_field(j, "literal_kind", where);
        if (lk == "int") {
            const auto &v = field(j, "value", where);
            if (!v.is_number_integer())
                fail(where, "int literal needs an integer value");
            return make_int(v.get<std::int64_t>());
        }
        if (lk == "str")
            return make_str(string_field(j, "value", where));
        if (lk == "list")
            return make_list();
        if (lk == "none")
            return make_none();
        fail(where, "unknown literal_kind '" + lk + "'");
    }
    fail(where, "unknown expression kind '" + kind + "'");
}

std::vector<ExprPtr> args_from_json(const json &arr, const std::string &where)
{
    if (!arr.is_array())
        fail(where, "expected an array");
    std::vector<ExprPtr> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(expr_from_json(arr[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

StatementNode stmt_from_json(const json &j, TypeId owner, const std::string &where)
{
    StatementNode n;
    n.owner = owner;
    const auto &id = field(j, "id", where);
    if (!id.is_number_unsigned())
        fail(where, "'id' must be a non-negative integer");
    n.id = NodeId{id.get<std::uint32_t>()};
    if (j.contains("line")) {
        if (!j["line"].is_number_integer())
            fail(where, "'line' must be an integer");
        n.line = j["line"].get<int>();
    }
    const auto kind = string_field(j, "kind", where);
    if (kind == "assignment") {
        n.kind = Assignment{expr_from_json(field(j, "lhs", where), where + ".lhs"),
                            expr_from_json(field(j, "rhs", where), where + ".rhs")};
    } else if (kind == "invocation") {
        n.kind = InvocationStmt{expr_from_json(field(j, "target", where), where + ".target"),
                                args_from_json(field(j, "args", where), where + ".args")};
    } else if (kind == "return") {
        const json *e = j.contains("expr") ? &j["expr"] : nullptr;
        n.kind = ReturnStmt{e && !e->is_null() ? expr_from_json(*e, where + ".expr") : nullptr};
    } else {
        fail(where, "unknown statement kind '" + kind + "'");
    }
    return n;
}

} // namespace

std::string program_to_json(const Program &program)
{
    json types = json::array();
    for (std::uint32_t i = 0; i < program.type_count(); ++i) {
        TypeId t{i};
        if (program.is_builtin(t) || t == program.module())
            continue;
        const auto &info = program.info(t);
        json j = {{"kind", std::string(to_string(info.kind))},
                  {"qualified_name", info.qualified_name},
                  {"parent", info.parent ? json(program.name_of(*info.parent)) : json(nullptr)}};
        if (info.base)
            j["base"] = program.name_of(*info.base);
        types.push_back(std::move(j));
    }
    json methods = json::object();
    for (const auto &[method, body] : program.methods()) {
        json stmts = json::array();
        for (const auto &n : body.body)
            stmts.push_back(stmt_to_json(n));
        methods[program.name_of(method)] = {{"params", body.params},
                                            {"body", std::move(stmts)},
                                            {"falls_through", body.falls_through},
                                            {"synthesized", body.synthesized}};
    }
    json entries = json::array();
    for (TypeId e : program.entry_points)
        entries.push_back(program.name_of(e));
    json doc = {{"types", std::move(types)}, {"methods", std::move(methods)}, {"entry_points", std::move(entries)}};
    return doc.dump(2) + "\n";
}

namespace {

Program read_program(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw JsonAstError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object())
        fail("document", "expected an object");

    Program program;
    auto lookup = [&](const std::string &name, const std::string &where) {
        auto t = program.find(name);
        if (!t)
            fail(where, "unknown type '" + name + "'");
        return *t;
    };

    const auto &types = field(doc, "types", "document");
    if (!types.is_array())
        fail("types", "expected an array");
    std::vector<std::pair<TypeId, std::string>> bases;
    for (std::size_t i = 0; i < types.size(); ++i) {
        const std::string where = "types[" + std::to_string(i) + "]";
        const auto kind_name = string_field(types[i], "kind", where);
        auto kind = type_kind_from_string(kind_name);
        if (!kind || *kind == TypeKind::Builtin)
            fail(where, "invalid kind '" + kind_name + "'");
        const auto name = string_field(types[i], "qualified_name", where);
        std::optional<TypeId> parent;
        const auto &p = field(types[i], "parent", where);
        if (!p.is_null()) {
            if (!p.is_string())
                fail(where, "'parent' must be a string or null");
            parent = lookup(p.get<std::string>(), where);
        }
        TypeId id;
        try {
            id = program.add_type(*kind, name, parent);
        } catch (const std::invalid_argument &e) {
            fail(where, e.what());
        }
        if (types[i].contains("base") && !types[i]["base"].is_null())
            bases.emplace_back(id, string_field(types[i], "base", where));
    }
    for (const auto &[cls, base] : bases) {
        try {
            program.set_base(cls, lookup(base, program.name_of(cls)));
        } catch (const std::invalid_argument &e) {
            fail(program.name_of(cls), e.what());
        }
    }

    const auto &methods = field(doc, "methods", "document");
    if (!methods.is_object())
        fail("methods", "expected an object");
    for (const auto &[name, m] : methods.items()) {
        const std::string where = "methods." + name;
        TypeId id = lookup(name, where);
        MethodBody body;
        const auto &params = field(m, "params", where);
        if (!params.is_array())
            fail(where, "'params' must be an array");
        for (const auto &p : params) {
            if (!p.is_string())
                fail(where, "parameter names must be strings");
            body.params.push_back(p.get<std::string>());
        }
        const auto &stmts = field(m, "body", where);
        if (!stmts.is_array())
            fail(where, "'body' must be an array");
        for (std::size_t i = 0; i < stmts.size(); ++i)
            body.body.push_back(stmt_from_json(stmts[i], id, where + ".body[" + std::to_string(i) + "]"));
        if (m.contains("falls_through")) {
            if (!m["falls_through"].is_boolean())
                fail(where, "'falls_through' must be a boolean");
            body.falls_through = m["falls_through"].get<bool>();
        }
        if (m.contains("synthesized")) {
            if (!m["synthesized"].is_boolean())
                fail(where, "'synthesized' must be a boolean");
            body.synthesized = m["synthesized"].get<bool>();
        }
        try {
            program.add_method(id, std::move(body));
        } catch (const std::invalid_argument &e) {
            fail(where, e.what());
        }
    }

    add_missing_constructors(program);

    if (doc.contains("entry_points")) {
        const auto &entries = doc["entry_points"];
        if (!entries.is_array())
            fail("entry_points", "expected an array");
        for (const auto &e : entries) {
            if (!e.is_string())
                fail("entry_points", "names must be strings");
            program.entry_points.push_back(lookup(e.get<std::string>(), "entry_points"));
        }
    }
    return program;
}

} // namespace

Program program_from_json(std::string_view text)
{
    try {
        return read_program(text);
    } catch (const json::exception &e) {
        throw JsonAstError(e.what());
    }
}

} // namespace nocfg
