#include "nocfg/oracle.hpp"

#include "nocfg/ast.hpp"

#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace nocfg {

std::string_view to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::Completed: return "completed";
    case Outcome::BudgetExhausted: return "budget_exhausted";
    case Outcome::RuntimeError: return "runtime_error";
    }
    return "?";
}

namespace {

constexpr int kMaxDepth = 400;

struct Instance;
struct ListObj;

struct NoneVal {};
struct BoundMethod {
    std::variant<std::shared_ptr<Instance>, std::shared_ptr<ListObj>> receiver;
    TypeId method;
};
struct FunctionVal {
    TypeId method;
};
struct ClassVal {
    TypeId type;
};
struct IntrinsicVal {
    TypeId builtin;
};

using Value = std::variant<NoneVal, std::int64_t, std::string, std::shared_ptr<ListObj>, std::shared_ptr<Instance>,
                           BoundMethod, FunctionVal, ClassVal, IntrinsicVal>;

struct Instance {
    TypeId cls;
    std::map<std::string, Value> fields;
};

struct ListObj {
    std::vector<Value> elements;
};

struct RuntimeFault {
    std::string message;
};
struct OutOfBudget {};

/// Unwinds a function body on `return`.
struct ReturnSignal {
    Value value;
};

enum class Flow { Normal, Break, Continue };

class Interpreter {
public:
    Interpreter(const Program &program, std::size_t budget, InterpretResult &out)
        : p_(program), b_(program.builtins()), budget_(budget), out_(out)
    {
    }

    void run(TypeId entry)
    {
        out_.graph.add_node(p_.name_of(entry));
        call_method(entry, std::nullopt, {}, 0);
    }

private:
    using Locals = std::map<std::string, Value>;

    struct Frame {
        TypeId method;
        Locals locals;
    };

    [[noreturn]] void fault(const std::string &message) { throw RuntimeFault{message}; }

    void tick()
    {
        if (out_.steps >= budget_)
            throw OutOfBudget{};
        ++out_.steps;
    }

    TypeId type_of(const Value &v) const
    {
        return std::visit(
            [&](const auto &x) -> TypeId {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, NoneVal>)
                    return b_.none;
                else if constexpr (std::is_same_v<T, std::int64_t>)
                    return b_.integer;
                else if constexpr (std::is_same_v<T, std::string>)
                    return b_.str;
                else if constexpr (std::is_same_v<T, std::shared_ptr<ListObj>>)
                    return b_.array;
                else if constexpr (std::is_same_v<T, std::shared_ptr<Instance>>)
                    return x->cls;
                else if constexpr (std::is_same_v<T, BoundMethod> || std::is_same_v<T, FunctionVal>)
                    return x.method;
                else if constexpr (std::is_same_v<T, ClassVal>)
                    return x.type;
                else
                    return x.builtin;
            },
            v);
    }

    void observe(TypeId scope, const std::string &name, const Value &v)
    {
        out_.observed[Variable{scope, name}].insert(type_of(v));
    }
    void observe_item(const Value &v) { observe(b_.array, "items", v); }

    std::shared_ptr<ListObj> make_list(std::vector<Value> elements)
    {
        for (const auto &e : elements)
            observe_item(e);
        auto list = std::make_shared<ListObj>();
        list->elements = std::move(elements);
        return list;
    }

    static bool truthy(const Value &v)
    {
        if (std::holds_alternative<NoneVal>(v))
            return false;
        if (auto *i = std::get_if<std::int64_t>(&v))
            return *i != 0;
        if (auto *s = std::get_if<std::string>(&v))
            return !s->empty();
        if (auto *l = std::get_if<std::shared_ptr<ListObj>>(&v))
            return !(*l)->elements.empty();
        return true;
    }

    std::string describe(const Value &v) const { return p_.name_of(type_of(v)); }

    void edge(TypeId callee, int line)
    {
        out_.graph.add_edge(p_.name_of(frames_.back().method), p_.name_of(callee), CallSite{std::nullopt, line});
    }

    // -- calls ---------------------------------------------------------------

    Value call_method(TypeId method, std::optional<Value> self, std::vector<Value> args, int line)
    {
        const MethodBody *body = p_.body(method);
        if (!body)
            fault("no body for " + p_.name_of(method));
        if (!frames_.empty())
            edge(method, line);
        if (frames_.size() >= kMaxDepth)
            fault("maximum recursion depth exceeded");
        if (body->synthesized) {
            if (!args.empty())
                fault(p_.name_of(method) + " takes no arguments");
            return NoneVal{};
        }
        if (!body->source)
            fault("no structured source for " + p_.name_of(method));

        std::vector<Value> actual;
        if (self)
            actual.push_back(*self);
        actual.insert(actual.end(), args.begin(), args.end());
        if (actual.size() != body->params.size())
            fault(p_.name_of(method) + " expects " + std::to_string(body->params.size()) + " argument(s), got " +
                  std::to_string(actual.size()));

        Frame frame{method, {}};
        for (std::size_t i = 0; i < actual.size(); ++i) {
            observe(method, body->params[i], actual[i]);
            frame.locals[body->params[i]] = actual[i];
        }
        frames_.push_back(std::move(frame));
        Value result = NoneVal{};
        try {
            exec_block(body->source->body);
        } catch (ReturnSignal &r) {
            result = std::move(r.value);
        }
        frames_.pop_back();
        observe(method, std::string(kReturnSlot), result);
        return result;
    }

    Value call_value(const Value &callee, std::vector<Value> args, int line)
    {
        tick();
        if (auto *f = std::get_if<FunctionVal>(&callee))
            return call_method(f->method, std::nullopt, std::move(args), line);
        if (auto *m = std::get_if<BoundMethod>(&callee)) {
            if (auto *list = std::get_if<std::shared_ptr<ListObj>>(&m->receiver))
                return call_list_method(*list, m->method, std::move(args), line);
            return call_method(m->method, std::get<std::shared_ptr<Instance>>(m->receiver), std::move(args), line);
        }
        if (auto *c = std::get_if<ClassVal>(&callee)) {
            if (!p_.is_user_class(c->type))
                fault("cannot instantiate " + p_.name_of(c->type));
            auto obj = std::make_shared<Instance>();
            obj->cls = c->type;
            auto ctor = p_.lookup_method(c->type, "__init__");
            if (!ctor)
                fault(p_.name_of(c->type) + " has no constructor");
            call_method(*ctor, Value{obj}, std::move(args), line);
            return obj;
        }
        if (auto *i = std::get_if<IntrinsicVal>(&callee))
            return call_intrinsic(p_.info(i->builtin).intrinsic, std::move(args));
        fault(describe(callee) + " is not callable");
    }

    Value call_list_method(const std::shared_ptr<ListObj> &list, TypeId method, std::vector<Value> args, int line)
    {
        edge(method, line);
        if (method == b_.append) {
            if (args.size() != 1)
                fault("append takes exactly one argument");
            observe_item(args[0]);
            list->elements.push_back(args[0]);
            return NoneVal{};
        }
        if (args.size() > 1)
            fault("pop takes at most one argument");
        if (list->elements.empty())
            fault("pop from empty list");
        std::int64_t n = static_cast<std::int64_t>(list->elements.size());
        std::int64_t index = n - 1;
        if (!args.empty()) {
            auto *i = std::get_if<std::int64_t>(&args[0]);
            if (!i)
                fault("list index must be an integer");
            index = *i < 0 ? *i + n : *i;
        }
        if (index < 0 || index >= n)
            fault("pop index out of range");
        Value v = list->elements[static_cast<std::size_t>(index)];
        list->elements.erase(list->elements.begin() + index);
        return v;
    }

    std::int64_t int_arg(const std::vector<Value> &args, std::size_t i, const char *what)
    {
        auto *v = std::get_if<std::int64_t>(&args.at(i));
        if (!v)
            fault(std::string(what) + " expects integers");
        return *v;
    }

    Value call_intrinsic(Intrinsic which, std::vector<Value> args)
    {
        switch (which) {
        case Intrinsic::Range: {
            if (args.empty() || args.size() > 3)
                fault("range expects 1 to 3 arguments");
            std::int64_t start = 0, stop, step = 1;
            if (args.size() == 1) {
                stop = int_arg(args, 0, "range");
            } else {
                start = int_arg(args, 0, "range");
                stop = int_arg(args, 1, "range");
                if (args.size() == 3)
                    step = int_arg(args, 2, "range");
            }
            if (step == 0)
                fault("range step must not be zero");
            std::vector<Value> items;
            for (std::int64_t i = start; step > 0 ? i < stop : i > stop; i += step) {
                tick();
                items.emplace_back(i);
            }
            return make_list(std::move(items));
        }
        case Intrinsic::Len: {
            if (args.size() != 1)
                fault("len expects one argument");
            if (auto *s = std::get_if<std::string>(&args[0]))
                return static_cast<std::int64_t>(s->size());
            if (auto *l = std::get_if<std::shared_ptr<ListObj>>(&args[0]))
                return static_cast<std::int64_t>((*l)->elements.size());
            fault("object of type " + describe(args[0]) + " has no len()");
        }
        case Intrinsic::Print:
            return NoneVal{};
        case Intrinsic::GetAttr: {
            if (args.size() < 2 || args.size() > 3)
                fault("getattr expects 2 or 3 arguments");
            auto *name = std::get_if<std::string>(&args[1]);
            if (!name)
                fault("attribute name must be a string");
            if (auto v = attribute(args[0], *name))
                return *v;
            if (args.size() == 3)
                return args[2];
            fault(describe(args[0]) + " has no attribute '" + *name + "'");
        }
        case Intrinsic::ItemOf: {
            if (args.size() != 1)
                fault("itemOf expects one argument");
            auto items = iterate(args[0]);
            if (items.empty())
                fault("itemOf of an empty collection");
            return items.front();
        }
        case Intrinsic::ListDisplay:
            return make_list(std::move(args));
        case Intrinsic::Add:
        case Intrinsic::Arith:
        case Intrinsic::Compare:
        case Intrinsic::Not:
        case Intrinsic::Either:
            fault("operator intrinsics are not callable by name");
        default:
            fault("unknown builtin");
        }
    }

    std::vector<Value> iterate(const Value &v)
    {
        if (auto *l = std::get_if<std::shared_ptr<ListObj>>(&v))
            return (*l)->elements;
        if (auto *s = std::get_if<std::string>(&v)) {
            std::vector<Value> out;
            for (char c : *s)
                out.emplace_back(std::string(1, c));
            return out;
        }
        fault(describe(v) + " is not iterable");
    }

    /// Attribute read; nothing when the attribute does not exist.
    std::optional<Value> attribute(const Value &object, const std::string &name)
    {
        if (auto *obj = std::get_if<std::shared_ptr<Instance>>(&object)) {
            if (auto it = (*obj)->fields.find(name); it != (*obj)->fields.end())
                return it->second;
            if (auto m = p_.lookup_method((*obj)->cls, name))
                return BoundMethod{*obj, *m};
        }
        if (auto *list = std::get_if<std::shared_ptr<ListObj>>(&object)) {
            if (auto m = p_.lookup_method(b_.array, name))
                return BoundMethod{*list, *m};
        }
        if (name == "__class__")
            return ClassVal{type_of(object)};
        if (name == "__name__") {
            if (auto *c = std::get_if<ClassVal>(&object))
                return p_.info(c->type).name;
            if (auto *f = std::get_if<FunctionVal>(&object))
                return p_.info(f->method).name;
            if (auto *m = std::get_if<BoundMethod>(&object))
                return p_.info(m->method).name;
        }
        if (auto *c = std::get_if<ClassVal>(&object))
            if (p_.lookup_method(c->type, name))
                fault("accessing method '" + name + "' through class " + p_.name_of(c->type) +
                      " is outside the subset");
        return std::nullopt;
    }

    // -- expressions ---------------------------------------------------------

    Value lookup_name(const std::string &name)
    {
        auto &locals = frames_.back().locals;
        if (auto it = locals.find(name); it != locals.end())
            return it->second;
        if (auto t = p_.resolve_name(name)) {
            const auto &info = p_.info(*t);
            if (info.kind == TypeKind::Method)
                return FunctionVal{*t};
            if (info.kind == TypeKind::Class)
                return ClassVal{*t};
            return IntrinsicVal{*t};
        }
        fault("name '" + name + "' is not defined");
    }

    static std::int64_t floor_div(std::int64_t a, std::int64_t b)
    {
        std::int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0)))
            --q;
        return q;
    }

    Value binary(ast::BinaryOp op, const Value &l, const Value &r)
    {
        auto *li = std::get_if<std::int64_t>(&l);
        auto *ri = std::get_if<std::int64_t>(&r);
        if (li && ri) {
            switch (op) {
            case ast::BinaryOp::Add: return *li + *ri;
            case ast::BinaryOp::Sub: return *li - *ri;
            case ast::BinaryOp::Mul: return *li * *ri;
            case ast::BinaryOp::FloorDiv:
            case ast::BinaryOp::Mod: {
                if (*ri == 0)
                    fault("integer division by zero");
                std::int64_t q = floor_div(*li, *ri);
                return op == ast::BinaryOp::FloorDiv ? q : *li - q * *ri;
            }
            }
        }
        auto *ls = std::get_if<std::string>(&l);
        auto *rs = std::get_if<std::string>(&r);
        auto *ll = std::get_if<std::shared_ptr<ListObj>>(&l);
        auto *rl = std::get_if<std::shared_ptr<ListObj>>(&r);
        if (op == ast::BinaryOp::Add) {
            if (ls && rs)
                return *ls + *rs;
            if (ll && rl) {
                auto elements = (*ll)->elements;
                elements.insert(elements.end(), (*rl)->elements.begin(), (*rl)->elements.end());
                return make_list(std::move(elements));
            }
        }
        if (op == ast::BinaryOp::Mul && (ls || ll) && ri) {
            for (std::int64_t i = 0; i < *ri; ++i)
                tick();
            if (ls) {
                std::string out;
                for (std::int64_t i = 0; i < *ri; ++i)
                    out += *ls;
                return out;
            }
            std::vector<Value> elements;
            for (std::int64_t i = 0; i < *ri; ++i)
                elements.insert(elements.end(), (*ll)->elements.begin(), (*ll)->elements.end());
            return make_list(std::move(elements));
        }
        fault("unsupported operand types " + describe(l) + " and " + describe(r));
    }

    static bool same(const Value &l, const Value &r)
    {
        if (l.index() != r.index())
            return false;
        return std::visit(
            [&](const auto &a) -> bool {
                using T = std::decay_t<decltype(a)>;
                const auto &b = std::get<T>(r);
                if constexpr (std::is_same_v<T, NoneVal>)
                    return true;
                else if constexpr (std::is_same_v<T, std::int64_t> || std::is_same_v<T, std::string> ||
                                   std::is_same_v<T, std::shared_ptr<ListObj>> ||
                                   std::is_same_v<T, std::shared_ptr<Instance>>)
                    return a == b;
                else if constexpr (std::is_same_v<T, BoundMethod>)
                    return a.method == b.method && a.receiver == b.receiver;
                else if constexpr (std::is_same_v<T, FunctionVal>)
                    return a.method == b.method;
                else if constexpr (std::is_same_v<T, ClassVal>)
                    return a.type == b.type;
                else
                    return a.builtin == b.builtin;
            },
            l);
    }

    Value compare(ast::CompareOp op, const Value &l, const Value &r)
    {
        using ast::CompareOp;
        if (op == CompareOp::Eq || op == CompareOp::Ne)
            return std::int64_t{same(l, r) == (op == CompareOp::Eq)};
        int order;
        if (auto *li = std::get_if<std::int64_t>(&l); li && std::holds_alternative<std::int64_t>(r)) {
            auto ri = std::get<std::int64_t>(r);
            order = *li < ri ? -1 : (*li > ri ? 1 : 0);
        } else if (auto *ls = std::get_if<std::string>(&l); ls && std::holds_alternative<std::string>(r)) {
            order = ls->compare(std::get<std::string>(r));
            order = order < 0 ? -1 : (order > 0 ? 1 : 0);
        } else {
            fault("cannot order " + describe(l) + " and " + describe(r));
        }
        bool result = false;
        switch (op) {
        case CompareOp::Lt: result = order < 0; break;
        case CompareOp::Le: result = order <= 0; break;
        case CompareOp::Gt: result = order > 0; break;
        case CompareOp::Ge: result = order >= 0; break;
        default: break;
        }
        return std::int64_t{result};
    }

    Value eval(const ast::Expr &expr)
    {
        return std::visit(
            [&](const auto &node) -> Value {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, ast::Name>) {
                    return lookup_name(node.id);
                } else if constexpr (std::is_same_v<T, ast::Attribute>) {
                    Value object = eval(*node.object);
                    if (auto v = attribute(object, node.attr))
                        return *v;
                    fault(describe(object) + " has no attribute '" + node.attr + "'");
                } else if constexpr (std::is_same_v<T, ast::IntLit>) {
                    return node.value;
                } else if constexpr (std::is_same_v<T, ast::StrLit>) {
                    return node.value;
                } else if constexpr (std::is_same_v<T, ast::NoneLit>) {
                    return NoneVal{};
                } else if constexpr (std::is_same_v<T, ast::ListDisplay>) {
                    std::vector<Value> elements;
                    for (const auto &e : node.elements)
                        elements.push_back(eval(*e));
                    return make_list(std::move(elements));
                } else if constexpr (std::is_same_v<T, ast::Call>) {
                    Value callee = eval(*node.func);
                    std::vector<Value> args;
                    for (const auto &a : node.args)
                        args.push_back(eval(*a));
                    return call_value(callee, std::move(args), expr.line);
                } else if constexpr (std::is_same_v<T, ast::Binary>) {
                    Value l = eval(*node.lhs);
                    Value r = eval(*node.rhs);
                    return binary(node.op, l, r);
                } else if constexpr (std::is_same_v<T, ast::Comparison>) {
                    Value l = eval(*node.lhs);
                    Value r = eval(*node.rhs);
                    return compare(node.op, l, r);
                } else if constexpr (std::is_same_v<T, ast::Logical>) {
                    Value l = eval(*node.lhs);
                    bool short_circuit = node.op == ast::LogicalOp::And ? !truthy(l) : truthy(l);
                    return short_circuit ? l : eval(*node.rhs);
                } else {
                    return std::int64_t{!truthy(eval(*node.operand))};
                }
            },
            expr.node);
    }

    // -- statements ----------------------------------------------------------

    void assign(const ast::Expr &target, const Value &value)
    {
        if (auto *name = std::get_if<ast::Name>(&target.node)) {
            observe(frames_.back().method, name->id, value);
            frames_.back().locals[name->id] = value;
            return;
        }
        const auto &attr = std::get<ast::Attribute>(target.node);
        Value object = eval(*attr.object);
        auto *obj = std::get_if<std::shared_ptr<Instance>>(&object);
        if (!obj)
            fault("cannot set attribute '" + attr.attr + "' on " + describe(object));
        observe((*obj)->cls, attr.attr, value);
        (*obj)->fields[attr.attr] = value;
    }

    Flow exec_block(const ast::Block &block)
    {
        for (const auto &stmt : block) {
            Flow f = exec(stmt);
            if (f != Flow::Normal)
                return f;
        }
        return Flow::Normal;
    }

    Flow exec(const ast::Stmt &stmt)
    {
        tick();
        return std::visit(
            [&](const auto &node) -> Flow {
                using T = std::decay_t<decltype(node)>;
                if constexpr (std::is_same_v<T, ast::Assign>) {
                    Value v = eval(*node.value);
                    assign(*node.target, v);
                } else if constexpr (std::is_same_v<T, ast::AugAssign>) {
                    Value current = eval(*node.target);
                    Value rhs = eval(*node.value);
                    assign(*node.target, binary(node.op, current, rhs));
                } else if constexpr (std::is_same_v<T, ast::ExprStmt>) {
                    eval(*node.expr);
                } else if constexpr (std::is_same_v<T, ast::Return>) {
                    throw ReturnSignal{node.value ? eval(*node.value) : Value{NoneVal{}}};
                } else if constexpr (std::is_same_v<T, ast::If>) {
                    return exec_block(truthy(eval(*node.condition)) ? node.body : node.orelse);
                } else if constexpr (std::is_same_v<T, ast::While>) {
                    while (truthy(eval(*node.condition))) {
                        tick();
                        if (exec_block(node.body) == Flow::Break)
                            break;
                    }
                } else if constexpr (std::is_same_v<T, ast::For>) {
                    Value iterable = eval(*node.iterable);
                    auto *list = std::get_if<std::shared_ptr<ListObj>>(&iterable);
                    std::vector<Value> snapshot;
                    if (!list)
                        snapshot = iterate(iterable);
                    for (std::size_t i = 0;; ++i) {
                        const auto &items = list ? (*list)->elements : snapshot;
                        if (i >= items.size())
                            break;
                        tick();
                        Value item = items[i];
                        observe(frames_.back().method, node.target, item);
                        frames_.back().locals[node.target] = item;
                        if (exec_block(node.body) == Flow::Break)
                            break;
                    }
                } else if constexpr (std::is_same_v<T, ast::Break>) {
                    return Flow::Break;
                } else if constexpr (std::is_same_v<T, ast::Continue>) {
                    return Flow::Continue;
                }
                return Flow::Normal;
            },
            stmt.node);
    }

    const Program &p_;
    const Builtins &b_;
    std::size_t budget_;
    InterpretResult &out_;
    std::vector<Frame> frames_;
};

} // namespace

InterpretResult interpret(const Program &program, TypeId entry, std::size_t step_budget)
{
    InterpretResult result;
    Interpreter interpreter(program, step_budget, result);
    try {
        const MethodBody *body = entry.index < program.type_count() ? program.body(entry) : nullptr;
        if (!body)
            throw RuntimeFault{"entry point is not a method"};
        if (!body->params.empty())
            throw RuntimeFault{"entry point must not take parameters"};
        interpreter.run(entry);
    } catch (const RuntimeFault &f) {
        result.outcome = Outcome::RuntimeError;
        result.detail = f.message;
    } catch (const OutOfBudget &) {
        result.outcome = Outcome::BudgetExhausted;
    }
    return result;
}

} // namespace nocfg
