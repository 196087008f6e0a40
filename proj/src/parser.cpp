#include "nocfg/frontend.hpp"

#include <cctype>
#include <set>

namespace nocfg {

FrontendError::FrontendError(const std::string &path, int line, int column, const std::string &message)
    : std::runtime_error((path.empty() ? std::string("<input>") : path) + ":" + std::to_string(line) + ":" +
                         std::to_string(column) + ": " + message),
      path_(path), line_(line), column_(column), message_(message)
{
}

namespace {

enum class Tok { Name, Int, Str, Op, Newline, Indent, Dedent, End };

struct Token {
    Tok kind;
    std::string text;
    std::int64_t int_value = 0;
    int line = 0;
    int column = 0;
};

const std::set<std::string, std::less<>> kUnsupportedKeywords = {
    "import", "from",   "try",  "except", "finally", "with", "lambda", "yield", "global",
    "nonlocal", "raise", "assert", "del",  "async",   "await", "is",   "as",
};

class Lexer {
public:
    explicit Lexer(const SourceModule &source) : src_(source.text), path_(source.path) {}

    std::vector<Token> run()
    {
        indents_.push_back(0);
        while (pos_ < src_.size()) {
            if (at_line_start_ && depth_ == 0) {
                if (handle_indentation())
                    continue;
            }
            char c = src_[pos_];
            if (c == '\n') {
                newline();
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                advance();
                continue;
            }
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n')
                    advance();
                continue;
            }
            if (c == '\\' && peek(1) == '\n') {
                advance();
                advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                lex_name();
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c))) {
                lex_number();
                continue;
            }
            if (c == '\'' || c == '"') {
                lex_string();
                continue;
            }
            lex_operator();
        }
        if (!tokens_.empty() && tokens_.back().kind != Tok::Newline && tokens_.back().kind != Tok::Dedent)
            push(Tok::Newline, "", line_, col_);
        while (indents_.size() > 1) {
            indents_.pop_back();
            push(Tok::Dedent, "", line_, col_);
        }
        push(Tok::End, "", line_, col_);
        return std::move(tokens_);
    }

private:
    char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

    void advance()
    {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void push(Tok kind, std::string text, int line, int column, std::int64_t value = 0)
    {
        tokens_.push_back(Token{kind, std::move(text), value, line, column});
    }

    [[noreturn]] void syntax(const std::string &message, int line, int column) const
    {
        throw SyntaxError(path_, line, column, message);
    }

    [[noreturn]] void unsupported(const std::string &what, int line, int column) const
    {
        throw UnsupportedConstruct(path_, line, column, what + " is not supported");
    }

    void newline()
    {
        if (depth_ == 0 && !tokens_.empty() && tokens_.back().kind != Tok::Newline &&
            tokens_.back().kind != Tok::Indent && tokens_.back().kind != Tok::Dedent)
            push(Tok::Newline, "", line_, col_);
        advance();
        at_line_start_ = depth_ == 0;
    }

    /// Measures the indentation of a logical line; returns true when the line
    /// is blank and was consumed.
    bool handle_indentation()
    {
        int width = 0;
        std::size_t p = pos_;
        while (p < src_.size() && (src_[p] == ' ' || src_[p] == '\t')) {
            width = src_[p] == '\t' ? (width / 8 + 1) * 8 : width + 1;
            ++p;
        }
        if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#' || src_[p] == '\r') {
            while (pos_ < p)
                advance();
            while (pos_ < src_.size() && src_[pos_] != '\n')
                advance();
            if (pos_ < src_.size())
                advance();
            return true;
        }
        while (pos_ < p)
            advance();
        at_line_start_ = false;
        if (width > indents_.back()) {
            if (tokens_.empty())
                syntax("unexpected indent", line_, col_);
            indents_.push_back(width);
            push(Tok::Indent, "", line_, col_);
        } else {
            while (width < indents_.back()) {
                indents_.pop_back();
                push(Tok::Dedent, "", line_, col_);
            }
            if (width != indents_.back())
                syntax("unindent does not match any outer indentation level", line_, col_);
        }
        return false;
    }

    void lex_name()
    {
        int line = line_, column = col_;
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            advance();
        std::string word = src_.substr(start, pos_ - start);
        if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"'))
            unsupported("string prefix '" + word + "'", line, column);
        push(Tok::Name, std::move(word), line, column);
    }

    void lex_number()
    {
        int line = line_, column = col_;
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            advance();
        if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E' ||
                                   src_[pos_] == 'x' || src_[pos_] == 'j' || src_[pos_] == '_'))
            unsupported("non-decimal or floating point literal", line, column);
        std::string digits = src_.substr(start, pos_ - start);
        if (digits.size() > 1 && digits[0] == '0')
            syntax("leading zeros in decimal integer literals are not permitted", line, column);
        std::int64_t value = 0;
        for (char d : digits) {
            if (value > (INT64_MAX - (d - '0')) / 10)
                unsupported("integer literal beyond 64 bits", line, column);
            value = value * 10 + (d - '0');
        }
        push(Tok::Int, std::move(digits), line, column, value);
    }

    void lex_string()
    {
        int line = line_, column = col_;
        char quote = src_[pos_];
        bool triple = peek(1) == quote && peek(2) == quote;
        std::size_t delim = triple ? 3 : 1;
        for (std::size_t i = 0; i < delim; ++i)
            advance();
        std::string value;
        for (;;) {
            if (pos_ >= src_.size())
                syntax("unterminated string literal", line, column);
            char c = src_[pos_];
            if (c == quote && (!triple || (peek(1) == quote && peek(2) == quote))) {
                for (std::size_t i = 0; i < delim; ++i)
                    advance();
                break;
            }
            if (c == '\n' && !triple)
                syntax("unterminated string literal", line, column);
            if (c == '\\') {
                advance();
                if (pos_ >= src_.size())
                    syntax("unterminated string literal", line, column);
                char e = src_[pos_];
                switch (e) {
                case 'n': value += '\n'; break;
                case 't': value += '\t'; break;
                case '\\': value += '\\'; break;
                case '\'': value += '\''; break;
                case '"': value += '"'; break;
                case '\n': break;
                default: value += '\\'; value += e; break;
                }
                advance();
                continue;
            }
            value += c;
            advance();
        }
        push(Tok::Str, std::move(value), line, column);
    }

    void lex_operator()
    {
        int line = line_, column = col_;
        static const char *const kTwo[] = {"==", "!=", "<=", ">=", "+=", "-=", "*=", "//", "%=", "->", "**", "<<", ">>"};
        for (const char *op : kTwo) {
            if (src_[pos_] == op[0] && peek(1) == op[1]) {
                std::string text(op);
                advance();
                advance();
                if (text == "//" && pos_ < src_.size() && src_[pos_] == '=') {
                    advance();
                    text = "//=";
                }
                if (text == "->" || text == "**" || text == "<<" || text == ">>")
                    unsupported("operator '" + text + "'", line, column);
                push(Tok::Op, std::move(text), line, column);
                return;
            }
        }
        char c = src_[pos_];
        static const std::string kOne = "()[]:,.=+-*%<>";
        if (kOne.find(c) == std::string::npos) {
            if (std::string("{}@;&|^~/").find(c) != std::string::npos)
                unsupported(std::string("'") + c + "'", line, column);
            syntax(std::string("invalid character '") + c + "'", line, column);
        }
        if (c == '(' || c == '[')
            ++depth_;
        if ((c == ')' || c == ']') && depth_ > 0)
            --depth_;
        advance();
        push(Tok::Op, std::string(1, c), line, column);
    }

    const std::string &src_;
    const std::string &path_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int depth_ = 0;
    bool at_line_start_ = true;
    std::vector<int> indents_;
    std::vector<Token> tokens_;
};

class Parser {
public:
    Parser(std::vector<Token> tokens, const std::string &path) : toks_(std::move(tokens)), path_(path) {}

    ast::Module module()
    {
        ast::Module out;
        while (!at(Tok::End)) {
            if (accept(Tok::Newline))
                continue;
            if (at_keyword("def")) {
                out.definitions.emplace_back(function());
            } else if (at_keyword("class")) {
                out.definitions.emplace_back(class_def());
            } else if (at_keyword("pass")) {
                next();
                expect_newline();
            } else {
                check_statement_keyword();
                unsupported("module-level statement", cur());
            }
        }
        return out;
    }

private:
    const Token &cur() const { return toks_[pos_]; }
    bool at(Tok kind) const { return cur().kind == kind; }
    bool at_op(std::string_view op) const { return cur().kind == Tok::Op && cur().text == op; }
    bool at_keyword(std::string_view kw) const { return cur().kind == Tok::Name && cur().text == kw; }
    const Token &next() { return toks_[pos_++]; }

    bool accept(Tok kind)
    {
        if (!at(kind))
            return false;
        ++pos_;
        return true;
    }

    bool accept_op(std::string_view op)
    {
        if (!at_op(op))
            return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void syntax(const std::string &message, const Token &at) const
    {
        throw SyntaxError(path_, at.line, at.column, message);
    }

    [[noreturn]] void unsupported(const std::string &what, const Token &at) const
    {
        throw UnsupportedConstruct(path_, at.line, at.column, what + " is not supported");
    }

    static std::string describe(const Token &t)
    {
        switch (t.kind) {
        case Tok::Newline: return "end of line";
        case Tok::Indent: return "indent";
        case Tok::Dedent: return "dedent";
        case Tok::End: return "end of input";
        default: return "'" + t.text + "'";
        }
    }

    void expect_op(std::string_view op)
    {
        if (!accept_op(op))
            syntax("expected '" + std::string(op) + "' but found " + describe(cur()), cur());
    }

    void expect_newline()
    {
        if (at(Tok::End))
            return;
        if (!accept(Tok::Newline))
            syntax("expected end of line but found " + describe(cur()), cur());
    }

    std::string expect_name()
    {
        if (!at(Tok::Name) || is_keyword(cur().text))
            syntax("expected identifier but found " + describe(cur()), cur());
        return next().text;
    }

    static bool is_keyword(std::string_view w)
    {
        static const std::set<std::string, std::less<>> kKeywords = {
            "def",  "class", "return", "if", "elif", "else", "while", "for",  "in",   "pass",
            "break", "continue", "and", "or", "not",  "None", "True",  "False",
        };
        return kKeywords.contains(w) || kUnsupportedKeywords.contains(w);
    }

    void check_statement_keyword() const
    {
        if (at(Tok::Name) && kUnsupportedKeywords.contains(cur().text))
            unsupported("'" + cur().text + "' statement", cur());
        if (at_op("@"))
            unsupported("decorator", cur());
    }

    std::shared_ptr<const ast::FunctionDef> function()
    {
        const Token &kw = next();
        auto def = std::make_shared<ast::FunctionDef>();
        def->line = kw.line;
        def->name = expect_name();
        expect_op("(");
        while (!at_op(")")) {
            if (at_op("*") || at_op("**"))
                unsupported("variadic parameters", cur());
            def->params.push_back(expect_name());
            if (at_op("="))
                unsupported("default parameter values", cur());
            if (at_op(":"))
                unsupported("type annotations", cur());
            if (!accept_op(","))
                break;
        }
        expect_op(")");
        if (at_op("->"))
            unsupported("return annotations", cur());
        expect_op(":");
        def->body = suite();
        return def;
    }

    ast::ClassDef class_def()
    {
        const Token &kw = next();
        ast::ClassDef cls;
        cls.line = kw.line;
        cls.name = expect_name();
        if (accept_op("(")) {
            if (!at_op(")")) {
                cls.base = expect_name();
                if (at_op(","))
                    unsupported("multiple inheritance", cur());
                if (at_op("."))
                    unsupported("qualified base class", cur());
            }
            expect_op(")");
        }
        expect_op(":");
        if (!accept(Tok::Newline)) {
            if (!at_keyword("pass"))
                unsupported("class body statement", cur());
            next();
            expect_newline();
            return cls;
        }
        if (!accept(Tok::Indent))
            syntax("expected an indented block", cur());
        while (!accept(Tok::Dedent) && !at(Tok::End)) {
            if (accept(Tok::Newline))
                continue;
            if (at_keyword("def")) {
                cls.methods.push_back(function());
            } else if (at_keyword("pass")) {
                next();
                expect_newline();
            } else if (at(Tok::Str)) {
                next(); // docstring
                expect_newline();
            } else {
                check_statement_keyword();
                unsupported("class body statement", cur());
            }
        }
        return cls;
    }

    ast::Block suite()
    {
        ast::Block block;
        if (!accept(Tok::Newline)) {
            block.push_back(simple_statement());
            return block;
        }
        if (!accept(Tok::Indent))
            syntax("expected an indented block", cur());
        while (!accept(Tok::Dedent) && !at(Tok::End)) {
            if (accept(Tok::Newline))
                continue;
            block.push_back(statement());
        }
        return block;
    }

    ast::Stmt statement()
    {
        const Token &t = cur();
        if (at_keyword("if"))
            return if_statement();
        if (at_keyword("while")) {
            next();
            ast::While w;
            w.condition = expression();
            expect_op(":");
            w.body = suite();
            if (at_keyword("else"))
                unsupported("while-else", cur());
            return ast::Stmt{std::move(w), t.line};
        }
        if (at_keyword("for")) {
            next();
            ast::For f;
            f.target = expect_name();
            if (at_op(","))
                unsupported("multiple for-loop targets", cur());
            if (!at_keyword("in"))
                syntax("expected 'in' but found " + describe(cur()), cur());
            next();
            f.iterable = expression();
            expect_op(":");
            f.body = suite();
            if (at_keyword("else"))
                unsupported("for-else", cur());
            return ast::Stmt{std::move(f), t.line};
        }
        if (at_keyword("def"))
            unsupported("nested function definition", t);
        if (at_keyword("class"))
            unsupported("nested class definition", t);
        return simple_statement();
    }

    ast::Stmt if_statement()
    {
        const Token &t = next(); // if / elif
        ast::If node;
        node.condition = expression();
        expect_op(":");
        node.body = suite();
        if (at_keyword("elif")) {
            node.orelse.push_back(if_statement());
        } else if (at_keyword("else")) {
            next();
            expect_op(":");
            node.orelse = suite();
        }
        return ast::Stmt{std::move(node), t.line};
    }

    ast::Stmt simple_statement()
    {
        check_statement_keyword();
        const Token &t = cur();
        ast::Stmt out{ast::Pass{}, t.line};
        if (at_keyword("pass")) {
            next();
        } else if (at_keyword("break")) {
            next();
            out.node = ast::Break{};
        } else if (at_keyword("continue")) {
            next();
            out.node = ast::Continue{};
        } else if (at_keyword("return")) {
            next();
            ast::Return r;
            if (!at(Tok::Newline) && !at(Tok::End) && !at(Tok::Dedent))
                r.value = expression();
            out.node = std::move(r);
        } else if (at_keyword("else") || at_keyword("elif")) {
            syntax("'" + t.text + "' without matching 'if'", t);
        } else {
            auto lhs = expression();
            if (at_op(","))
                unsupported("tuple expression", cur());
            if (accept_op("=")) {
                check_target(*lhs, t);
                auto rhs = expression();
                if (at_op("="))
                    unsupported("chained assignment", cur());
                if (at_op(","))
                    unsupported("tuple expression", cur());
                out.node = ast::Assign{std::move(lhs), std::move(rhs)};
            } else if (at(Tok::Op) && (cur().text == "+=" || cur().text == "-=" || cur().text == "*=" ||
                                       cur().text == "%=" || cur().text == "//=")) {
                std::string op = next().text;
                check_target(*lhs, t);
                ast::BinaryOp bop = op == "+=" ? ast::BinaryOp::Add
                                    : op == "-=" ? ast::BinaryOp::Sub
                                    : op == "*=" ? ast::BinaryOp::Mul
                                    : op == "%=" ? ast::BinaryOp::Mod
                                                 : ast::BinaryOp::FloorDiv;
                out.node = ast::AugAssign{std::move(lhs), bop, expression()};
            } else if (at_op(":")) {
                unsupported("annotated assignment", cur());
            } else {
                out.node = ast::ExprStmt{std::move(lhs)};
            }
        }
        expect_newline();
        return out;
    }

    void check_target(const ast::Expr &target, const Token &t) const
    {
        if (std::holds_alternative<ast::Name>(target.node) || std::holds_alternative<ast::Attribute>(target.node))
            return;
        syntax("cannot assign to expression", t);
    }

    ast::ExprPtr make(ast::Expr e) { return std::make_shared<const ast::Expr>(std::move(e)); }

    ast::ExprPtr expression() { return or_expr(); }

    ast::ExprPtr or_expr()
    {
        auto lhs = and_expr();
        while (at_keyword("or")) {
            const Token &t = next();
            lhs = make(ast::Expr{ast::Logical{ast::LogicalOp::Or, lhs, and_expr()}, t.line, t.column});
        }
        return lhs;
    }

    ast::ExprPtr and_expr()
    {
        auto lhs = not_expr();
        while (at_keyword("and")) {
            const Token &t = next();
            lhs = make(ast::Expr{ast::Logical{ast::LogicalOp::And, lhs, not_expr()}, t.line, t.column});
        }
        return lhs;
    }

    ast::ExprPtr not_expr()
    {
        if (at_keyword("not")) {
            const Token &t = next();
            return make(ast::Expr{ast::Not{not_expr()}, t.line, t.column});
        }
        return comparison();
    }

    std::optional<ast::CompareOp> compare_op() const
    {
        if (cur().kind != Tok::Op)
            return std::nullopt;
        const auto &s = cur().text;
        if (s == "==") return ast::CompareOp::Eq;
        if (s == "!=") return ast::CompareOp::Ne;
        if (s == "<") return ast::CompareOp::Lt;
        if (s == "<=") return ast::CompareOp::Le;
        if (s == ">") return ast::CompareOp::Gt;
        if (s == ">=") return ast::CompareOp::Ge;
        return std::nullopt;
    }

    ast::ExprPtr comparison()
    {
        auto lhs = sum();
        if (at_keyword("in") || at_keyword("is") || (at_keyword("not") && toks_[pos_ + 1].text == "in"))
            unsupported("membership and identity tests", cur());
        if (auto op = compare_op()) {
            const Token &t = next();
            auto rhs = sum();
            if (compare_op())
                unsupported("chained comparison", cur());
            return make(ast::Expr{ast::Comparison{*op, lhs, rhs}, t.line, t.column});
        }
        return lhs;
    }

    ast::ExprPtr sum()
    {
        auto lhs = term();
        while (at_op("+") || at_op("-")) {
            const Token &t = next();
            auto op = t.text == "+" ? ast::BinaryOp::Add : ast::BinaryOp::Sub;
            lhs = make(ast::Expr{ast::Binary{op, lhs, term()}, t.line, t.column});
        }
        return lhs;
    }

    ast::ExprPtr term()
    {
        auto lhs = unary();
        while (at_op("*") || at_op("%") || at_op("//")) {
            const Token &t = next();
            auto op = t.text == "*" ? ast::BinaryOp::Mul : t.text == "%" ? ast::BinaryOp::Mod : ast::BinaryOp::FloorDiv;
            lhs = make(ast::Expr{ast::Binary{op, lhs, unary()}, t.line, t.column});
        }
        return lhs;
    }

    ast::ExprPtr unary()
    {
        if (at_op("-")) {
            const Token &t = next();
            auto zero = make(ast::Expr{ast::IntLit{0}, t.line, t.column});
            return make(ast::Expr{ast::Binary{ast::BinaryOp::Sub, zero, unary()}, t.line, t.column});
        }
        if (at_op("+"))
            next();
        return postfix();
    }

    ast::ExprPtr postfix()
    {
        auto e = atom();
        for (;;) {
            if (at_op("(")) {
                const Token &t = next();
                ast::Call call{e, {}};
                while (!at_op(")")) {
                    if (at_op("*") || at_op("**"))
                        unsupported("argument unpacking", cur());
                    if (at(Tok::Name) && toks_[pos_ + 1].kind == Tok::Op && toks_[pos_ + 1].text == "=")
                        unsupported("keyword arguments", cur());
                    call.args.push_back(expression());
                    if (at_keyword("for"))
                        unsupported("generator expression", cur());
                    if (!accept_op(","))
                        break;
                }
                expect_op(")");
                e = make(ast::Expr{std::move(call), t.line, t.column});
            } else if (at_op(".")) {
                const Token &t = next();
                e = make(ast::Expr{ast::Attribute{e, expect_name()}, t.line, t.column});
            } else if (at_op("[")) {
                unsupported("subscript", cur());
            } else {
                return e;
            }
        }
    }

    ast::ExprPtr atom()
    {
        const Token &t = cur();
        switch (t.kind) {
        case Tok::Int:
            next();
            return make(ast::Expr{ast::IntLit{t.int_value}, t.line, t.column});
        case Tok::Str: {
            std::string value;
            while (at(Tok::Str))
                value += next().text;
            return make(ast::Expr{ast::StrLit{std::move(value)}, t.line, t.column});
        }
        case Tok::Name:
            if (t.text == "None") {
                next();
                return make(ast::Expr{ast::NoneLit{}, t.line, t.column});
            }
            if (t.text == "True" || t.text == "False") {
                next();
                return make(ast::Expr{ast::IntLit{t.text == "True" ? 1 : 0}, t.line, t.column});
            }
            if (t.text == "lambda" || t.text == "yield" || t.text == "await")
                unsupported("'" + t.text + "' expression", t);
            if (is_keyword(t.text))
                syntax("unexpected keyword '" + t.text + "'", t);
            next();
            return make(ast::Expr{ast::Name{t.text}, t.line, t.column});
        case Tok::Op:
            if (t.text == "(") {
                next();
                if (at_op(")"))
                    unsupported("tuple expression", cur());
                auto e = expression();
                if (at_op(","))
                    unsupported("tuple expression", cur());
                if (at_keyword("for"))
                    unsupported("generator expression", cur());
                expect_op(")");
                return e;
            }
            if (t.text == "[") {
                next();
                ast::ListDisplay list;
                while (!at_op("]")) {
                    list.elements.push_back(expression());
                    if (at_keyword("for"))
                        unsupported("list comprehension", cur());
                    if (!accept_op(","))
                        break;
                }
                expect_op("]");
                return make(ast::Expr{std::move(list), t.line, t.column});
            }
            break;
        default: break;
        }
        syntax("unexpected " + describe(t), t);
    }

    std::vector<Token> toks_;
    const std::string &path_;
    std::size_t pos_ = 0;
};

} // namespace

ast::Module parse_syntax(const SourceModule &source)
{
    Lexer lexer(source);
    Parser parser(lexer.run(), source.path);
    return parser.module();
}

bool ast::always_returns(const Block &block)
{
    for (const auto &stmt : block) {
        if (std::holds_alternative<Return>(stmt.node))
            return true;
        if (auto *node = std::get_if<If>(&stmt.node))
            if (always_returns(node->body) && always_returns(node->orelse))
                return true;
    }
    return false;
}

} // namespace nocfg
