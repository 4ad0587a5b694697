// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <map>

#include "tactix/pyast/pyast.hpp"

namespace tactix::py {

Node* Node::add(std::unique_ptr<Node> child, std::string field_name) {
    if (!child) return nullptr;
    child->field = std::move(field_name);
    children.push_back(std::move(child));
    return children.back().get();
}

namespace {

NodePtr mk(std::string kind, int line) {
    auto n = std::make_unique<Node>();
    n->kind = std::move(kind);
    n->line = line;
    return n;
}

const std::map<std::string, std::string, std::less<>>& binop_kinds() {
    static const std::map<std::string, std::string, std::less<>> m{
        {"+", "Add"},    {"-", "Sub"},     {"*", "Mult"},   {"@", "MatMult"}, {"/", "Div"},
        {"%", "Mod"},    {"**", "Pow"},    {"<<", "LShift"}, {">>", "RShift"}, {"|", "BitOr"},
        {"^", "BitXor"}, {"&", "BitAnd"},  {"//", "FloorDiv"}};
    return m;
}

bool is_augassign(std::string_view op) {
    static constexpr std::array<std::string_view, 13> ops{"+=", "-=", "*=", "@=", "/=", "%=", "&=",
                                                          "|=", "^=", "<<=", ">>=", "**=", "//="};
    return std::find(ops.begin(), ops.end(), op) != ops.end();
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    NodePtr module() {
        auto m = mk("Module", 1);
        while (peek().kind != TokKind::endmarker) statement(*m, "body");
        return m;
    }

    // Standalone expression (f-string fields).
    NodePtr expression_only() {
        auto e = star_expressions();
        while (peek().kind == TokKind::newline) next();
        if (peek().kind != TokKind::endmarker) fail("unexpected token in expression");
        return e;
    }

private:
    const Token& peek(std::size_t k = 0) const { return t_[std::min(i_ + k, t_.size() - 1)]; }
    bool op(std::string_view s, std::size_t k = 0) const {
        const auto& t = peek(k);
        return t.kind == TokKind::op && t.text == s;
    }
    bool kw(std::string_view s, std::size_t k = 0) const {
        const auto& t = peek(k);
        return t.kind == TokKind::name && t.text == s;
    }
    Token next() {
        Token t = peek();
        if (i_ < t_.size() - 1) ++i_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const auto& t = peek();
        throw SyntaxError(msg + (t.text.empty() ? "" : " near '" + t.text + "'"), t.line);
    }
    void expect_op(std::string_view s) {
        if (!op(s)) fail("expected '" + std::string(s) + "'");
        next();
    }
    void expect_kw(std::string_view s) {
        if (!kw(s)) fail("expected '" + std::string(s) + "'");
        next();
    }
    std::string expect_name() {
        const auto& t = peek();
        if (t.kind != TokKind::name || is_keyword(t.text)) fail("expected identifier");
        return next().text;
    }

    bool starts_expr(std::size_t k = 0) const {
        const auto& t = peek(k);
        switch (t.kind) {
            case TokKind::name:
                return !is_keyword(t.text) || t.text == "None" || t.text == "True" || t.text == "False" ||
                       t.text == "not" || t.text == "lambda" || t.text == "await";
            case TokKind::number:
            case TokKind::string: return true;
            case TokKind::op:
                return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
                       t.text == "~" || t.text == "..." || t.text == "*";
            default: return false;
        }
    }

    // ---- statements ----

    void statement(Node& parent, const char* field) {
        if (peek().kind == TokKind::indent) fail("unexpected indent");
        if (auto n = compound_stmt()) {
            parent.add(std::move(n), field);
            return;
        }
        simple_stmts(parent, field);
    }

    NodePtr compound_stmt() {
        if (op("@")) return decorated();
        if (peek().kind != TokKind::name) return nullptr;
        const std::string w = peek().text;
        if (w == "if") return if_stmt();
        if (w == "while") return while_stmt();
        if (w == "for") return for_stmt(false);
        if (w == "try") return try_stmt();
        if (w == "with") return with_stmt(false);
        if (w == "def") return funcdef({}, false);
        if (w == "class") return classdef({});
        if (w == "async" && (kw("def", 1) || kw("for", 1) || kw("with", 1))) {
            next();
            if (kw("def")) return funcdef({}, true);
            if (kw("for")) return for_stmt(true);
            return with_stmt(true);
        }
        return nullptr;
    }

    void simple_stmts(Node& parent, const char* field) {
        while (true) {
            parent.add(simple_stmt(), field);
            if (op(";")) {
                next();
                if (peek().kind == TokKind::newline) break;
                continue;
            }
            break;
        }
        if (peek().kind != TokKind::newline) fail("invalid syntax");
        next();
    }

    void block(Node& parent, const char* field) {
        expect_op(":");
        if (peek().kind == TokKind::newline) {
            next();
            if (peek().kind != TokKind::indent) fail("expected an indented block");
            next();
            while (peek().kind != TokKind::dedent && peek().kind != TokKind::endmarker) statement(parent, field);
            if (peek().kind == TokKind::dedent) next();
        } else {
            simple_stmts(parent, field);
        }
    }

    NodePtr simple_stmt() {
        const auto& t = peek();
        int line = t.line;
        if (t.kind == TokKind::name) {
            const std::string w = t.text;
            if (w == "pass" || w == "break" || w == "continue") {
                next();
                return mk(w == "pass" ? "Pass" : w == "break" ? "Break" : "Continue", line);
            }
            if (w == "return") {
                next();
                auto n = mk("Return", line);
                if (starts_expr()) n->add(star_expressions(), "value");
                return n;
            }
            if (w == "raise") {
                next();
                auto n = mk("Raise", line);
                if (starts_expr()) {
                    n->add(test(), "exc");
                    if (kw("from")) {
                        next();
                        n->add(test(), "cause");
                    }
                }
                return n;
            }
            if (w == "global" || w == "nonlocal") {
                next();
                expect_name();
                while (op(",")) {
                    next();
                    expect_name();
                }
                return mk(w == "global" ? "Global" : "Nonlocal", line);
            }
            if (w == "del") {
                next();
                auto n = mk("Delete", line);
                while (true) {
                    auto target = bitor_expr();
                    set_ctx(*target, Ctx::del);
                    n->add(std::move(target), "targets");
                    if (!op(",")) break;
                    next();
                    if (!starts_expr()) break;
                }
                return n;
            }
            if (w == "assert") {
                next();
                auto n = mk("Assert", line);
                n->add(test(), "test");
                if (op(",")) {
                    next();
                    n->add(test(), "msg");
                }
                return n;
            }
            if (w == "import") return import_stmt();
            if (w == "from") return from_stmt();
        }
        return expr_stmt();
    }

    NodePtr import_stmt() {
        auto n = mk("Import", next().line);
        while (true) {
            auto a = mk("alias", peek().line);
            std::string name = expect_name();
            std::string first = name;
            while (op(".")) {
                next();
                name += "." + expect_name();
            }
            a->ident = first;
            if (kw("as")) {
                next();
                a->ident = expect_name();
            }
            n->add(std::move(a), "names");
            if (!op(",")) break;
            next();
        }
        return n;
    }

    NodePtr from_stmt() {
        auto n = mk("ImportFrom", next().line);
        bool any = false;
        while (op(".") || op("...")) {
            next();
            any = true;
        }
        if (!kw("import")) {
            expect_name();
            while (op(".")) {
                next();
                expect_name();
            }
            any = true;
        }
        if (!any) fail("invalid import");
        expect_kw("import");
        if (op("*")) {
            auto a = mk("alias", next().line);
            a->ident = "*";
            n->add(std::move(a), "names");
            return n;
        }
        bool paren = op("(");
        if (paren) next();
        while (true) {
            auto a = mk("alias", peek().line);
            a->ident = expect_name();
            if (kw("as")) {
                next();
                a->ident = expect_name();
            }
            n->add(std::move(a), "names");
            if (!op(",")) break;
            next();
            if (paren && op(")")) break;
        }
        if (paren) expect_op(")");
        return n;
    }

    NodePtr rhs_value() { return kw("yield") ? yield_expr() : star_expressions(); }

    NodePtr expr_stmt() {
        int line = peek().line;
        NodePtr first = kw("yield") ? yield_expr() : star_expressions();
        if (op("=")) {
            auto n = mk("Assign", line);
            std::vector<NodePtr> items;
            items.push_back(std::move(first));
            while (op("=")) {
                next();
                items.push_back(rhs_value());
            }
            for (std::size_t k = 0; k + 1 < items.size(); ++k) {
                set_ctx(*items[k], Ctx::store);
                n->add(std::move(items[k]), "targets");
            }
            n->add(std::move(items.back()), "value");
            return n;
        }
        if (peek().kind == TokKind::op && is_augassign(peek().text)) {
            std::string o = next().text;
            o.pop_back();
            auto n = mk("AugAssign", line);
            set_ctx(*first, Ctx::store);
            if (first->kind == "Tuple" || first->kind == "List" || first->kind == "Starred")
                fail("illegal expression for augmented assignment");
            n->add(std::move(first), "target");
            n->add(mk(binop_kinds().at(o), line), "op");
            n->add(rhs_value(), "value");
            return n;
        }
        if (op(":")) {
            next();
            auto n = mk("AnnAssign", line);
            set_ctx(*first, Ctx::store);
            if (first->kind == "Tuple" || first->kind == "List") fail("only single target can be annotated");
            n->add(std::move(first), "target");
            n->add(test(), "annotation");
            if (op("=")) {
                next();
                n->add(rhs_value(), "value");
            }
            return n;
        }
        auto n = mk("Expr", line);
        n->add(std::move(first), "value");
        return n;
    }

    NodePtr if_stmt() {
        auto n = mk("If", next().line);
        n->add(named_expr(), "test");
        block(*n, "body");
        if (kw("elif")) {
            n->add(if_stmt(), "orelse");
        } else if (kw("else")) {
            next();
            block(*n, "orelse");
        }
        return n;
    }

    NodePtr while_stmt() {
        auto n = mk("While", next().line);
        n->add(named_expr(), "test");
        block(*n, "body");
        if (kw("else")) {
            next();
            block(*n, "orelse");
        }
        return n;
    }

    NodePtr for_stmt(bool is_async) {
        auto n = mk(is_async ? "AsyncFor" : "For", next().line);
        auto target = target_list();
        n->add(std::move(target), "target");
        expect_kw("in");
        n->add(star_expressions(), "iter");
        block(*n, "body");
        if (kw("else")) {
            next();
            block(*n, "orelse");
        }
        return n;
    }

    NodePtr try_stmt() {
        auto n = mk("Try", next().line);
        block(*n, "body");
        bool handlers = false;
        while (kw("except")) {
            handlers = true;
            auto h = mk("ExceptHandler", next().line);
            if (!op(":")) {
                h->add(test(), "type");
                if (kw("as")) {
                    next();
                    h->ident = expect_name();
                }
            }
            block(*h, "body");
            n->add(std::move(h), "handlers");
        }
        if (kw("else")) {
            if (!handlers) fail("else without except");
            next();
            block(*n, "orelse");
        }
        bool fin = false;
        if (kw("finally")) {
            next();
            fin = true;
            block(*n, "finalbody");
        }
        if (!handlers && !fin) fail("expected 'except' or 'finally' block");
        return n;
    }

    bool parenthesized_with_items() const {
        if (!op("(")) return false;
        int depth = 0;
        bool saw_as = false;
        for (std::size_t k = 0;; ++k) {
            const auto& t = peek(k);
            if (t.kind == TokKind::endmarker || t.kind == TokKind::newline) return false;
            if (t.kind == TokKind::op && (t.text == "(" || t.text == "[" || t.text == "{")) ++depth;
            if (t.kind == TokKind::op && (t.text == ")" || t.text == "]" || t.text == "}")) {
                if (--depth == 0) return saw_as && peek(k + 1).kind == TokKind::op && peek(k + 1).text == ":";
            }
            if (depth == 1 && t.kind == TokKind::name && t.text == "as") saw_as = true;
        }
    }

    NodePtr with_item() {
        auto item = mk("withitem", peek().line);
        item->add(test(), "context_expr");
        if (kw("as")) {
            next();
            auto target = bitor_expr();
            set_ctx(*target, Ctx::store);
            item->add(std::move(target), "optional_vars");
        }
        return item;
    }

    NodePtr with_stmt(bool is_async) {
        auto n = mk(is_async ? "AsyncWith" : "With", next().line);
        bool paren = parenthesized_with_items();
        if (paren) next();
        while (true) {
            n->add(with_item(), "items");
            if (!op(",")) break;
            next();
            if (paren && op(")")) break;
        }
        if (paren) expect_op(")");
        block(*n, "body");
        return n;
    }

    NodePtr decorated() {
        std::vector<NodePtr> decorators;
        while (op("@")) {
            next();
            decorators.push_back(named_expr());
            if (peek().kind != TokKind::newline) fail("expected newline after decorator");
            next();
        }
        if (kw("def")) return funcdef(std::move(decorators), false);
        if (kw("async") && kw("def", 1)) {
            next();
            return funcdef(std::move(decorators), true);
        }
        if (kw("class")) return classdef(std::move(decorators));
        fail("expected def or class after decorator");
    }

    NodePtr arguments(bool annotations, std::string_view closer) {
        auto a = mk("arguments", peek().line);
        std::vector<NodePtr> posonly, args, defaults, kwonly, kw_defaults;
        NodePtr vararg, kwarg;
        bool star = false;
        auto param = [&](int line) {
            auto p = mk("arg", line);
            p->ident = expect_name();
            if (annotations && op(":")) {
                next();
                p->add(test(), "annotation");
            }
            return p;
        };
        while (!op(closer)) {
            int line = peek().line;
            if (op("/")) {
                next();
                for (auto& p : args) posonly.push_back(std::move(p));
                args.clear();
            } else if (op("**")) {
                next();
                kwarg = param(line);
            } else if (op("*")) {
                next();
                star = true;
                if (!op(",") && !op(closer)) vararg = param(line);
            } else {
                auto p = param(line);
                NodePtr def;
                if (op("=")) {
                    next();
                    def = test();
                }
                if (star) {
                    kwonly.push_back(std::move(p));
                    kw_defaults.push_back(std::move(def));
                } else {
                    if (!def && !defaults.empty()) fail("non-default argument follows default argument");
                    args.push_back(std::move(p));
                    if (def) defaults.push_back(std::move(def));
                }
            }
            if (!op(",")) break;
            next();
        }
        for (auto& p : posonly) a->add(std::move(p), "posonlyargs");
        for (auto& p : args) a->add(std::move(p), "args");
        a->add(std::move(vararg), "vararg");
        for (auto& p : kwonly) a->add(std::move(p), "kwonlyargs");
        for (auto& p : kw_defaults) a->add(std::move(p), "kw_defaults");
        a->add(std::move(kwarg), "kwarg");
        for (auto& p : defaults) a->add(std::move(p), "defaults");
        return a;
    }

    NodePtr funcdef(std::vector<NodePtr> decorators, bool is_async) {
        auto n = mk(is_async ? "AsyncFunctionDef" : "FunctionDef", next().line);
        n->ident = expect_name();
        expect_op("(");
        n->add(arguments(true, ")"), "args");
        expect_op(")");
        NodePtr returns;
        if (op("->")) {
            next();
            returns = test();
        }
        block(*n, "body");
        for (auto& d : decorators) n->add(std::move(d), "decorator_list");
        n->add(std::move(returns), "returns");
        return n;
    }

    NodePtr classdef(std::vector<NodePtr> decorators) {
        auto n = mk("ClassDef", next().line);
        n->ident = expect_name();
        if (op("(")) {
            next();
            std::vector<NodePtr> args, keywords;
            call_args(args, keywords);
            expect_op(")");
            for (auto& a : args) n->add(std::move(a), "bases");
            for (auto& k : keywords) n->add(std::move(k), "keywords");
        }
        block(*n, "body");
        for (auto& d : decorators) n->add(std::move(d), "decorator_list");
        return n;
    }

    // ---- expressions ----

    void set_ctx(Node& n, Ctx c) {
        if (n.kind == "Name" || n.kind == "Attribute" || n.kind == "Subscript") {
            n.ctx = c;
        } else if (n.kind == "Tuple" || n.kind == "List") {
            n.ctx = c;
            for (auto& ch : n.children) set_ctx(*ch, c);
        } else if (n.kind == "Starred") {
            n.ctx = c;
            set_ctx(*n.children.front(), c);
        } else {
            throw SyntaxError("cannot assign to " + n.kind, n.line);
        }
    }

    NodePtr star_item() {
        if (op("*")) {
            auto n = mk("Starred", next().line);
            n->ctx = Ctx::load;
            n->add(bitor_expr(), "value");
            return n;
        }
        return named_expr();
    }

    NodePtr star_expressions() {
        int line = peek().line;
        auto first = star_item();
        if (!op(",")) return first;
        auto tup = mk("Tuple", line);
        tup->ctx = Ctx::load;
        tup->add(std::move(first), "elts");
        while (op(",")) {
            next();
            if (!starts_expr()) break;
            tup->add(star_item(), "elts");
        }
        return tup;
    }

    NodePtr target_list() {
        int line = peek().line;
        auto item = [&]() -> NodePtr {
            if (op("*")) {
                auto n = mk("Starred", next().line);
                n->add(bitor_expr(), "value");
                return n;
            }
            return bitor_expr();
        };
        auto first = item();
        NodePtr out;
        if (op(",")) {
            out = mk("Tuple", line);
            out->add(std::move(first), "elts");
            while (op(",")) {
                next();
                if (!starts_expr()) break;
                out->add(item(), "elts");
            }
        } else {
            out = std::move(first);
        }
        set_ctx(*out, Ctx::store);
        return out;
    }

    NodePtr yield_expr() {
        int line = next().line;
        if (kw("from")) {
            next();
            auto n = mk("YieldFrom", line);
            n->add(test(), "value");
            return n;
        }
        auto n = mk("Yield", line);
        if (starts_expr()) n->add(star_expressions(), "value");
        return n;
    }

    NodePtr named_expr() {
        if (peek().kind == TokKind::name && op(":=", 1)) {
            int line = peek().line;
            auto target = mk("Name", line);
            target->ident = expect_name();
            target->ctx = Ctx::store;
            next();
            auto n = mk("NamedExpr", line);
            n->add(std::move(target), "target");
            n->add(test(), "value");
            return n;
        }
        return test();
    }

    NodePtr test() {
        if (kw("lambda")) return lambdef();
        int line = peek().line;
        auto body = or_test();
        if (kw("if")) {
            next();
            auto cond = or_test();
            expect_kw("else");
            auto n = mk("IfExp", line);
            n->add(std::move(cond), "test");
            n->add(std::move(body), "body");
            n->add(test(), "orelse");
            return n;
        }
        return body;
    }

    NodePtr lambdef() {
        auto n = mk("Lambda", next().line);
        n->add(arguments(false, ":"), "args");
        expect_op(":");
        n->add(test(), "body");
        return n;
    }

    NodePtr bool_chain(const char* word, const char* kind, NodePtr (Parser::*sub)()) {
        int line = peek().line;
        auto first = (this->*sub)();
        if (!kw(word)) return first;
        auto n = mk("BoolOp", line);
        n->add(mk(kind, line), "op");
        n->add(std::move(first), "values");
        while (kw(word)) {
            next();
            n->add((this->*sub)(), "values");
        }
        return n;
    }

    NodePtr or_test() { return bool_chain("or", "Or", &Parser::and_test); }
    NodePtr and_test() { return bool_chain("and", "And", &Parser::not_test); }

    NodePtr not_test() {
        if (kw("not")) {
            auto n = mk("UnaryOp", next().line);
            n->add(mk("Not", n->line), "op");
            n->add(not_test(), "operand");
            return n;
        }
        return comparison();
    }

    std::string comp_op() {
        const auto& t = peek();
        if (t.kind == TokKind::op) {
            static const std::map<std::string, std::string, std::less<>> m{
                {"<", "Lt"}, {">", "Gt"}, {"==", "Eq"}, {">=", "GtE"}, {"<=", "LtE"}, {"!=", "NotEq"}};
            if (auto it = m.find(t.text); it != m.end()) {
                next();
                return it->second;
            }
            return {};
        }
        if (kw("in")) {
            next();
            return "In";
        }
        if (kw("not") && kw("in", 1)) {
            next();
            next();
            return "NotIn";
        }
        if (kw("is")) {
            next();
            if (kw("not")) {
                next();
                return "IsNot";
            }
            return "Is";
        }
        return {};
    }

    NodePtr comparison() {
        int line = peek().line;
        auto left = bitor_expr();
        std::vector<std::string> ops;
        std::vector<NodePtr> rights;
        while (true) {
            auto o = comp_op();
            if (o.empty()) break;
            ops.push_back(o);
            rights.push_back(bitor_expr());
        }
        if (ops.empty()) return left;
        auto n = mk("Compare", line);
        n->add(std::move(left), "left");
        for (auto& o : ops) n->add(mk(o, line), "ops");
        for (auto& r : rights) n->add(std::move(r), "comparators");
        return n;
    }

    NodePtr binop_level(std::initializer_list<std::string_view> ops, NodePtr (Parser::*sub)()) {
        int line = peek().line;
        auto left = (this->*sub)();
        while (true) {
            const auto& t = peek();
            if (t.kind != TokKind::op || std::find(ops.begin(), ops.end(), t.text) == ops.end()) break;
            std::string o = next().text;
            auto n = mk("BinOp", line);
            n->add(std::move(left), "left");
            n->add(mk(binop_kinds().at(o), line), "op");
            n->add((this->*sub)(), "right");
            left = std::move(n);
        }
        return left;
    }

    NodePtr bitor_expr() { return binop_level({"|"}, &Parser::xor_expr); }
    NodePtr xor_expr() { return binop_level({"^"}, &Parser::and_expr); }
    NodePtr and_expr() { return binop_level({"&"}, &Parser::shift_expr); }
    NodePtr shift_expr() { return binop_level({"<<", ">>"}, &Parser::arith_expr); }
    NodePtr arith_expr() { return binop_level({"+", "-"}, &Parser::term); }
    NodePtr term() { return binop_level({"*", "/", "%", "//", "@"}, &Parser::factor); }

    NodePtr factor() {
        if (op("-") || op("+") || op("~")) {
            auto t = next();
            auto n = mk("UnaryOp", t.line);
            n->add(mk(t.text == "-" ? "USub" : t.text == "+" ? "UAdd" : "Invert", t.line), "op");
            n->add(factor(), "operand");
            return n;
        }
        return power();
    }

    NodePtr power() {
        int line = peek().line;
        NodePtr base;
        if (kw("await")) {
            next();
            base = mk("Await", line);
            base->add(primary(), "value");
        } else {
            base = primary();
        }
        if (op("**")) {
            next();
            auto n = mk("BinOp", line);
            n->add(std::move(base), "left");
            n->add(mk("Pow", line), "op");
            n->add(factor(), "right");
            return n;
        }
        return base;
    }

    void call_args(std::vector<NodePtr>& args, std::vector<NodePtr>& keywords) {
        while (!op(")")) {
            int line = peek().line;
            if (op("*")) {
                next();
                auto s = mk("Starred", line);
                s->ctx = Ctx::load;
                s->add(test(), "value");
                args.push_back(std::move(s));
            } else if (op("**")) {
                next();
                auto k = mk("keyword", line);
                k->add(test(), "value");
                keywords.push_back(std::move(k));
            } else if (peek().kind == TokKind::name && op("=", 1)) {
                auto k = mk("keyword", line);
                expect_name();
                next();
                k->add(test(), "value");
                keywords.push_back(std::move(k));
            } else {
                auto e = named_expr();
                if (kw("for") || (kw("async") && kw("for", 1))) {
                    auto g = mk("GeneratorExp", line);
                    g->add(std::move(e), "elt");
                    comp_for(*g);
                    e = std::move(g);
                }
                args.push_back(std::move(e));
            }
            if (!op(",")) break;
            next();
        }
    }

    NodePtr subscript_item() {
        int line = peek().line;
        NodePtr lower;
        if (!op(":")) {
            lower = named_expr();
            if (!op(":")) return lower;
        }
        auto s = mk("Slice", line);
        next();
        NodePtr upper, step;
        if (!op("]") && !op(",") && !op(":")) upper = test();
        if (op(":")) {
            next();
            if (!op("]") && !op(",")) step = test();
        }
        s->add(std::move(lower), "lower");
        s->add(std::move(upper), "upper");
        s->add(std::move(step), "step");
        return s;
    }

    NodePtr primary() {
        auto e = atom();
        while (true) {
            int line = peek().line;
            if (op("(")) {
                next();
                auto c = mk("Call", line);
                std::vector<NodePtr> args, keywords;
                call_args(args, keywords);
                expect_op(")");
                c->add(std::move(e), "func");
                for (auto& a : args) c->add(std::move(a), "args");
                for (auto& k : keywords) c->add(std::move(k), "keywords");
                e = std::move(c);
            } else if (op("[")) {
                next();
                auto s = mk("Subscript", line);
                s->ctx = Ctx::load;
                s->add(std::move(e), "value");
                auto first = subscript_item();
                if (op(",")) {
                    auto tup = mk("Tuple", line);
                    tup->ctx = Ctx::load;
                    tup->add(std::move(first), "elts");
                    while (op(",")) {
                        next();
                        if (op("]")) break;
                        tup->add(subscript_item(), "elts");
                    }
                    first = std::move(tup);
                }
                s->add(std::move(first), "slice");
                expect_op("]");
                e = std::move(s);
            } else if (op(".")) {
                next();
                auto a = mk("Attribute", line);
                a->ctx = Ctx::load;
                expect_name();
                a->add(std::move(e), "value");
                e = std::move(a);
            } else {
                return e;
            }
        }
    }

    void comp_for(Node& parent) {
        while (kw("for") || (kw("async") && kw("for", 1))) {
            if (kw("async")) next();
            auto c = mk("comprehension", next().line);
            c->add(target_list(), "target");
            expect_kw("in");
            c->add(or_test(), "iter");
            while (kw("if")) {
                next();
                c->add(or_test(), "ifs");
            }
            parent.add(std::move(c), "generators");
        }
    }

    bool at_comp_for() const { return kw("for") || (kw("async") && kw("for", 1)); }

    NodePtr atom() {
        const auto& t = peek();
        int line = t.line;
        switch (t.kind) {
            case TokKind::number: next(); return mk("Constant", line);
            case TokKind::string: return strings();
            case TokKind::name: {
                if (t.text == "None" || t.text == "True" || t.text == "False") {
                    next();
                    return mk("Constant", line);
                }
                if (is_keyword(t.text)) fail("invalid syntax");
                auto n = mk("Name", line);
                n->ident = next().text;
                n->ctx = Ctx::load;
                return n;
            }
            case TokKind::op: break;
            default: fail("invalid syntax");
        }
        if (op("...")) {
            next();
            return mk("Constant", line);
        }
        if (op("(")) {
            next();
            if (op(")")) {
                next();
                auto tup = mk("Tuple", line);
                tup->ctx = Ctx::load;
                return tup;
            }
            if (kw("yield")) {
                auto y = yield_expr();
                expect_op(")");
                return y;
            }
            auto first = star_item();
            if (at_comp_for()) {
                auto g = mk("GeneratorExp", line);
                g->add(std::move(first), "elt");
                comp_for(*g);
                expect_op(")");
                return g;
            }
            if (!op(",")) {
                expect_op(")");
                return first;
            }
            auto tup = mk("Tuple", line);
            tup->ctx = Ctx::load;
            tup->add(std::move(first), "elts");
            while (op(",")) {
                next();
                if (op(")")) break;
                tup->add(star_item(), "elts");
            }
            expect_op(")");
            return tup;
        }
        if (op("[")) {
            next();
            auto list = mk("List", line);
            list->ctx = Ctx::load;
            if (op("]")) {
                next();
                return list;
            }
            auto first = star_item();
            if (at_comp_for()) {
                auto lc = mk("ListComp", line);
                lc->add(std::move(first), "elt");
                comp_for(*lc);
                expect_op("]");
                return lc;
            }
            list->add(std::move(first), "elts");
            while (op(",")) {
                next();
                if (op("]")) break;
                list->add(star_item(), "elts");
            }
            expect_op("]");
            return list;
        }
        if (op("{")) {
            next();
            if (op("}")) {
                next();
                return mk("Dict", line);
            }
            return brace_body(line);
        }
        fail("invalid syntax");
    }

    NodePtr brace_body(int line) {
        bool is_dict = op("**");
        NodePtr first_key, first_val;
        if (!is_dict) {
            first_key = star_item();
            if (op(":")) {
                is_dict = true;
                next();
                first_val = test();
            }
        } else {
            next();
            first_val = bitor_expr();
        }
        if (!is_dict) {
            if (at_comp_for()) {
                auto sc = mk("SetComp", line);
                sc->add(std::move(first_key), "elt");
                comp_for(*sc);
                expect_op("}");
                return sc;
            }
            auto set = mk("Set", line);
            set->add(std::move(first_key), "elts");
            while (op(",")) {
                next();
                if (op("}")) break;
                set->add(star_item(), "elts");
            }
            expect_op("}");
            return set;
        }
        if (first_key && at_comp_for()) {
            auto dc = mk("DictComp", line);
            dc->add(std::move(first_key), "key");
            dc->add(std::move(first_val), "value");
            comp_for(*dc);
            expect_op("}");
            return dc;
        }
        std::vector<NodePtr> keys, values;
        keys.push_back(std::move(first_key));
        values.push_back(std::move(first_val));
        while (op(",")) {
            next();
            if (op("}")) break;
            if (op("**")) {
                next();
                keys.emplace_back();
                values.push_back(bitor_expr());
            } else {
                keys.push_back(test());
                expect_op(":");
                values.push_back(test());
            }
        }
        expect_op("}");
        auto d = mk("Dict", line);
        for (auto& k : keys) d->add(std::move(k), "keys");
        for (auto& v : values) d->add(std::move(v), "values");
        return d;
    }

    // ---- string literals ----

    NodePtr strings() {
        int line = peek().line;
        std::vector<NodePtr> parts;
        std::string pending;
        bool have_pending = false;
        bool any_f = false;
        while (peek().kind == TokKind::string) {
            auto tok = next();
            std::size_t q = tok.text.find_first_of("'\"");
            std::string prefix = tok.text.substr(0, q);
            bool is_f = prefix.find_first_of("fF") != std::string::npos;
            std::size_t qlen = tok.text.compare(q, 3, std::string(3, tok.text[q])) == 0 && tok.text.size() >= q + 6 ? 3 : 1;
            std::string body = tok.text.substr(q + qlen, tok.text.size() - q - 2 * qlen);
            if (!is_f) {
                pending += body;
                have_pending = true;
                continue;
            }
            any_f = true;
            fstring_parts(body, tok.line, parts, pending, have_pending);
        }
        if (!any_f) return mk("Constant", line);
        if (have_pending && !pending.empty()) parts.push_back(mk("Constant", line));
        auto js = mk("JoinedStr", line);
        for (auto& p : parts) js->add(std::move(p), "values");
        return js;
    }

    // Splits an f-string body into literal and replacement-field parts.
    void fstring_parts(const std::string& body, int line, std::vector<NodePtr>& parts, std::string& pending,
                       bool& have_pending) {
        std::size_t i = 0;
        auto flush = [&]() {
            if (have_pending && !pending.empty()) parts.push_back(mk("Constant", line));
            pending.clear();
            have_pending = false;
        };
        while (i < body.size()) {
            char c = body[i];
            if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
                pending += '{';
                have_pending = true;
                i += 2;
                continue;
            }
            if (c == '}' && i + 1 < body.size() && body[i + 1] == '}') {
                pending += '}';
                have_pending = true;
                i += 2;
                continue;
            }
            if (c == '}') throw SyntaxError("f-string: single '}' is not allowed", line);
            if (c != '{') {
                pending += c;
                have_pending = true;
                ++i;
                continue;
            }
            auto field = replacement_field(body, i, line);
            if (field.debug_text) {
                pending += "x";
                have_pending = true;
            }
            flush();
            parts.push_back(std::move(field.node));
        }
    }

    struct Field {
        NodePtr node;
        bool debug_text = false;
    };

    // body[i] == '{'; on return i is past the matching '}'.
    Field replacement_field(const std::string& body, std::size_t& i, int line) {
        std::size_t j = i + 1;
        int depth = 0;
        char quote = 0;
        std::size_t expr_end = std::string::npos;
        for (; j < body.size(); ++j) {
            char c = body[j];
            if (quote) {
                if (c == quote) quote = 0;
                continue;
            }
            if (c == '\'' || c == '"') {
                quote = c;
            } else if (c == '(' || c == '[' || c == '{') {
                ++depth;
            } else if (c == ')' || c == ']' || c == '}') {
                if (depth == 0) {
                    if (c != '}') throw SyntaxError("f-string: unmatched '" + std::string(1, c) + "'", line);
                    break;
                }
                --depth;
            } else if (depth == 0 && c == '!' && j + 1 < body.size() && body[j + 1] != '=') {
                break;
            } else if (depth == 0 && c == ':') {
                break;
            }
        }
        if (j >= body.size()) throw SyntaxError("f-string: expecting '}'", line);
        expr_end = j;
        std::string expr = body.substr(i + 1, expr_end - i - 1);
        Field f;
        {
            std::string trimmed = expr;
            while (!trimmed.empty() && (trimmed.back() == ' ' || trimmed.back() == '\t')) trimmed.pop_back();
            if (trimmed.size() >= 1 && trimmed.back() == '=') {
                char before = trimmed.size() >= 2 ? trimmed[trimmed.size() - 2] : ' ';
                if (before != '=' && before != '!' && before != '<' && before != '>') {
                    f.debug_text = true;
                    trimmed.pop_back();
                    expr = trimmed;
                }
            }
        }
        if (expr.find_first_not_of(" \t\n") == std::string::npos) throw SyntaxError("f-string: empty expression", line);
        auto fv = mk("FormattedValue", line);
        {
            Parser sub(tokenize("(" + expr + "\n)"));
            fv->add(sub.expression_only(), "value");
        }
        if (body[j] == '!') {
            j += 2;
            if (j > body.size()) throw SyntaxError("f-string: invalid conversion", line);
        }
        if (j < body.size() && body[j] == ':') {
            ++j;
            auto spec = mk("JoinedStr", line);
            std::vector<NodePtr> parts;
            std::string pending;
            bool have_pending = false;
            std::size_t start = j;
            int d = 0;
            for (; j < body.size(); ++j) {
                if (body[j] == '{') ++d;
                if (body[j] == '}') {
                    if (d == 0) break;
                    --d;
                }
            }
            if (j >= body.size()) throw SyntaxError("f-string: expecting '}'", line);
            fstring_parts(body.substr(start, j - start), line, parts, pending, have_pending);
            if (have_pending && !pending.empty()) parts.push_back(mk("Constant", line));
            for (auto& p : parts) spec->add(std::move(p), "values");
            fv->add(std::move(spec), "format_spec");
        }
        if (j >= body.size() || body[j] != '}') throw SyntaxError("f-string: expecting '}'", line);
        i = j + 1;
        f.node = std::move(fv);
        return f;
    }

    std::vector<Token> t_;
    std::size_t i_ = 0;
};

void shape_into(const Node& n, std::string& out) {
    if (n.children.empty()) {
        out += n.kind;
        return;
    }
    out += '(';
    out += n.kind;
    for (const auto& c : n.children) {
        out += ' ';
        shape_into(*c, out);
    }
    out += ')';
}

}  // namespace

NodePtr parse(std::string_view src) { return Parser(tokenize(src)).module(); }

bool parses(std::string_view src) {
    try {
        parse(src);
        return true;
    } catch (const SyntaxError&) {
        return false;
    }
}

std::string shape(const Node& n) {
    std::string out;
    shape_into(n, out);
    return out;
}

std::size_t node_count(const Node& n) {
    std::size_t k = 1;
    for (const auto& c : n.children) k += node_count(*c);
    return k;
}

}  // namespace tactix::py
