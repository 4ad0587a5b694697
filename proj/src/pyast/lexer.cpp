// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>

#include "tactix/pyast/pyast.hpp"

namespace tactix::py {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

bool is_string_prefix(std::string_view w) {
    if (w.size() > 2) return false;
    std::string lower;
    for (char c : w) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    static const std::array<std::string_view, 8> ok{"r", "b", "u", "f", "rb", "br", "fr", "rf"};
    return std::find(ok.begin(), ok.end(), lower) != ok.end();
}

constexpr std::array<std::string_view, 4> kOps3{"**=", "//=", ">>=", "<<="};
constexpr std::array<std::string_view, 20> kOps2{"...", "->", ":=", "**", "//", "<<", ">>", "<=", ">=", "==",
                                                 "!=", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=";

class Lexer {
public:
    explicit Lexer(std::string_view src) : s_(src) {}

    std::vector<Token> run() {
        indents_.push_back(0);
        while (pos_ < s_.size()) {
            if (at_line_start_ && depth_ == 0) {
                if (!handle_indent()) continue;
            }
            scan_token();
        }
        if (depth_ > 0) throw SyntaxError("unexpected EOF inside brackets", line_);
        if (line_has_tokens_) push(TokKind::newline, "");
        while (indents_.size() > 1) {
            indents_.pop_back();
            push(TokKind::dedent, "");
        }
        push(TokKind::endmarker, "");
        return std::move(out_);
    }

private:
    void push(TokKind k, std::string text) { out_.push_back({k, std::move(text), line_}); }

    // Returns false if the physical line was blank or comment-only (consumed).
    bool handle_indent() {
        std::size_t col = 0;
        std::size_t i = pos_;
        while (i < s_.size() && (s_[i] == ' ' || s_[i] == '\t' || s_[i] == '\f')) {
            if (s_[i] == '\t') col = (col / 8 + 1) * 8;
            else if (s_[i] == ' ') ++col;
            else col = 0;
            ++i;
        }
        if (i >= s_.size()) {
            pos_ = i;
            return false;
        }
        if (s_[i] == '#' || s_[i] == '\n' || s_[i] == '\r') {
            while (i < s_.size() && s_[i] != '\n') ++i;
            if (i < s_.size()) {
                ++i;
                ++line_;
            }
            pos_ = i;
            return false;
        }
        if (s_[i] == '\\' && i + 1 < s_.size() && s_[i + 1] == '\n') {
            // A continuation line at the start of a logical line; treat as blank prefix.
            pos_ = i + 2;
            ++line_;
            return false;
        }
        pos_ = i;
        at_line_start_ = false;
        if (col > indents_.back()) {
            indents_.push_back(col);
            push(TokKind::indent, "");
        } else {
            while (col < indents_.back()) {
                indents_.pop_back();
                push(TokKind::dedent, "");
            }
            if (col != indents_.back()) throw SyntaxError("unindent does not match any outer indentation level", line_);
        }
        return true;
    }

    void scan_token() {
        char c = s_[pos_];
        if (c == ' ' || c == '\t' || c == '\f' || c == '\r') {
            ++pos_;
            return;
        }
        if (c == '#') {
            while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
            return;
        }
        if (c == '\n') {
            ++pos_;
            if (depth_ == 0) {
                if (line_has_tokens_) push(TokKind::newline, "");
                line_has_tokens_ = false;
                at_line_start_ = true;
            }
            ++line_;
            return;
        }
        if (c == '\\') {
            std::size_t j = pos_ + 1;
            if (j < s_.size() && s_[j] == '\r') ++j;
            if (j < s_.size() && s_[j] == '\n') {
                pos_ = j + 1;
                ++line_;
                return;
            }
            throw SyntaxError("unexpected character after line continuation character", line_);
        }
        line_has_tokens_ = true;
        auto uc = static_cast<unsigned char>(c);
        if (ident_start(uc)) {
            std::size_t j = pos_;
            while (j < s_.size() && ident_char(static_cast<unsigned char>(s_[j]))) ++j;
            auto word = s_.substr(pos_, j - pos_);
            if (j < s_.size() && (s_[j] == '\'' || s_[j] == '"') && is_string_prefix(word)) {
                scan_string(pos_, j);
                return;
            }
            push(TokKind::name, std::string(word));
            pos_ = j;
            return;
        }
        if (c == '\'' || c == '"') {
            scan_string(pos_, pos_);
            return;
        }
        if (std::isdigit(uc) || (c == '.' && pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            scan_number();
            return;
        }
        for (auto op : kOps3)
            if (s_.substr(pos_, 3) == op) return emit_op(op);
        for (auto op : kOps2)
            if (s_.substr(pos_, op.size()) == op) return emit_op(op);
        if (kOps1.find(c) != std::string_view::npos) return emit_op(s_.substr(pos_, 1));
        throw SyntaxError(std::string("invalid character '") + c + "'", line_);
    }

    void emit_op(std::string_view op) {
        if (op == "(" || op == "[" || op == "{") {
            stack_.push_back(op[0]);
            ++depth_;
        } else if (op == ")" || op == "]" || op == "}") {
            char want = op == ")" ? '(' : op == "]" ? '[' : '{';
            if (stack_.empty() || stack_.back() != want) throw SyntaxError("unmatched '" + std::string(op) + "'", line_);
            stack_.pop_back();
            --depth_;
        }
        push(TokKind::op, std::string(op));
        pos_ += op.size();
    }

    void scan_string(std::size_t start, std::size_t quote_pos) {
        char q = s_[quote_pos];
        bool triple = s_.substr(quote_pos, 3) == std::string(3, q);
        std::size_t j = quote_pos + (triple ? 3 : 1);
        int start_line = line_;
        while (true) {
            if (j >= s_.size()) throw SyntaxError("unterminated string literal", start_line);
            char c = s_[j];
            if (c == '\\') {
                if (j + 1 < s_.size() && s_[j + 1] == '\n') ++line_;
                j += 2;
                continue;
            }
            if (c == '\n') {
                if (!triple) throw SyntaxError("unterminated string literal", start_line);
                ++line_;
            }
            if (c == q) {
                if (!triple) {
                    ++j;
                    break;
                }
                if (s_.substr(j, 3) == std::string(3, q)) {
                    j += 3;
                    break;
                }
            }
            ++j;
        }
        out_.push_back({TokKind::string, std::string(s_.substr(start, j - start)), start_line});
        pos_ = j;
    }

    void scan_number() {
        std::size_t j = pos_;
        auto digit_run = [&](auto pred) {
            while (j < s_.size() && (pred(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
        };
        auto dec = [](unsigned char c) { return std::isdigit(c) != 0; };
        if (s_[j] == '0' && j + 1 < s_.size() && std::strchr("xXoObB", s_[j + 1])) {
            j += 2;
            digit_run([](unsigned char c) { return std::isxdigit(c) != 0; });
        } else {
            digit_run(dec);
            if (j < s_.size() && s_[j] == '.') {
                ++j;
                digit_run(dec);
            }
            if (j < s_.size() && (s_[j] == 'e' || s_[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) ++k;
                if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
                    j = k;
                    digit_run(dec);
                }
            }
            if (j < s_.size() && (s_[j] == 'j' || s_[j] == 'J')) ++j;
        }
        if (j < s_.size() && ident_start(static_cast<unsigned char>(s_[j])))
            throw SyntaxError("invalid decimal literal", line_);
        push(TokKind::number, std::string(s_.substr(pos_, j - pos_)));
        pos_ = j;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int depth_ = 0;
    std::vector<char> stack_;
    std::vector<std::size_t> indents_;
    bool at_line_start_ = true;
    bool line_has_tokens_ = false;
    std::vector<Token> out_;
};

}  // namespace

std::vector<Token> tokenize(std::string_view src) { return Lexer(src).run(); }

std::vector<std::string> code_tokens(std::string_view src) {
    std::vector<std::string> out;
    try {
        for (auto& t : tokenize(src))
            if (t.kind == TokKind::name || t.kind == TokKind::number || t.kind == TokKind::string || t.kind == TokKind::op)
                out.push_back(std::move(t.text));
        return out;
    } catch (const SyntaxError&) {
        out.clear();
    }
    std::size_t i = 0;
    while (i < src.size()) {
        auto c = static_cast<unsigned char>(src[i]);
        if (std::isspace(c)) {
            ++i;
        } else if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(static_cast<unsigned char>(src[j]))) ++j;
            out.emplace_back(src.substr(i, j - i));
            i = j;
        } else if (std::isdigit(c)) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            out.emplace_back(src.substr(i, j - i));
            i = j;
        } else {
            out.emplace_back(1, src[i]);
            ++i;
        }
    }
    return out;
}

const std::vector<std::string>& keywords() {
    static const std::vector<std::string> kw{
        "False", "None",   "True",    "and",      "as",   "assert", "async", "await",  "break",
        "class", "continue", "def",   "del",      "elif", "else",   "except", "finally", "for",
        "from",  "global", "if",      "import",   "in",   "is",     "lambda", "nonlocal", "not",
        "or",    "pass",   "raise",   "return",   "try",  "while",  "with",  "yield"};
    return kw;
}

bool is_keyword(std::string_view word) {
    const auto& kw = keywords();
    return std::find(kw.begin(), kw.end(), word) != kw.end();
}

}  // namespace tactix::py
