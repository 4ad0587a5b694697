// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// A lexer and parser for the guest language (Python 3.10 subset large enough
// for agent programs). Node kinds and child order follow the reference
// interpreter's `ast` module, with expression contexts kept as a flag rather
// than as child nodes.
namespace tactix::py {

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(const std::string& msg, int line) : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

enum class TokKind { name, number, string, op, newline, indent, dedent, endmarker };

struct Token {
    TokKind kind;
    std::string text;
    int line = 0;
};

/// Strict tokenizer; comments and non-logical newlines are dropped.
std::vector<Token> tokenize(std::string_view src);

/// Token texts for n-gram scoring: the strict token stream without layout
/// tokens, or a permissive identifier/number/punctuation split if the source
/// does not tokenize. Never throws.
std::vector<std::string> code_tokens(std::string_view src);

/// Reserved words of the guest language.
const std::vector<std::string>& keywords();
bool is_keyword(std::string_view word);

enum class Ctx { none, load, store, del };

struct Node {
    std::string kind;
    /// Field name under the parent ("body", "targets", "value", ...).
    std::string field;
    /// Bound identifier where the node carries one: Name.id, arg.arg,
    /// FunctionDef/ClassDef name, alias bound name, ExceptHandler name.
    std::string ident;
    Ctx ctx = Ctx::none;
    int line = 0;
    std::vector<std::unique_ptr<Node>> children;

    Node* add(std::unique_ptr<Node> child, std::string field_name);
};

using NodePtr = std::unique_ptr<Node>;

/// Parse a module. Throws SyntaxError.
NodePtr parse(std::string_view src);

/// Parse-only check.
bool parses(std::string_view src);

/// S-expression of node kinds, e.g. "(Module (Expr (Call Name Constant)))".
std::string shape(const Node& n);

/// Node count, for tests and diagnostics.
std::size_t node_count(const Node& n);

}  // namespace tactix::py
