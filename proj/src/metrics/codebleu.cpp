// SPDX-License-Identifier: Apache-2.0
#include "tactix/metrics/codebleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "tactix/metrics/bleu.hpp"

namespace tactix {

namespace {

using Gram = std::vector<std::string>;

std::map<Gram, int> count_grams(const std::vector<std::string>& toks, std::size_t n) {
    std::map<Gram, int> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) ++out[Gram(toks.begin() + i, toks.begin() + i + n)];
    return out;
}

void collect_shapes(const py::Node& n, std::vector<std::string>& out) {
    if (n.children.empty()) return;
    out.push_back(py::shape(n));
    for (const auto& c : n.children) collect_shapes(*c, out);
}

const std::set<std::string, std::less<>>& statement_kinds() {
    static const std::set<std::string, std::less<>> s{
        "FunctionDef", "AsyncFunctionDef", "ClassDef", "Return", "Delete", "Assign", "AugAssign", "AnnAssign",
        "For", "AsyncFor", "While", "If", "With", "AsyncWith", "Raise", "Try", "Assert", "Import", "ImportFrom",
        "Global", "Nonlocal", "Expr", "Pass", "Break", "Continue", "ExceptHandler"};
    return s;
}

bool is_stmt(const py::Node& n) { return statement_kinds().count(n.kind) > 0; }

// Straight-line def-use extraction; function, lambda and class bodies open scopes.
class Dataflow {
public:
    std::vector<DefUseEdge> run(const py::Node& module) {
        scopes_.emplace_back();
        for (const auto& c : module.children) stmt(*c);
        return std::move(edges_);
    }

private:
    void define(const std::string& name, const std::string& kind) {
        if (name.empty()) return;
        canon_.emplace(name, "var_" + std::to_string(canon_.size()));
        scopes_.back()[name] = kind;
    }

    void use(const std::string& name, const std::string& parent) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            if (auto d = it->find(name); d != it->end()) {
                edges_.push_back({canon_.at(name), d->second, parent});
                return;
            }
        }
    }

    void bind(const py::Node& t, const std::string& definer) {
        if (t.kind == "Name") {
            define(t.ident, definer);
        } else if (t.kind == "Tuple" || t.kind == "List" || t.kind == "Starred") {
            for (const auto& c : t.children) bind(*c, definer);
        } else {
            for (const auto& c : t.children) expr(*c, t.kind);
        }
    }

    void arguments_outer(const py::Node& args) {
        for (const auto& a : args.children) {
            if (a->kind == "arg") {
                for (const auto& ann : a->children) expr(*ann, "arg");
            } else {
                expr(*a, "arguments");
            }
        }
    }

    void arguments_bind(const py::Node& args) {
        for (const auto& a : args.children)
            if (a->kind == "arg") define(a->ident, "arg");
    }

    void stmt(const py::Node& n) {
        const auto& k = n.kind;
        if (k == "Assign") {
            expr(*n.children.back(), k);
            for (std::size_t i = 0; i + 1 < n.children.size(); ++i) bind(*n.children[i], k);
        } else if (k == "AugAssign") {
            const auto& target = *n.children[0];
            if (target.kind == "Name") use(target.ident, k);
            else for (const auto& c : target.children) expr(*c, target.kind);
            expr(*n.children[2], k);
            if (target.kind == "Name") define(target.ident, k);
        } else if (k == "AnnAssign") {
            for (std::size_t i = 1; i < n.children.size(); ++i) expr(*n.children[i], k);
            bind(*n.children[0], k);
        } else if (k == "For" || k == "AsyncFor") {
            expr(*n.children[1], k);
            bind(*n.children[0], k);
            for (std::size_t i = 2; i < n.children.size(); ++i) stmt(*n.children[i]);
        } else if (k == "With" || k == "AsyncWith") {
            for (const auto& c : n.children) {
                if (c->kind == "withitem") {
                    expr(*c->children[0], "withitem");
                    if (c->children.size() > 1) bind(*c->children[1], k);
                } else {
                    stmt(*c);
                }
            }
        } else if (k == "ExceptHandler") {
            for (const auto& c : n.children)
                if (c->field == "type") expr(*c, k);
            define(n.ident, k);
            for (const auto& c : n.children)
                if (c->field == "body") stmt(*c);
        } else if (k == "FunctionDef" || k == "AsyncFunctionDef") {
            for (const auto& c : n.children) {
                if (c->field == "args") arguments_outer(*c);
                else if (c->field == "decorator_list" || c->field == "returns") expr(*c, k);
            }
            define(n.ident, k);
            scopes_.emplace_back();
            for (const auto& c : n.children) {
                if (c->field == "args") arguments_bind(*c);
                else if (c->field == "body") stmt(*c);
            }
            scopes_.pop_back();
        } else if (k == "ClassDef") {
            for (const auto& c : n.children)
                if (c->field != "body") expr(*c, k);
            define(n.ident, k);
            scopes_.emplace_back();
            for (const auto& c : n.children)
                if (c->field == "body") stmt(*c);
            scopes_.pop_back();
        } else if (k == "Import" || k == "ImportFrom") {
            for (const auto& c : n.children)
                if (c->ident != "*") define(c->ident, k);
        } else {
            for (const auto& c : n.children) {
                if (is_stmt(*c)) stmt(*c);
                else expr(*c, k);
            }
        }
    }

    void comprehension_expr(const py::Node& n) {
        for (const auto& c : n.children) {
            if (c->kind != "comprehension") continue;
            expr(*c->children[1], "comprehension");
            bind(*c->children[0], "comprehension");
            for (std::size_t i = 2; i < c->children.size(); ++i) expr(*c->children[i], "comprehension");
        }
        for (const auto& c : n.children)
            if (c->kind != "comprehension") expr(*c, n.kind);
    }

    void expr(const py::Node& n, const std::string& parent) {
        const auto& k = n.kind;
        if (k == "Name") {
            if (n.ctx == py::Ctx::load) use(n.ident, parent);
            return;
        }
        if (k == "Lambda") {
            arguments_outer(*n.children[0]);
            scopes_.emplace_back();
            arguments_bind(*n.children[0]);
            expr(*n.children[1], k);
            scopes_.pop_back();
            return;
        }
        if (k == "ListComp" || k == "SetComp" || k == "GeneratorExp" || k == "DictComp") {
            comprehension_expr(n);
            return;
        }
        if (k == "NamedExpr") {
            expr(*n.children[1], k);
            define(n.children[0]->ident, k);
            return;
        }
        for (const auto& c : n.children) expr(*c, k);
    }

    std::vector<std::map<std::string, std::string>> scopes_;
    std::map<std::string, std::string> canon_;
    std::vector<DefUseEdge> edges_;
};

py::NodePtr try_parse(std::string_view src) {
    try {
        return py::parse(src);
    } catch (const py::SyntaxError&) {
        return nullptr;
    }
}

}  // namespace

void CodeBleuConfig::validate() const {
    for (double w : {w_ngram, w_weighted_ngram, w_syntax, w_dataflow})
        if (w < 0) throw std::invalid_argument("codebleu weights must be non-negative");
    if (std::fabs(w_ngram + w_weighted_ngram + w_syntax + w_dataflow - 1.0) > 1e-9)
        throw std::invalid_argument("codebleu weights must sum to 1");
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("codebleu threshold must be in (0,1)");
    if (keyword_weight <= 0) throw std::invalid_argument("keyword weight must be positive");
}

double ngram_match(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
    return bleu_tokens(cand, ref);
}

double weighted_ngram_match(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                            double keyword_weight) {
    if (cand.empty() || ref.empty()) return 0.0;
    auto weight = [&](const std::string& t) { return py::is_keyword(t) ? keyword_weight : 1.0; };
    auto c1 = count_grams(cand, 1);
    auto r1 = count_grams(ref, 1);
    double num = 0.0, den = 0.0;
    for (const auto& [g, k] : r1) {
        double w = weight(g[0]);
        den += w * k;
        if (auto it = c1.find(g); it != c1.end()) num += w * std::min(k, it->second);
    }
    if (num <= 0.0) return 0.0;
    double log_sum = std::log(num / den);
    for (std::size_t n = 2; n <= 4; ++n) {
        auto c = count_grams(cand, n);
        auto r = count_grams(ref, n);
        int matched = 0;
        for (const auto& [g, k] : c)
            if (auto it = r.find(g); it != r.end()) matched += std::min(k, it->second);
        double total = cand.size() >= n ? static_cast<double>(cand.size() - n + 1) : 0.0;
        log_sum += std::log((matched + 1.0) / (total + 1.0));
    }
    double cl = static_cast<double>(cand.size());
    double rl = static_cast<double>(ref.size());
    double bp = cl > rl ? 1.0 : std::exp(1.0 - rl / cl);
    return bp * std::exp(log_sum / 4.0);
}

std::optional<double> syntax_match(const py::Node& candidate, const py::Node& reference) {
    std::vector<std::string> ref, cand;
    collect_shapes(reference, ref);
    if (ref.empty()) return std::nullopt;
    collect_shapes(candidate, cand);
    std::set<std::string> have(cand.begin(), cand.end());
    auto hits = std::count_if(ref.begin(), ref.end(), [&](const std::string& s) { return have.count(s) > 0; });
    return static_cast<double>(hits) / static_cast<double>(ref.size());
}

double syntax_match(std::string_view candidate, std::string_view reference) {
    auto ref = py::parse(reference);
    auto cand = try_parse(candidate);
    if (!cand) return 0.0;
    return syntax_match(*cand, *ref).value_or(0.0);
}

std::vector<DefUseEdge> dataflow_edges(const py::Node& module) { return Dataflow().run(module); }

std::optional<double> dataflow_match(const py::Node& candidate, const py::Node& reference) {
    auto ref = dataflow_edges(reference);
    if (ref.empty()) return std::nullopt;
    auto cand = dataflow_edges(candidate);
    std::map<DefUseEdge, int> pool;
    for (auto& e : cand) ++pool[e];
    int matched = 0;
    for (const auto& e : ref) {
        if (auto it = pool.find(e); it != pool.end() && it->second > 0) {
            --it->second;
            ++matched;
        }
    }
    return static_cast<double>(matched) / static_cast<double>(ref.size());
}

double dataflow_match(std::string_view candidate, std::string_view reference) {
    auto ref = py::parse(reference);
    auto cand = try_parse(candidate);
    if (!cand) return 0.0;
    return dataflow_match(*cand, *ref).value_or(0.0);
}

CodeBleuScore codebleu_detail(std::string_view candidate, std::string_view reference, const CodeBleuConfig& cfg) {
    CodeBleuScore s;
    auto ct = py::code_tokens(candidate);
    auto rt = py::code_tokens(reference);
    if (!rt.empty()) s.ngram = ngram_match(ct, rt);
    if (std::any_of(rt.begin(), rt.end(), [](const std::string& t) { return py::is_keyword(t); }))
        s.weighted_ngram = weighted_ngram_match(ct, rt, cfg.keyword_weight);
    if (auto ref = try_parse(reference)) {
        auto cand = try_parse(candidate);
        auto syn = syntax_match(cand ? *cand : *ref, *ref);
        if (syn) s.syntax = cand ? *syn : 0.0;
        auto flow = dataflow_match(cand ? *cand : *ref, *ref);
        if (flow) s.dataflow = cand ? *flow : 0.0;
    }
    double num = 0.0, den = 0.0;
    auto acc = [&](const std::optional<double>& v, double w) {
        if (!v) return;
        num += w * *v;
        den += w;
    };
    acc(s.ngram, cfg.w_ngram);
    acc(s.weighted_ngram, cfg.w_weighted_ngram);
    acc(s.syntax, cfg.w_syntax);
    acc(s.dataflow, cfg.w_dataflow);
    s.total = den > 0.0 ? num / den : 0.0;
    return s;
}

double codebleu(std::string_view candidate, std::string_view reference, const CodeBleuConfig& cfg) {
    return codebleu_detail(candidate, reference, cfg).total;
}

}  // namespace tactix
