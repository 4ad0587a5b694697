// SPDX-License-Identifier: Apache-2.0
#include "tactix/core/problem.hpp"

#include <algorithm>
#include <array>

#include "tactix/core/answer.hpp"
#include "tactix/core/text.hpp"

namespace tactix {

namespace {

constexpr std::array<std::string_view, 3> kNliLabels{"Agree", "Contradict", "Uncertain"};

bool gold_matches_kind(const AnswerValue& v, AnswerKind k) {
    switch (k) {
        case AnswerKind::numeric: return std::holds_alternative<Number>(v);
        case AnswerKind::nli3: return std::holds_alternative<Label>(v);
        case AnswerKind::graph: return std::holds_alternative<Graph>(v);
        case AnswerKind::option_index: return std::holds_alternative<OptionIndex>(v);
    }
    return false;
}

std::vector<Source> letter_pattern(Difficulty d) {
    switch (d) {
        case Difficulty::GG: return {Source::gsm8k, Source::gsm8k};
        case Difficulty::GF: return {Source::gsm8k, Source::folio};
        case Difficulty::GFX: return {Source::gsm8k, Source::folio};
        case Difficulty::GFR: return {Source::gsm8k, Source::folio, Source::reclor};
        case Difficulty::GFRX: return {Source::gsm8k, Source::folio, Source::reclor};
    }
    return {};
}

bool has_wildcard(Difficulty d) { return d == Difficulty::GFX || d == Difficulty::GFRX; }

void validate_hybrid(const Problem& p, std::vector<std::string>& out) {
    const auto& h = *p.hybrid;
    if (p.source != Source::hybrid) out.emplace_back("hybrid: block present on a non-hybrid source");
    if (p.answer_kind != AnswerKind::option_index) out.emplace_back("hybrid: answer_kind must be option_index");
    if (h.option_sources.size() != p.statements.size())
        out.emplace_back("hybrid: option_sources and statements differ in length");
    auto correct = std::count_if(h.option_sources.begin(), h.option_sources.end(),
                                 [](const OptionSource& o) { return o.is_correct; });
    if (correct != 1) out.emplace_back("hybrid: exactly one option source must be correct");
    if (const auto* g = std::get_if<OptionIndex>(&p.gold)) {
        for (std::size_t i = 0; i < h.option_sources.size(); ++i)
            if (h.option_sources[i].is_correct && static_cast<int>(i) + 1 != g->value)
                out.emplace_back("hybrid: correct option does not match label");
    }
    // A single option is the wrapped-standalone case; no letter pattern applies.
    if (h.option_sources.size() <= 1) return;
    auto fixed = letter_pattern(h.difficulty);
    std::size_t expected = fixed.size() + (has_wildcard(h.difficulty) ? 1 : 0);
    if (h.option_sources.size() != expected) {
        out.emplace_back("hybrid: option count does not match difficulty");
        return;
    }
    // Options may be presented in any order; compare datasets as multisets.
    std::vector<Source> got;
    for (const auto& o : h.option_sources) got.push_back(o.dataset);
    std::sort(got.begin(), got.end());
    auto remaining = got;
    for (auto want : fixed) {
        auto it = std::find(remaining.begin(), remaining.end(), want);
        if (it == remaining.end()) {
            out.emplace_back(std::string("hybrid: no option drawn from ") + std::string(to_string(want)));
            return;
        }
        remaining.erase(it);
    }
    if (has_wildcard(h.difficulty)) {
        auto x = remaining.front();
        if (std::find(fixed.begin(), fixed.end(), x) == fixed.end())
            out.emplace_back("hybrid: wildcard option drawn from a dataset outside the preceding letters");
    }
}

}  // namespace

std::string_view to_string(Source s) {
    switch (s) {
        case Source::gsm8k: return "gsm8k";
        case Source::folio: return "folio";
        case Source::proscript: return "proscript";
        case Source::reclor: return "reclor";
        case Source::hybrid: return "hybrid";
    }
    return "gsm8k";
}

std::string_view to_string(AnswerKind k) {
    switch (k) {
        case AnswerKind::numeric: return "numeric";
        case AnswerKind::nli3: return "nli3";
        case AnswerKind::graph: return "graph";
        case AnswerKind::option_index: return "option_index";
    }
    return "numeric";
}

std::string_view to_string(Difficulty d) {
    switch (d) {
        case Difficulty::GG: return "GG";
        case Difficulty::GF: return "GF";
        case Difficulty::GFX: return "GFX";
        case Difficulty::GFR: return "GFR";
        case Difficulty::GFRX: return "GFRX";
    }
    return "GG";
}

std::string_view to_string(Granularity g) { return g == Granularity::easy ? "easy" : "hard"; }

std::optional<Source> parse_source(std::string_view s) {
    for (auto v : {Source::gsm8k, Source::folio, Source::proscript, Source::reclor, Source::hybrid})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::optional<AnswerKind> parse_answer_kind(std::string_view s) {
    for (auto v : {AnswerKind::numeric, AnswerKind::nli3, AnswerKind::graph, AnswerKind::option_index})
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::optional<Difficulty> parse_difficulty(std::string_view s) {
    auto up = std::string(s);
    std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    for (auto v : {Difficulty::GG, Difficulty::GF, Difficulty::GFX, Difficulty::GFR, Difficulty::GFRX})
        if (to_string(v) == up) return v;
    return std::nullopt;
}

std::optional<Granularity> parse_granularity(std::string_view s) {
    if (s == "easy") return Granularity::easy;
    if (s == "hard") return Granularity::hard;
    return std::nullopt;
}

std::optional<Source> source_for_letter(char letter) {
    switch (letter) {
        case 'G': return Source::gsm8k;
        case 'F': return Source::folio;
        case 'R': return Source::reclor;
        default: return std::nullopt;
    }
}

std::vector<std::string> validate_problem(const Problem& p) {
    std::vector<std::string> out;
    if (p.id.empty()) out.emplace_back("id: must be nonempty");

    bool has_statements = !p.statements.empty();
    bool is_option = p.answer_kind == AnswerKind::option_index;
    if (has_statements != is_option)
        out.emplace_back("statements: nonempty iff answer_kind is option_index");

    if (!gold_matches_kind(p.gold, p.answer_kind)) {
        out.emplace_back("gold: value does not match answer_kind");
    } else if (const auto* opt = std::get_if<OptionIndex>(&p.gold)) {
        if (opt->value < 1 || opt->value > static_cast<int>(p.statements.size()))
            out.emplace_back("gold out of range");
    } else if (const auto* lab = std::get_if<Label>(&p.gold)) {
        if (std::find(kNliLabels.begin(), kNliLabels.end(), lab->text) == kNliLabels.end())
            out.emplace_back("gold not in label set");
    } else if (const auto* g = std::get_if<Graph>(&p.gold)) {
        if (g->edges.empty()) out.emplace_back("gold: graph has no edges");
        for (const auto& e : g->edges) {
            if (text::trim(e.from).empty() || text::trim(e.to).empty()) {
                out.emplace_back("gold: graph edge has an empty step name");
                break;
            }
            if (normalize_step_name(e.from) == normalize_step_name(e.to)) {
                out.emplace_back("gold: graph edge is a self-loop");
                break;
            }
        }
    }

    if (p.fuzzy_eligible && p.answer_kind != AnswerKind::numeric)
        out.emplace_back("fuzzy_eligible: requires numeric answer_kind");

    if (p.hybrid) {
        validate_hybrid(p, out);
    } else if (p.source == Source::hybrid) {
        out.emplace_back("hybrid: source is hybrid but provenance block is missing");
    }
    return out;
}

std::string problem_text(const Problem& p) {
    std::string out;
    auto numbered = [](const std::vector<std::string>& items) {
        std::string s;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i) s += '\n';
            s += std::to_string(i + 1) + ". " + items[i];
        }
        return s;
    };
    switch (p.source) {
        case Source::gsm8k:
            out = "Answer the question below.\n\n### Question:\n";
            out += p.context.empty() ? p.question : p.context + " " + p.question;
            break;
        case Source::folio:
            out =
                "Given a set of premises and a hypothesis, answer if the hypothesis\n"
                "agrees with the premises [Agree],\n"
                "contradicts with the premises [Contradict],\n"
                "or neutral with respect to the premises [Uncertain].\n\n### Premises:\n";
            out += p.context + "\n\n### Hypotheses:\n" + p.question;
            break;
        case Source::proscript:
            out =
                "Given a goal and its steps, order the steps as a directed graph.\n"
                "Answer with one edge per line written as <step> -> <step>.\n\n### Goal:\n";
            out += p.question + "\n\n### Steps:\n" + p.context;
            break;
        case Source::reclor:
            out = "Answer the question below by choosing the correct statement.\n\n### Context:\n";
            out += p.context + "\n\n### Question:\n" + p.question + "\n\n### Statements:\n" + numbered(p.statements);
            break;
        case Source::hybrid:
            out = "Read the context and choose the correct statement.\n\n### Context:\n";
            out += p.context + "\n\n### Statements:\n" + numbered(p.statements);
            break;
    }
    return out;
}

std::string answer_text(const AnswerValue& v) {
    struct Visitor {
        std::string operator()(const Number& n) const { return format_number(n.value); }
        std::string operator()(const Label& l) const { return l.text; }
        std::string operator()(const OptionIndex& o) const { return std::to_string(o.value); }
        std::string operator()(const Graph& g) const {
            std::string s;
            for (std::size_t i = 0; i < g.edges.size(); ++i) {
                if (i) s += '\n';
                s += g.edges[i].from + " -> " + g.edges[i].to;
            }
            return s;
        }
    };
    return std::visit(Visitor{}, v);
}

}  // namespace tactix
