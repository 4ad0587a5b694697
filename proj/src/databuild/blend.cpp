// SPDX-License-Identifier: Apache-2.0
#include "tactix/databuild/blend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <set>

#include "tactix/core/answer.hpp"
#include "tactix/core/text.hpp"

namespace tactix {

namespace {

// Sentences end at . ? ! followed by whitespace, or at a line break.
std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        auto t = text::trim(cur);
        if (!t.empty()) out.emplace_back(t);
        cur.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '\n') {
            flush();
            continue;
        }
        cur += c;
        bool end = (c == '.' || c == '?' || c == '!') && (i + 1 == s.size() || std::isspace(static_cast<unsigned char>(s[i + 1])));
        if (end) flush();
    }
    flush();
    return out;
}

// "1. All cats ..." / "- wake up" -> bare item text.
std::string strip_marker(std::string_view line) {
    line = text::trim(line);
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i + 1 < line.size() && line[i] == '.' && line[i + 1] == ' ') return std::string(text::trim(line.substr(i + 2)));
    if (line.size() > 2 && line[0] == '-' && line[1] == ' ') return std::string(text::trim(line.substr(2)));
    return std::string(line);
}

std::string as_sentence(std::string s) {
    if (!s.empty() && s.back() != '.' && s.back() != '?' && s.back() != '!') s += '.';
    return s;
}

std::string quoted(std::string_view s) { return "\"" + std::string(text::trim(s)) + "\""; }

std::string edges_text(const Graph& g) {
    std::vector<std::string> parts;
    for (const auto& e : g.edges) parts.push_back(e.from + " -> " + e.to);
    return text::join(parts, "; ");
}

// Lower-cases a leading function word after a transition; names stay capitalized.
std::string continue_after_transition(const std::string& s) {
    static const std::set<std::string> lowerable{"A", "An", "The", "There", "In", "On", "At", "If", "All",
                                                 "Every", "Some", "No", "Each", "It", "Two", "Three"};
    if (!lowerable.count(s.substr(0, s.find(' ')))) return s;
    std::string out = s;
    out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
    return out;
}

}  // namespace

Decomposed decompose(const Problem& p) {
    Decomposed d;
    switch (p.source) {
        case Source::gsm8k: {
            std::string full = p.context.empty() ? p.question : p.context + " " + p.question;
            auto sents = split_sentences(full);
            if (sents.empty()) throw ConfigError("problem " + p.id + " has no text to blend");
            d.ask = sents.back();
            sents.pop_back();
            d.context = text::join(sents, " ");
            break;
        }
        case Source::folio: {
            std::vector<std::string> items;
            for (auto line : text::split_lines(p.context))
                if (!text::trim(line).empty()) items.push_back(as_sentence(strip_marker(line)));
            d.context = text::join(items, " ");
            d.ask = std::string(text::trim(p.question));
            break;
        }
        case Source::reclor:
            d.context = std::string(text::trim(p.context));
            d.ask = std::string(text::trim(p.question));
            break;
        case Source::proscript: {
            std::vector<std::string> items;
            for (auto line : text::split_lines(p.context))
                if (!text::trim(line).empty()) items.push_back(strip_marker(line));
            d.context = "The steps involved are: " + text::join(items, "; ") + ".";
            d.ask = std::string(text::trim(p.question));
            break;
        }
        case Source::hybrid: throw ConfigError("cannot blend an already blended problem: " + p.id);
    }
    return d;
}

std::string make_statement(const Problem& p, const AnswerValue& answer) {
    auto d = decompose(p);
    switch (p.answer_kind) {
        case AnswerKind::numeric:
            return "The answer to the question " + quoted(d.ask) + " is " + answer_text(answer) + ".";
        case AnswerKind::nli3: {
            const auto& label = std::get<Label>(answer).text;
            std::string verdict = label == "Agree"        ? "follows from the facts given"
                                  : label == "Contradict" ? "is ruled out by the facts given"
                                                          : "can be neither confirmed nor ruled out from the facts given";
            return "The claim " + quoted(d.ask) + " " + verdict + ".";
        }
        case AnswerKind::option_index: {
            auto k = static_cast<std::size_t>(std::get<OptionIndex>(answer).value);
            if (k < 1 || k > p.statements.size()) throw ConfigError("option out of range for " + p.id);
            return "For the question " + quoted(d.ask) + " the right choice is " + quoted(p.statements[k - 1]) + ".";
        }
        case AnswerKind::graph:
            return "To " + d.ask + ", the steps are ordered as " + edges_text(std::get<Graph>(answer)) + ".";
    }
    return {};
}

AnswerValue make_distractor(const Problem& p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    switch (p.answer_kind) {
        case AnswerKind::numeric: {
            double gold = std::get<Number>(p.gold).value;
            auto txt = format_number(gold);
            auto dot = txt.find('.');
            int decimals = dot == std::string::npos ? 0 : std::min<int>(6, static_cast<int>(txt.size() - dot - 1));
            double scale = std::pow(10.0, decimals);
            auto units = static_cast<long long>(std::llround(gold * scale));
            double frac = std::uniform_real_distribution<double>(0.01, 0.20)(rng);
            auto delta = std::max<long long>(1, std::llround(std::fabs(static_cast<double>(units)) * frac));
            if (units == 0) delta = std::uniform_int_distribution<long long>(1, 5)(rng) * static_cast<long long>(scale);
            bool down = std::bernoulli_distribution(0.5)(rng) && (units - delta >= 0 || units < 0);
            auto moved = down ? units - delta : units + delta;
            return Number{static_cast<double>(moved) / scale};
        }
        case AnswerKind::nli3: {
            std::vector<std::string> others;
            for (const char* l : {"Agree", "Contradict", "Uncertain"})
                if (std::get<Label>(p.gold).text != l) others.emplace_back(l);
            return Label{others[std::uniform_int_distribution<std::size_t>(0, others.size() - 1)(rng)]};
        }
        case AnswerKind::option_index: {
            int n = static_cast<int>(p.statements.size());
            if (n < 2) throw ConfigError("problem " + p.id + " has no alternative option");
            int gold = std::get<OptionIndex>(p.gold).value;
            int k = std::uniform_int_distribution<int>(1, n - 1)(rng);
            return OptionIndex{k >= gold ? k + 1 : k};
        }
        case AnswerKind::graph: {
            auto g = std::get<Graph>(p.gold);
            if (g.edges.empty()) throw ConfigError("problem " + p.id + " has no edge to perturb");
            auto& e = g.edges[std::uniform_int_distribution<std::size_t>(0, g.edges.size() - 1)(rng)];
            std::swap(e.from, e.to);
            return g;
        }
    }
    return p.gold;
}

std::string rule_blend(const std::vector<std::string>& contexts, Granularity g) {
    std::vector<std::string> parts;
    for (const auto& c : contexts)
        if (!text::trim(c).empty()) parts.emplace_back(text::trim(c));
    if (g == Granularity::easy) {
        static const std::vector<std::string> transitions{"Meanwhile,", "Separately,", "On another note,"};
        std::string out;
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i == 0) {
                out = parts[0];
                continue;
            }
            out += " " + transitions[(i - 1) % transitions.size()] + " " + continue_after_transition(parts[i]);
        }
        return out;
    }
    std::vector<std::vector<std::string>> sents;
    for (const auto& p : parts) sents.push_back(split_sentences(p));
    std::vector<std::string> mixed;
    for (std::size_t k = 0;; ++k) {
        bool any = false;
        for (const auto& s : sents)
            if (k < s.size()) {
                mixed.push_back(s[k]);
                any = true;
            }
        if (!any) break;
    }
    return text::join(mixed, " ");
}

std::vector<Message> blend_prompt(const std::vector<std::string>& contexts, Granularity g) {
    std::string system =
        "You merge several short passages into one coherent passage. Keep every fact, number and name from every "
        "passage. Do not add facts and do not answer any question. Reply with the merged passage only.\n";
    system += g == Granularity::easy
                  ? "Keep the sentences of each passage together and in their order; join the passages with a few transition words."
                  : "Shuffle the sentences of all passages and interleave them, while keeping the result readable.";
    std::string user;
    for (std::size_t i = 0; i < contexts.size(); ++i) user += "=== Passage " + std::to_string(i + 1) + "\n" + contexts[i] + "\n\n";
    user += "=== Merged passage\n";
    return {{"system", system}, {"user", user}};
}

Blender llm_blender(CompletionProvider& llm, CompletionParams params) {
    return [&llm, params](const std::vector<std::string>& contexts, Granularity g) {
        auto reply = llm.complete(blend_prompt(contexts, g), params);
        return std::string(text::trim(text::sanitize_utf8(reply.text)));
    };
}

BlendSpec plan_blend(std::string id, Difficulty d, Granularity g, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw ConfigError("cannot blend zero sources");
    std::mt19937_64 rng(seed);
    BlendSpec s;
    s.id = std::move(id);
    s.difficulty = d;
    s.granularity = g;
    s.correct_source = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    s.label = std::uniform_int_distribution<int>(1, static_cast<int>(n))(rng);
    s.seed = rng();
    return s;
}

BlendResult blend(const std::vector<Problem>& sources, const BlendSpec& spec, const Blender& blender) {
    auto n = sources.size();
    if (n < 1 || n > 4) throw ConfigError("blend needs 1 to 4 sources, got " + std::to_string(n));
    if (spec.correct_source >= n) throw ConfigError("correct source index out of range");
    if (spec.label < 1 || spec.label > static_cast<int>(n)) throw ConfigError("label out of range");
    for (const auto& s : sources)
        if (!s.gold_tactic) throw ConfigError("source " + s.id + " has no gold tactic");

    // Option order: the correct source at the label, the rest in source order.
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
        if (i != spec.correct_source) order.push_back(i);
    order.insert(order.begin() + (spec.label - 1), spec.correct_source);

    std::vector<std::string> contexts;
    for (const auto& s : sources) contexts.push_back(decompose(s).context);
    auto passage = n == 1 ? contexts[0] : blender(contexts, spec.granularity);
    if (text::trim(passage).empty() && !text::trim(text::join(contexts, "")).empty())
        throw BlendRejected("blender returned an empty passage", {});

    BlendResult r;
    auto& h = r.problem;
    h.id = spec.id;
    h.source = Source::hybrid;
    h.context = passage;
    h.answer_kind = AnswerKind::option_index;
    h.gold = OptionIndex{spec.label};
    h.gold_tactic = "routing";
    HybridInfo info;
    info.difficulty = spec.difficulty;
    info.granularity = spec.granularity;
    for (std::size_t pos = 0; pos < n; ++pos) {
        const auto& src = sources[order[pos]];
        bool correct = order[pos] == spec.correct_source;
        auto claim = correct ? src.gold : make_distractor(src, spec.seed + 0x9e3779b97f4a7c15ULL * (pos + 1));
        h.statements.push_back(make_statement(src, claim));
        r.claims.push_back(claim);
        OptionSource o;
        o.problem_id = src.id;
        o.dataset = src.source;
        o.gold_tactic = *src.gold_tactic;
        o.is_correct = correct;
        o.text = problem_text(src);
        o.gold_answer = answer_text(src.gold);
        o.gold_program = src.gold_program;
        info.option_sources.push_back(std::move(o));
    }
    h.hybrid = std::move(info);
    return r;
}

Problem wrap_single(const Problem& p) {
    BlendSpec spec;
    spec.id = p.id;
    return blend({p}, spec, rule_blend).problem;
}

std::vector<Problem> sample_difficulty(Difficulty d, const SourcePools& pools, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto letters = std::string(to_string(d));
    std::vector<Source> seen;
    std::vector<Problem> out;
    std::map<Source, std::set<std::size_t>> used;
    for (char letter : letters) {
        Source src;
        if (letter == 'X') {
            std::vector<Source> choices;
            for (auto s : seen)
                if (std::find(choices.begin(), choices.end(), s) == choices.end()) choices.push_back(s);
            src = choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
        } else {
            src = *source_for_letter(letter);
        }
        seen.push_back(src);
        auto it = pools.find(src);
        if (it == pools.end() || it->second.empty())
            throw ConfigError("no " + std::string(to_string(src)) + " problems available for difficulty " + letters);
        const auto& pool = it->second;
        auto& taken = used[src];
        if (taken.size() >= pool.size())
            throw ConfigError("not enough distinct " + std::string(to_string(src)) + " problems for difficulty " + letters);
        std::size_t k;
        do {
            k = std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng);
        } while (taken.count(k));
        taken.insert(k);
        out.push_back(pool[k]);
    }
    return out;
}

}  // namespace tactix
