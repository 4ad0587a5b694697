// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tactix {

enum class Source { gsm8k, folio, proscript, reclor, hybrid };
enum class AnswerKind { numeric, nli3, graph, option_index };
enum class Difficulty { GG, GF, GFX, GFR, GFRX };
enum class Granularity { easy, hard };

struct Number {
    double value = 0.0;
    bool operator==(const Number&) const = default;
};

struct Label {
    std::string text;
    bool operator==(const Label&) const = default;
};

struct Edge {
    std::string from;
    std::string to;
    auto operator<=>(const Edge&) const = default;
};

struct Graph {
    std::vector<Edge> edges;
    bool operator==(const Graph&) const = default;
};

struct OptionIndex {
    int value = 0;
    bool operator==(const OptionIndex&) const = default;
};

using AnswerValue = std::variant<Number, Label, Graph, OptionIndex>;

/// Provenance of one option of a blended multichoice problem.
struct OptionSource {
    std::string problem_id;
    Source dataset = Source::gsm8k;
    std::string gold_tactic;
    bool is_correct = false;
    /// Original problem text, verbatim (what a perfect router would extract).
    std::string text;
    /// Gold answer of the source problem rendered as text ("Agree", "162", ...).
    std::string gold_answer;
    std::optional<std::string> gold_program;
    bool operator==(const OptionSource&) const = default;
};

struct HybridInfo {
    Difficulty difficulty = Difficulty::GG;
    Granularity granularity = Granularity::easy;
    std::vector<OptionSource> option_sources;
    bool operator==(const HybridInfo&) const = default;
};

/// A reasoning task. A hybrid problem is a Problem with source == hybrid and
/// an engaged `hybrid` block; its gold is the 1-based index of the correct option.
struct Problem {
    std::string id;
    Source source = Source::gsm8k;
    std::string context;
    std::string question;
    std::vector<std::string> statements;
    AnswerValue gold = Number{};
    AnswerKind answer_kind = AnswerKind::numeric;
    bool fuzzy_eligible = false;
    std::optional<std::string> gold_program;
    std::optional<std::string> gold_tactic;
    std::optional<HybridInfo> hybrid;
    bool operator==(const Problem&) const = default;
};

std::string_view to_string(Source s);
std::string_view to_string(AnswerKind k);
std::string_view to_string(Difficulty d);
std::string_view to_string(Granularity g);

std::optional<Source> parse_source(std::string_view s);
std::optional<AnswerKind> parse_answer_kind(std::string_view s);
std::optional<Difficulty> parse_difficulty(std::string_view s);
std::optional<Granularity> parse_granularity(std::string_view s);

/// Dataset a difficulty letter stands for ('G', 'F', 'R').
std::optional<Source> source_for_letter(char letter);

/// Violations of the Problem type invariants; empty iff the problem is well formed.
std::vector<std::string> validate_problem(const Problem& p);

/// The textual form a problem takes inside prompts and routing subproblems.
std::string problem_text(const Problem& p);

/// Gold answer rendered the way a solver would state it.
std::string answer_text(const AnswerValue& v);

}  // namespace tactix
