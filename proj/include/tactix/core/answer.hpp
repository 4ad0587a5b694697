// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tactix/core/problem.hpp"

namespace tactix {

/// Numeric literals in order of appearance, after stripping currency symbols,
/// thousands separators and markdown emphasis. "62.00" yields 62.
std::vector<double> extract_numbers(std::string_view text);

/// Text parses as a bare number (optional sign, thousands separators, decimals).
std::optional<double> parse_bare_number(std::string_view text);

/// Edges of a graph answer written as "a -> b" items separated by newlines
/// or semicolons. Step names are normalized (trimmed, lower-cased,
/// inner whitespace collapsed).
std::optional<std::vector<Edge>> parse_graph_answer(std::string_view text);

std::string normalize_step_name(std::string_view name);

/// True iff `got` is an acceptable answer for `gold`. Total: unparseable
/// input is simply wrong.
bool answers_equal(AnswerKind kind, const AnswerValue& gold, std::string_view got, bool fuzzy);

/// Answer text is well formed for the kind (no surrounding prose).
bool answer_format_valid(AnswerKind kind, std::string_view got);

/// Shortest round-trippable decimal rendering; integral values print without a point.
std::string format_number(double v);

}  // namespace tactix
