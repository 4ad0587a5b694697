// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tactix/pyast/pyast.hpp"

namespace tactix {

struct CodeBleuConfig {
    double w_ngram = 0.15;
    double w_weighted_ngram = 0.15;
    double w_syntax = 0.35;
    double w_dataflow = 0.35;
    double threshold = 0.15;
    double keyword_weight = 5.0;

    /// Throws std::invalid_argument unless weights sum to 1 and 0 < threshold < 1.
    void validate() const;
};

/// Component scores; a disengaged component was dropped because the
/// reference side has nothing to compare.
struct CodeBleuScore {
    std::optional<double> ngram;
    std::optional<double> weighted_ngram;
    std::optional<double> syntax;
    std::optional<double> dataflow;
    double total = 0.0;
};

CodeBleuScore codebleu_detail(std::string_view candidate, std::string_view reference, const CodeBleuConfig& cfg = {});
double codebleu(std::string_view candidate, std::string_view reference, const CodeBleuConfig& cfg = {});

double ngram_match(const std::vector<std::string>& candidate, const std::vector<std::string>& reference);
double weighted_ngram_match(const std::vector<std::string>& candidate, const std::vector<std::string>& reference,
                            double keyword_weight);

/// Fraction of reference subtrees (nodes with at least one child) whose
/// kind-shape occurs in the candidate. nullopt if the reference has none.
std::optional<double> syntax_match(const py::Node& candidate, const py::Node& reference);
/// Source-level form: unparseable candidate scores 0; reference must parse.
double syntax_match(std::string_view candidate, std::string_view reference);

struct DefUseEdge {
    std::string var;      // canonical name, var_<k> by order of first definition
    std::string definer;  // node kind that bound the variable
    std::string user;     // node kind directly containing the use
    auto operator<=>(const DefUseEdge&) const = default;
};

std::vector<DefUseEdge> dataflow_edges(const py::Node& module);

/// Multiset overlap of def-use edges over the reference edge count.
/// nullopt if the reference has no edges.
std::optional<double> dataflow_match(const py::Node& candidate, const py::Node& reference);
double dataflow_match(std::string_view candidate, std::string_view reference);

}  // namespace tactix
