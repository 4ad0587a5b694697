// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tactix/metrics/score.hpp"

namespace tactix {

struct AggregateConfig {
    double codebleu_threshold = 0.15;
    /// Credit fuzzy matches on fuzzy-eligible records.
    bool fuzzy = true;
};

/// One reporting cell group. Percentages are in [0,100]; Prog_Qual and
/// SubP_Recog are means in [0,1]. nullopt renders as "n/a".
struct ReportRow {
    std::string dataset;
    std::string difficulty;
    bool routing = false;
    std::size_t n = 0;
    std::optional<double> acc;
    std::optional<double> acc_w_prog;
    std::optional<double> acc_w_prog_plus;
    std::optional<double> prog_qual;
    std::optional<double> tac_recog;
    std::optional<double> subp_recog;
    std::optional<double> acc_opt_done;
    /// Indexed by ErrorType.
    std::array<std::size_t, 4> errors{};
};

struct AggregateReport {
    AggregateConfig config;
    std::size_t records = 0;
    /// Ordered by (dataset, difficulty, routing).
    std::vector<ReportRow> rows;
};

/// Accuracy predicate shared by every accuracy column.
bool counts_correct(const ScoreRecord& r, bool fuzzy);
bool counts_with_program(const ScoreRecord& r, bool fuzzy);
bool counts_with_program_plus(const ScoreRecord& r, const AggregateConfig& cfg);
bool counts_options_done(const ScoreRecord& r, const AggregateConfig& cfg);

/// Metrics over one set of records, regardless of grouping.
ReportRow aggregate_row(const std::vector<ScoreRecord>& records, const AggregateConfig& cfg);

AggregateReport aggregate(const std::vector<ScoreRecord>& records, const AggregateConfig& cfg = {});

/// Violations of the report invariants (ordering of the accuracy columns, ranges).
std::vector<std::string> check_report(const AggregateReport& r);

std::string report_json(const AggregateReport& r);
std::string report_text(const AggregateReport& r);
std::string report_csv(const AggregateReport& r);

}  // namespace tactix
