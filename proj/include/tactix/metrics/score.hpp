// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tactix/codec/tactic.hpp"
#include "tactix/core/problem.hpp"
#include "tactix/core/trajectory.hpp"
#include "tactix/metrics/codebleu.hpp"

namespace tactix {

enum class ErrorType { correct, wrong_ans, runtime_err, wrong_format };

std::string_view to_string(ErrorType e);
std::optional<ErrorType> parse_error_type(std::string_view s);

/// How one option of a routed problem was handled.
struct OptionScore {
    int option = 0;
    std::string expected_tactic;
    /// Tactic of the last sub-trajectory spawned for this option; empty if none.
    std::string tactic;
    bool tactic_correct = false;
    double subp_bleu = 0.0;
    std::optional<double> option_codebleu;
    bool operator==(const OptionScore&) const = default;
};

struct ScoreRecord {
    std::string problem_id;
    std::string trajectory_id;
    /// Reporting group: the problem's dataset ("hybrid" for multi-option blends).
    std::string dataset;
    /// Difficulty of a multi-option hybrid; empty otherwise.
    std::string difficulty;
    bool routing = false;
    bool fuzzy_eligible = false;
    std::optional<std::string> answer;
    bool answered = false;
    bool correct = false;
    bool correct_fuzzy = false;
    bool has_program = false;
    bool program_ran = false;
    std::optional<double> codebleu;
    ErrorType error_type = ErrorType::runtime_err;
    std::vector<OptionScore> options;
    bool operator==(const ScoreRecord&) const = default;
};

/// Type invariants; empty when the record is consistent.
std::vector<std::string> validate_record(const ScoreRecord& r);

/// The last fenced program a trajectory emitted, as the sandbox would run it.
struct ProgramTrace {
    bool has_program = false;
    bool ran = false;
    std::optional<std::string> program;
};
ProgramTrace last_program(const Trajectory& t, const Tactic& tactic);

/// Scores a sub-trajectory solved under `tactic` against the problem's gold.
ScoreRecord score_trajectory(const Trajectory& t, const Tactic& tactic, const Problem& p, const CodeBleuConfig& cfg = {});

/// Scores a routing trajectory and its children. Options come from the
/// hybrid provenance; a plain problem counts as a single option.
ScoreRecord score_routing(const Trajectory& routing, const std::vector<Trajectory>& children,
                          const std::vector<Tactic>& pool, const Problem& p, const CodeBleuConfig& cfg = {});

std::string record_to_json(const ScoreRecord& r);
ScoreRecord record_from_json(std::string_view line);
std::vector<ScoreRecord> read_records(const std::string& path);
void write_records(const std::string& path, const std::vector<ScoreRecord>& rs);

}  // namespace tactix
