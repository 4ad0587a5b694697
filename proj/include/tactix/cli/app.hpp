// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tactix/core/problem.hpp"
#include "tactix/engine/engine.hpp"
#include "tactix/metrics/codebleu.hpp"

namespace tactix {

enum class Mode { solve, route, blend, filter, prep_train, report };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

enum class ExitCode : int { ok = 0, config = 1, infrastructure = 2 };

struct RunConfig {
    Mode mode = Mode::solve;
    std::string problems;
    std::string tactics_dir = "tactics";
    std::string icl_bank;

    /// "replay", "http" or, for blend only, "rule".
    std::string provider = "replay";
    std::string model;
    std::string replay;
    std::string endpoint;
    std::string wire = "openai_chat";
    std::string api_key_env = "TACTIX_API_KEY";
    double requests_per_second = 0.0;

    /// Exactly one of these selects the program executor for solve/route.
    std::string sandbox_table;
    std::string sandbox_cmd;

    EngineLimits limits;
    CodeBleuConfig codebleu;
    std::uint64_t seed = 0;
    int parallelism = 1;
    std::string out;

    // blend
    std::vector<Difficulty> difficulties;
    Granularity granularity = Granularity::easy;
    int count = 10;
    int judges = 0;

    // filter, prep-train
    std::string trajectories;
    std::string judge_bank;

    // report
    std::string records;
    std::string format = "text";
};

/// Checks flags and fixture files for the selected mode; throws ConfigError.
void validate_config(const RunConfig& cfg);

/// Runs one subcommand. Problems in the inputs are reported on `err`; the
/// return value is the process exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_route(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_blend(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_filter(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_prep_train(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace tactix
