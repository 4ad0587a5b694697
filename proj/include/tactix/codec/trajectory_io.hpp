// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tactix/core/problem.hpp"
#include "tactix/core/trajectory.hpp"

namespace tactix {

class CodecError : public std::runtime_error {
public:
    /// `line` is 1-based; 0 when the error is not tied to a line.
    CodecError(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Response and observation blocks of one step, as they appear in prompts.
std::string render_step(const Step& s);
/// Steps joined by response separators, without a header.
std::string render_steps(const std::vector<Step>& steps);

/// Header lines followed by the step blocks. Deterministic.
std::string render_trajectory(const Trajectory& t);
Trajectory parse_trajectory_text(std::string_view doc);

/// Steps only (the body that render_steps produces).
std::vector<Step> parse_steps(std::string_view body);

/// True iff no free-text field contains a line the text format reserves,
/// which is the condition under which parse(render(t)) == t.
bool text_safe(const Trajectory& t);

std::string trajectory_to_json(const Trajectory& t);
Trajectory trajectory_from_json(std::string_view line);

std::vector<Trajectory> read_trajectories(const std::string& path);
void write_trajectories(const std::string& path, const std::vector<Trajectory>& ts);

std::string problem_to_json(const Problem& p);
Problem problem_from_json(std::string_view line);
std::vector<Problem> read_problems(const std::string& path);
void write_problems(const std::string& path, const std::vector<Problem>& ps);

/// Whole-file helpers shared by the loaders.
std::string read_file(const std::string& path);
/// Calls fn on every nonblank line; parse failures are rethrown as CodecError with the line number.
void for_each_jsonl_line(const std::string& path, const std::function<void(std::string_view)>& fn);
void write_file(const std::string& path, std::string_view data);

}  // namespace tactix
