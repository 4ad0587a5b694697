// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tactix {

enum class ObsStatus { ok, error };

struct Observation {
    std::string observer;
    ObsStatus status = ObsStatus::ok;
    std::string content;
    bool operator==(const Observation&) const = default;
};

struct Action {
    std::string name;
    std::string input;
    std::string output;
    bool operator==(const Action&) const = default;
};

/// One thought/action/observation triple.
struct Step {
    std::string thought;
    Action action;
    std::vector<Observation> observations;
    bool operator==(const Step&) const = default;

    /// Non-empty and every observation reported failure.
    bool all_error() const;
};

enum class TrajStatus { running, answered, max_steps, error_limit };

struct Trajectory {
    std::string id;
    std::string problem_id;
    std::string tactic;
    std::vector<Step> steps;
    TrajStatus status = TrajStatus::running;
    std::optional<std::string> final_answer;
    /// Ids of child sub-trajectories, in spawn order (routing only).
    std::vector<std::string> children;
    std::int64_t token_count = 0;
    /// Set on sub-trajectories spawned by a routing step.
    std::optional<int> option;
    std::optional<std::string> subproblem;
    /// Free-form markers such as "zero_shot" or "pj_dropped:3".
    std::vector<std::string> flags;

    bool operator==(const Trajectory&) const = default;
};

std::string_view to_string(ObsStatus s);
std::string_view to_string(TrajStatus s);
std::optional<ObsStatus> parse_obs_status(std::string_view s);
std::optional<TrajStatus> parse_traj_status(std::string_view s);

}  // namespace tactix
