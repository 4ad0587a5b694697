// SPDX-License-Identifier: Apache-2.0
#include "tactix/core/trajectory.hpp"

#include <algorithm>

namespace tactix {

bool Step::all_error() const {
    return !observations.empty() &&
           std::all_of(observations.begin(), observations.end(),
                       [](const Observation& o) { return o.status == ObsStatus::error; });
}

std::string_view to_string(ObsStatus s) { return s == ObsStatus::ok ? "ok" : "error"; }

std::string_view to_string(TrajStatus s) {
    switch (s) {
        case TrajStatus::running: return "running";
        case TrajStatus::answered: return "answered";
        case TrajStatus::max_steps: return "max_steps";
        case TrajStatus::error_limit: return "error_limit";
    }
    return "running";
}

std::optional<ObsStatus> parse_obs_status(std::string_view s) {
    if (s == "ok") return ObsStatus::ok;
    if (s == "error") return ObsStatus::error;
    return std::nullopt;
}

std::optional<TrajStatus> parse_traj_status(std::string_view s) {
    for (auto st : {TrajStatus::running, TrajStatus::answered, TrajStatus::max_steps, TrajStatus::error_limit})
        if (to_string(st) == s) return st;
    return std::nullopt;
}

}  // namespace tactix
