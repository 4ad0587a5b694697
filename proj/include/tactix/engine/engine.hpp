// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tactix/codec/tactic.hpp"
#include "tactix/core/problem.hpp"
#include "tactix/core/trajectory.hpp"
#include "tactix/engine/prompt.hpp"
#include "tactix/llm/provider.hpp"
#include "tactix/observe/sandbox.hpp"

namespace tactix {

struct EngineLimits {
    int max_steps = 7;
    int max_consecutive_errors = 3;
};

/// evaluate: the terminal action ends the trajectory. generate: a wrong
/// answer is reported back and the trajectory continues until limits.
enum class EngineMode { evaluate, generate };

using Tokenizer = std::function<std::int64_t(std::string_view)>;
/// bytes / 4, rounded up.
std::int64_t approx_tokens(std::string_view text);

inline constexpr std::string_view kGatewayObserver = "llm-gateway";
inline constexpr std::string_view kCallOk = "Tactic execution successful. Tactic output:\n";

struct EngineConfig {
    EngineLimits limits;
    PromptPolicy policy;
    CompletionParams params;
    EngineMode mode = EngineMode::evaluate;
    int attempts = 3;
    std::chrono::milliseconds backoff{500};
    int sandbox_timeout_ms = 10000;
    Tokenizer tokenizer = approx_tokens;
};

/// Violations of the limit invariants; empty when valid.
std::vector<std::string> validate_limits(const EngineLimits& l);

/// One unit of work for a sub-trajectory.
struct Task {
    std::string trajectory_id;
    std::string problem_id;
    std::string text;
    std::string answer_space;
    /// Only consulted in generate mode.
    std::optional<AnswerValue> gold;
    AnswerKind kind = AnswerKind::numeric;
};

Task task_for(const Problem& p, const std::string& tactic_name);

struct RoutingResult {
    Trajectory routing;
    /// Sub-trajectories in spawn order; ids match routing.children.
    std::vector<Trajectory> children;
};

/// The thought/action/observation loop. Transport failures become error
/// observations; replay faults (ReplayError) propagate to the caller.
class Engine {
public:
    Engine(std::vector<Tactic> pool, CompletionProvider& llm, SandboxClient& sandbox, const IclBank* bank,
           EngineConfig cfg = {});

    Trajectory run_subtrajectory(const Task& task, const Tactic& tactic);
    Trajectory run_subtrajectory(const Problem& p, const Tactic& tactic) {
        return run_subtrajectory(task_for(p, tactic.name), tactic);
    }
    RoutingResult run_routing(const Problem& p, const Tactic& routing);

    const Tactic* find_tactic(std::string_view name) const;
    std::vector<std::string> pool_names() const;
    const EngineConfig& config() const { return cfg_; }

private:
    struct Reply {
        std::optional<std::string> text;
        std::string error;
    };
    Reply ask(const std::vector<Message>& messages);
    bool finish_step(Trajectory& t, Step step, int& consecutive);

    std::vector<Tactic> pool_;
    CompletionProvider& llm_;
    SandboxClient& sandbox_;
    const IclBank* bank_;
    EngineConfig cfg_;
};

/// Status soundness and limit invariants of a finished trajectory.
std::vector<std::string> check_trajectory(const Trajectory& t, const Tactic& tactic, const EngineLimits& limits);

/// Runs fn(i) for i in [0, n) on up to `parallelism` threads; results keep index order.
template <typename T>
std::vector<T> run_parallel(std::size_t n, int parallelism, const std::function<T(std::size_t)>& fn);

}  // namespace tactix

#include "tactix/engine/parallel.hpp"
