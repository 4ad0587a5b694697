// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tactix/codec/response.hpp"
#include "tactix/codec/tactic.hpp"
#include "tactix/core/trajectory.hpp"
#include "tactix/observe/sandbox.hpp"

namespace tactix {

inline constexpr std::string_view kParserObserver = "Action parser";

struct CodeFence {
    std::string body;
    std::string lang;
    /// Number of fenced blocks in the text; only the first is used.
    int count = 0;
};

/// First fenced block of `text`, or nullopt when there is none.
std::optional<CodeFence> extract_code_fence(std::string_view text);

/// Program to execute for an agent-written block: runs verbatim when it
/// brings its own imports, otherwise the template preamble is prepended.
/// A call to main() is appended when main() is defined but never called.
std::string assemble_program(const Tactic& tactic, std::string_view agent_code);

struct ObserveOptions {
    int timeout_ms = 10000;
    /// Tactics a routing call may name; used for the error message only.
    std::vector<std::string> pool;
};

/// Observations for an action already validated against the tactic.
/// Routing calls get only the parser observation; the engine adds the
/// child's result once the sub-trajectory finishes.
std::vector<Observation> observe(const ParsedResponse& action, const Tactic& tactic, SandboxClient& sandbox,
                                 const ObserveOptions& opts = {});

/// Tactic name a routing call resolves to: the route table first, then a
/// direct pool name.
std::optional<std::string> resolve_call(const Tactic& routing, std::string_view target, const std::vector<std::string>& pool);

/// Content of a runner observation for a finished execution.
std::string execution_content(const ExecutionResult& r, int timeout_ms);

}  // namespace tactix
