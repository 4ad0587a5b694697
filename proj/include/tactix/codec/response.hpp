// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tactix/codec/tactic.hpp"

namespace tactix {

struct ParsedResponse {
    std::string thought;
    std::string action_name;
    std::string action_input;
    std::string action_output;
    /// For "<action>: <target>" names, the text after the colon ("Call tactic: math" -> "math").
    std::optional<std::string> call_target;
    /// The name exactly as written.
    std::string raw_name;
    bool operator==(const ParsedResponse&) const = default;
};

struct FormatError {
    std::string description;
};

struct UnknownActionError {
    std::string name;
    std::vector<std::string> allowed;
};

using ResponseResult = std::variant<ParsedResponse, FormatError, UnknownActionError>;

/// Parse the first complete Thought/Action block of an LLM reply. Never throws
/// on malformed input.
ResponseResult parse_llm_response(std::string_view raw, const Tactic& tactic);

/// Human-readable rendering of a parse failure, used as observation content.
std::string describe(const FormatError& e);
std::string describe(const UnknownActionError& e);

/// Sections of a routing call payload ("### option" / "### subproblem").
struct CallPayload {
    int option = 0;
    std::string subproblem;
};
std::optional<CallPayload> parse_call_payload(std::string_view output);
std::string render_call_payload(int option, std::string_view subproblem);

}  // namespace tactix
