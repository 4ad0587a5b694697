// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tactix {

class TacticParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ActionSpec {
    std::string name;
    std::string input_desc;
    std::string functionality_desc;
    std::string output_desc;
    bool terminal = false;
    bool produces_program = false;
    bool operator==(const ActionSpec&) const = default;
};

/// Routing table entry of a routing tactic ("#T#" line):
/// the name the agent calls, the pool tactic it resolves to, and the wording
/// used when a routing step is written for it.
struct TacticRoute {
    std::string call_name;
    std::string tactic;
    std::string problem_kind;
    std::string phrase;
    bool operator==(const TacticRoute&) const = default;
};

struct Tactic {
    std::string name;
    std::string description;
    /// Observer display name; empty means the default runner name.
    std::string observer;
    /// Body of the details section, verbatim.
    std::string details;
    std::string template_intro;
    std::string template_lang;
    std::string code_template;
    std::string action_intro;
    std::vector<ActionSpec> actions;

    /// Derived from `details`.
    std::vector<std::string> libs;
    std::vector<TacticRoute> routes;

    bool operator==(const Tactic&) const = default;

    const ActionSpec* find_action(std::string_view action_name) const;
    const ActionSpec& terminal_action() const;
    std::vector<std::string> action_names() const;
    std::string observer_name() const { return observer.empty() ? "Runner" : observer; }
    const TacticRoute* route_for_call(std::string_view call_name) const;
    const TacticRoute* route_for_tactic(std::string_view tactic_name) const;
};

Tactic parse_tactic_document(std::string_view doc);
std::string render_tactic_document(const Tactic& t);

/// Reads every "*.md" file of a directory, sorted by file name.
std::vector<Tactic> load_tactic_dir(const std::string& dir);

/// Action names that revise earlier programs.
bool is_revise_action(std::string_view action_name);

}  // namespace tactix
