// SPDX-License-Identifier: Apache-2.0
#include "tactix/observe/observer.hpp"

#include <algorithm>

#include "tactix/core/text.hpp"
#include "tactix/pyast/pyast.hpp"

namespace tactix {

namespace {

bool fence_line(std::string_view line) { return text::trim(line).substr(0, 3) == "```"; }

bool brings_imports(std::string_view code) {
    for (auto line : text::split_lines(code))
        if (line.substr(0, 7) == "import " || line.substr(0, 5) == "from ") return true;
    return false;
}

bool defines_main(std::string_view code) {
    for (auto line : text::split_lines(code))
        if (line.substr(0, 9) == "def main(") return true;
    return false;
}

// A top-level statement calling main(), guarded or not.
bool calls_main(const py::Node& module) {
    auto is_main_call = [](const py::Node& stmt) {
        if (stmt.kind != "Expr" || stmt.children.empty()) return false;
        const auto& call = *stmt.children.front();
        return call.kind == "Call" && !call.children.empty() && call.children.front()->kind == "Name" &&
               call.children.front()->ident == "main";
    };
    for (const auto& stmt : module.children) {
        if (is_main_call(*stmt)) return true;
        if (stmt->kind == "If")
            for (const auto& inner : stmt->children)
                if (inner->field == "body" && is_main_call(*inner)) return true;
    }
    return false;
}

std::string template_preamble(const Tactic& t) {
    std::string out;
    for (auto line : text::split_lines(t.code_template)) {
        if (text::trim(line).substr(0, 8) == "def main") break;
        out += std::string(line) + "\n";
    }
    return text::trim_blank_lines(out);
}

Observation parser_ok(std::string content) { return {std::string(kParserObserver), ObsStatus::ok, std::move(content)}; }

}  // namespace

std::optional<CodeFence> extract_code_fence(std::string_view text) {
    auto lines = text::split_lines(text);
    std::optional<CodeFence> first;
    int count = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!fence_line(lines[i])) continue;
        std::size_t close = i + 1;
        while (close < lines.size() && !fence_line(lines[close])) ++close;
        ++count;
        if (!first) {
            // Indentation of the opening fence is removed from the body.
            auto indent = lines[i].size() - text::trim(lines[i]).size() - (lines[i].size() - text::rtrim(lines[i]).size());
            CodeFence f;
            f.lang = std::string(text::trim(text::trim(lines[i]).substr(3)));
            for (auto k = i + 1; k < close; ++k) {
                auto l = lines[k];
                std::size_t cut = 0;
                while (cut < indent && cut < l.size() && (l[cut] == ' ' || l[cut] == '\t')) ++cut;
                f.body += std::string(l.substr(cut)) + "\n";
            }
            first = std::move(f);
        }
        i = close;
    }
    if (first) first->count = count;
    return first;
}

std::string assemble_program(const Tactic& tactic, std::string_view agent_code) {
    std::string program;
    auto preamble = template_preamble(tactic);
    if (brings_imports(agent_code) || preamble.empty()) program = std::string(agent_code);
    else program = preamble + "\n\n\n" + std::string(agent_code);
    if (!program.empty() && program.back() != '\n') program += '\n';
    if (defines_main(program)) {
        bool called = false;
        try {
            called = calls_main(*py::parse(program));
        } catch (const py::SyntaxError&) {
            // Let the interpreter report the syntax error.
            called = true;
        }
        if (!called) program += "\n\nmain()\n";
    }
    return program;
}

std::optional<std::string> resolve_call(const Tactic& routing, std::string_view target, const std::vector<std::string>& pool) {
    std::string name;
    if (const auto* r = routing.route_for_call(target)) name = r->tactic;
    else name = std::string(target);
    if (pool.empty() || std::find(pool.begin(), pool.end(), name) != pool.end()) return name;
    return std::nullopt;
}

std::string execution_content(const ExecutionResult& r, int timeout_ms) {
    switch (r.exit_status) {
        case ExitStatus::ok: return "stdout:\n" + r.stdout_text;
        case ExitStatus::nonzero: {
            std::string s = "The program failed.";
            if (!r.stdout_text.empty()) s += "\nstdout:\n" + r.stdout_text;
            s += "\nstderr:\n" + r.stderr_text;
            return s;
        }
        case ExitStatus::timeout: return "The program timed out after " + std::to_string(timeout_ms) + " ms.";
        case ExitStatus::protocol_error: return "Program execution failed: " + r.stderr_text;
    }
    return {};
}

std::vector<Observation> observe(const ParsedResponse& action, const Tactic& tactic, SandboxClient& sandbox,
                                 const ObserveOptions& opts) {
    std::vector<Observation> out;
    if (action.call_target) {
        if (auto name = resolve_call(tactic, *action.call_target, opts.pool)) {
            out.push_back(parser_ok("Solving subproblem with tactic " + *name));
        } else {
            out.push_back({std::string(kParserObserver), ObsStatus::error,
                           "Unknown tactic '" + *action.call_target + "'. Available tactics: " + text::join(opts.pool, ", ")});
        }
        return out;
    }
    const auto* spec = tactic.find_action(action.action_name);
    if (spec && spec->terminal) {
        out.push_back(parser_ok("Answer received: " + std::string(text::trim(action.action_output))));
        return out;
    }
    out.push_back(parser_ok("Action '" + action.action_name + "' accepted."));
    if (!spec || !spec->produces_program) return out;

    auto runner = tactic.observer_name();
    auto fence = extract_code_fence(action.action_output);
    if (!fence || text::trim(fence->body).empty()) {
        out.push_back({runner, ObsStatus::error, "no program found: the action output has no fenced code block"});
        return out;
    }
    auto result = sandbox.run(assemble_program(tactic, fence->body), opts.timeout_ms);
    out.push_back({runner, result.exit_status == ExitStatus::ok ? ObsStatus::ok : ObsStatus::error,
                   execution_content(result, opts.timeout_ms)});
    return out;
}

}  // namespace tactix
