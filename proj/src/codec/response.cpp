// SPDX-License-Identifier: Apache-2.0
#include "tactix/codec/response.hpp"

#include <charconv>

#include "tactix/core/text.hpp"

namespace tactix {

namespace {

using Lines = std::vector<std::string_view>;

std::optional<std::size_t> header_after(const Lines& lines, std::string_view header, std::size_t from) {
    for (auto i = from; i < lines.size(); ++i)
        if (text::trim(lines[i]) == header) return i;
    return std::nullopt;
}

std::string block(const Lines& lines, std::size_t b, std::size_t e) {
    std::string out;
    for (auto i = b; i < e; ++i) {
        if (i > b) out += '\n';
        out += text::rtrim(lines[i]);
    }
    return text::trim_blank_lines(out);
}

}  // namespace

ResponseResult parse_llm_response(std::string_view raw, const Tactic& tactic) {
    auto lines = text::split_lines(raw);
    auto t = header_after(lines, "### Thought", 0);
    if (!t) return FormatError{"missing '### Thought' header"};
    auto a = header_after(lines, "### Action", *t + 1);
    if (!a) return FormatError{"missing '### Action' header"};
    auto n = header_after(lines, "## Name", *a + 1);
    if (!n) return FormatError{"missing '## Name' header"};
    auto i = header_after(lines, "## Input", *n + 1);
    if (!i) return FormatError{"missing '## Input' header"};
    auto o = header_after(lines, "## Output", *i + 1);
    if (!o) return FormatError{"missing '## Output' header"};
    std::size_t end = *o + 1;
    while (end < lines.size()) {
        auto l = text::trim(lines[end]);
        if (l == "### Thought" || l == "=== observations ===" || l == "=== response ===") break;
        ++end;
    }

    ParsedResponse r;
    r.thought = block(lines, *t + 1, *a);
    const auto name_block = block(lines, *n + 1, *i);
    r.raw_name = std::string(text::trim(name_block));
    if (r.raw_name.empty()) return FormatError{"empty action name"};
    if (r.raw_name.find('\n') != std::string::npos) return FormatError{"action name spans several lines"};
    r.action_input = block(lines, *i + 1, *o);
    r.action_output = block(lines, *o + 1, end);

    if (tactic.find_action(r.raw_name)) {
        r.action_name = r.raw_name;
        return r;
    }
    if (auto colon = r.raw_name.find(':'); colon != std::string::npos) {
        auto prefix = text::trim(std::string_view(r.raw_name).substr(0, colon));
        auto target = text::trim(std::string_view(r.raw_name).substr(colon + 1));
        if (tactic.find_action(prefix) && !target.empty()) {
            r.action_name = std::string(prefix);
            r.call_target = std::string(target);
            return r;
        }
    }
    return UnknownActionError{r.raw_name, tactic.action_names()};
}

std::string describe(const FormatError& e) { return "Response format error: " + e.description; }

std::string describe(const UnknownActionError& e) {
    return "Unknown action '" + e.name + "'. Allowed actions: " + text::join(e.allowed, ", ");
}

std::optional<CallPayload> parse_call_payload(std::string_view output) {
    auto lines = text::split_lines(output);
    auto opt = header_after(lines, "### option", 0);
    if (!opt) return std::nullopt;
    auto sub = header_after(lines, "### subproblem", *opt + 1);
    if (!sub) return std::nullopt;
    const auto num_text = block(lines, *opt + 1, *sub);
    auto num = text::trim(num_text);
    CallPayload p;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), p.option);
    if (ec != std::errc() || ptr != num.data() + num.size() || p.option < 1) return std::nullopt;
    p.subproblem = block(lines, *sub + 1, lines.size());
    return p;
}

std::string render_call_payload(int option, std::string_view subproblem) {
    return "### option\n" + std::to_string(option) + "\n### subproblem\n" + std::string(subproblem);
}

}  // namespace tactix
