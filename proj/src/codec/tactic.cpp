// SPDX-License-Identifier: Apache-2.0
#include "tactix/codec/tactic.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "tactix/core/text.hpp"
#include "tactix/pyast/pyast.hpp"

namespace tactix {

namespace {

constexpr std::string_view kName = "### Tactic name";
constexpr std::string_view kDesc = "### Problem type and tactic";
constexpr std::string_view kObserver = "### Observer";
constexpr std::string_view kDetails = "### Tactic details";
constexpr std::string_view kTemplate = "**Code template**";
constexpr std::string_view kActions = "**Action space**";
constexpr std::string_view kLibsIntro = "You will use the following python libs to solve the problem:";

using Lines = std::vector<std::string_view>;

std::string join_lines(const Lines& lines, std::size_t b, std::size_t e) {
    std::string out;
    for (auto i = b; i < e; ++i) {
        if (i > b) out += '\n';
        out += lines[i];
    }
    return text::trim_blank_lines(out);
}

std::optional<std::size_t> find_line(const Lines& lines, std::string_view header, std::size_t from = 0) {
    for (auto i = from; i < lines.size(); ++i)
        if (text::rtrim(lines[i]) == header) return i;
    return std::nullopt;
}

std::size_t require(const Lines& lines, std::string_view header, std::size_t from = 0) {
    auto at = find_line(lines, header, from);
    if (!at) throw TacticParseError("missing section: " + std::string(header));
    return *at;
}

bool is_fence(std::string_view line) { return text::trim(line).substr(0, 3) == "```"; }

ActionSpec parse_action(const Lines& lines, std::size_t b, std::size_t e) {
    ActionSpec a;
    a.name = std::string(text::trim(lines[b].substr(4)));
    if (a.name.empty()) throw TacticParseError("action with empty name");
    std::string* cur = nullptr;
    bool seen[3] = {false, false, false};
    for (auto i = b + 1; i < e; ++i) {
        auto line = lines[i];
        struct Bullet {
            std::string_view prefix;
            std::string* field;
            int slot;
        };
        Bullet bullets[] = {{"- Input:", &a.input_desc, 0},
                            {"- Functionality:", &a.functionality_desc, 1},
                            {"- Output:", &a.output_desc, 2}};
        bool matched = false;
        for (auto& bl : bullets) {
            if (line.substr(0, bl.prefix.size()) == bl.prefix) {
                auto rest = line.substr(bl.prefix.size());
                if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
                *bl.field = std::string(rest);
                cur = bl.field;
                seen[bl.slot] = true;
                matched = true;
                break;
            }
        }
        if (matched) continue;
        if (!cur) {
            if (text::trim(line).empty()) continue;
            throw TacticParseError("action '" + a.name + "': text before the Input bullet");
        }
        *cur += '\n';
        *cur += line;
    }
    for (auto* f : {&a.input_desc, &a.functionality_desc, &a.output_desc}) {
        // Blank lines separating actions are not part of the bullet.
        for (auto nl = f->find_last_of('\n'); nl != std::string::npos && text::trim(std::string_view(*f).substr(nl + 1)).empty();
             nl = f->find_last_of('\n'))
            f->erase(nl);
    }
    if (!seen[0] || !seen[1] || !seen[2])
        throw TacticParseError("action '" + a.name + "': missing Input, Functionality or Output bullet");
    // An output contract showing a main() block means the action emits a runnable program.
    a.produces_program = a.output_desc.find("```") != std::string::npos && a.output_desc.find("def main") != std::string::npos;
    a.terminal = text::contains_ci(a.name, "answer");
    return a;
}

std::vector<TacticRoute> parse_routes(std::string_view details) {
    std::vector<TacticRoute> out;
    for (auto line : text::split_lines(details)) {
        if (line.substr(0, 4) != "#T# ") continue;
        auto body = line.substr(4);
        auto arrow = body.find(" -> ");
        if (arrow == std::string_view::npos) throw TacticParseError("route line without '->': " + std::string(line));
        TacticRoute r;
        r.call_name = std::string(text::trim(body.substr(0, arrow)));
        auto parts = text::split(body.substr(arrow + 4), '|');
        if (parts.size() != 3) throw TacticParseError("route line needs tactic | kind | phrase: " + std::string(line));
        r.tactic = std::string(text::trim(parts[0]));
        r.problem_kind = std::string(text::trim(parts[1]));
        r.phrase = std::string(text::trim(parts[2]));
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<std::string> parse_libs(std::string_view details) {
    std::vector<std::string> out;
    auto lines = text::split_lines(details);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (text::trim(lines[i]) != kLibsIntro) continue;
        for (auto j = i + 1; j < lines.size() && !text::trim(lines[j]).empty(); ++j)
            out.emplace_back(text::trim(lines[j]));
        break;
    }
    return out;
}

}  // namespace

const ActionSpec* Tactic::find_action(std::string_view action_name) const {
    for (const auto& a : actions)
        if (a.name == action_name) return &a;
    return nullptr;
}

const ActionSpec& Tactic::terminal_action() const {
    for (const auto& a : actions)
        if (a.terminal) return a;
    throw TacticParseError("tactic '" + name + "' has no terminal action");
}

std::vector<std::string> Tactic::action_names() const {
    std::vector<std::string> out;
    for (const auto& a : actions) out.push_back(a.name);
    return out;
}

const TacticRoute* Tactic::route_for_call(std::string_view call_name) const {
    for (const auto& r : routes)
        if (r.call_name == call_name || r.tactic == call_name) return &r;
    return nullptr;
}

const TacticRoute* Tactic::route_for_tactic(std::string_view tactic_name) const {
    for (const auto& r : routes)
        if (r.tactic == tactic_name) return &r;
    return nullptr;
}

Tactic parse_tactic_document(std::string_view doc) {
    auto lines = text::split_lines(doc);
    Tactic t;
    auto name_at = require(lines, kName);
    auto desc_at = require(lines, kDesc, name_at);
    constexpr auto none = std::string_view::npos;
    auto details_at = require(lines, kDetails, desc_at);
    auto observer_at = find_line(lines, kObserver, desc_at).value_or(none);
    if (observer_at > details_at) observer_at = none;
    auto actions_at = require(lines, kActions, details_at);
    auto template_at = find_line(lines, kTemplate, details_at).value_or(none);
    if (template_at > actions_at) template_at = none;
    bool has_observer = observer_at != none;
    bool has_template = template_at != none;

    t.name = join_lines(lines, name_at + 1, desc_at);
    if (t.name.empty() || t.name.find('\n') != std::string::npos)
        throw TacticParseError("section " + std::string(kName) + " must hold one line");
    t.description = join_lines(lines, desc_at + 1, has_observer ? observer_at : details_at);
    if (t.description.empty()) throw TacticParseError("empty section: " + std::string(kDesc));
    if (has_observer) t.observer = join_lines(lines, observer_at + 1, details_at);
    t.details = join_lines(lines, details_at + 1, has_template ? template_at : actions_at);

    if (has_template) {
        std::size_t open = template_at + 1;
        while (open < actions_at && !is_fence(lines[open])) ++open;
        if (open == actions_at) throw TacticParseError("code template without a fenced block");
        std::size_t close = open + 1;
        while (close < actions_at && !is_fence(lines[close])) ++close;
        if (close == actions_at) throw TacticParseError("unterminated code template fence");
        t.template_intro = join_lines(lines, template_at + 1, open);
        t.template_lang = std::string(text::trim(text::trim(lines[open]).substr(3)));
        std::string code;
        for (auto i = open + 1; i < close; ++i) {
            if (i > open + 1) code += '\n';
            code += lines[i];
        }
        t.code_template = code;
        for (auto i = close + 1; i < actions_at; ++i)
            if (!text::trim(lines[i]).empty()) throw TacticParseError("text after the code template fence");
    }

    std::vector<std::size_t> starts;
    for (auto i = actions_at + 1; i < lines.size(); ++i)
        if (lines[i].substr(0, 4) == "#A# ") starts.push_back(i);
    if (starts.empty()) throw TacticParseError("missing section: #A# action blocks");
    t.action_intro = join_lines(lines, actions_at + 1, starts.front());
    std::set<std::string> names;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        auto end = k + 1 < starts.size() ? starts[k + 1] : lines.size();
        auto a = parse_action(lines, starts[k], end);
        if (!names.insert(a.name).second) throw TacticParseError("duplicate action name: " + a.name);
        t.actions.push_back(std::move(a));
    }
    auto terminals = std::count_if(t.actions.begin(), t.actions.end(), [](const ActionSpec& a) { return a.terminal; });
    if (terminals != 1)
        throw TacticParseError("tactic '" + t.name + "' needs exactly one answer action, found " + std::to_string(terminals));

    t.libs = parse_libs(t.details);
    t.routes = parse_routes(t.details);
    if (!t.code_template.empty()) {
        auto probe = text::replace_all(t.code_template, "<your code>", "pass");
        try {
            py::parse(probe);
        } catch (const py::SyntaxError& e) {
            throw TacticParseError("tactic '" + t.name + "': code template does not parse: " + e.what());
        }
    }
    return t;
}

std::string render_tactic_document(const Tactic& t) {
    std::string out;
    auto section = [&](std::string_view header, const std::string& body) {
        out += header;
        out += '\n';
        out += body;
        out += "\n\n";
    };
    section(kName, t.name);
    section(kDesc, t.description);
    if (!t.observer.empty()) section(kObserver, t.observer);
    section(kDetails, t.details);
    if (!t.code_template.empty() || !t.template_lang.empty()) {
        out += kTemplate;
        out += '\n';
        if (!t.template_intro.empty()) out += t.template_intro + "\n\n";
        out += "```" + t.template_lang + "\n" + t.code_template + "\n```\n\n";
    }
    out += kActions;
    out += '\n';
    if (!t.action_intro.empty()) out += t.action_intro + "\n\n";
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
        const auto& a = t.actions[i];
        out += "#A# " + a.name + "\n";
        out += "- Input: " + a.input_desc + "\n";
        out += "- Functionality: " + a.functionality_desc + "\n";
        out += "- Output: " + a.output_desc + "\n";
        if (i + 1 < t.actions.size()) out += '\n';
    }
    return out;
}

std::vector<Tactic> load_tactic_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw TacticParseError("tactics directory not found: " + dir);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".md") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Tactic> out;
    std::set<std::string> names;
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            out.push_back(parse_tactic_document(ss.str()));
        } catch (const TacticParseError& e) {
            throw TacticParseError(f.filename().string() + ": " + e.what());
        }
        if (!names.insert(out.back().name).second) throw TacticParseError("duplicate tactic name: " + out.back().name);
    }
    return out;
}

bool is_revise_action(std::string_view action_name) { return text::contains_ci(action_name, "revise"); }

}  // namespace tactix
