// SPDX-License-Identifier: Apache-2.0
#include "tactix/engine/prompt.hpp"

#include <algorithm>

#include <json.hpp>

#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/text.hpp"

namespace tactix {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kFormat =
    "Solve the problem with the tactic described below. Reply with exactly one step, written as\n"
    "### Thought\n<your reasoning>\n### Action\n## Name\n<one action name>\n## Input\n<the action input>\n"
    "## Output\n<the action output>\n"
    "Do not write observations; they are produced for you.\n\n";

json steps_to_json(const std::vector<Step>& steps) {
    // Reuse the trajectory codec's step layout.
    Trajectory t;
    t.steps = steps;
    return json::parse(trajectory_to_json(t))["steps"];
}

std::vector<Step> steps_from_json(const json& j) {
    json wrapper;
    wrapper["problem_id"] = "";
    wrapper["tactic"] = "";
    wrapper["status"] = "running";
    wrapper["steps"] = j;
    return trajectory_from_json(wrapper.dump()).steps;
}

void append_exemplar(std::string& out, const IclExemplar& e) {
    out += "=== Example question\n\n" + e.problem_text + "\n\n";
    if (!e.answer_space.empty()) out += "=== Final answer is one of the following\n\n" + e.answer_space + "\n\n";
    out += "=== Example steps\n\n" + render_steps(e.steps) + "\n\n";
}

}  // namespace

const IclEntry* IclBank::find(const std::string& tactic) const {
    auto it = entries_.find(tactic);
    return it == entries_.end() ? nullptr : &it->second;
}

bool IclBank::empty_for(const std::string& tactic) const {
    const auto* e = find(tactic);
    return !e || (e->heads.empty() && e->fulls.empty());
}

IclBank read_icl_bank(const std::string& path) {
    IclBank bank;
    auto data = read_file(path);
    std::size_t lineno = 0;
    for (auto line : text::split_lines(data)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto j = json::parse(line);
            IclExemplar e;
            e.problem_text = j.at("problem_text").get<std::string>();
            e.answer_space = j.value("answer_space", "");
            e.steps = steps_from_json(j.at("steps"));
            auto kind = j.at("kind").get<std::string>();
            auto tactic = j.at("tactic").get<std::string>();
            if (kind == "head") bank.add_head(tactic, std::move(e));
            else if (kind == "full") bank.add_full(tactic, std::move(e));
            else throw CodecError("exemplar kind must be head or full");
        } catch (const CodecError& e) {
            throw CodecError(e.what(), lineno);
        } catch (const json::exception& e) {
            throw CodecError(e.what(), lineno);
        }
    }
    return bank;
}

void write_icl_bank(const std::string& path, const IclBank& bank) {
    std::string out;
    for (const auto& [tactic, entry] : bank.entries()) {
        for (const auto* group : {&entry.heads, &entry.fulls}) {
            for (const auto& e : *group) {
                json j;
                j["tactic"] = tactic;
                j["kind"] = group == &entry.heads ? "head" : "full";
                j["problem_text"] = e.problem_text;
                j["answer_space"] = e.answer_space;
                j["steps"] = steps_to_json(e.steps);
                out += j.dump() + "\n";
            }
        }
    }
    write_file(path, out);
}

std::string elide_code(std::string_view s) {
    std::string out;
    bool inside = false;
    bool first_body_line = false;
    for (auto line : text::split_lines(s)) {
        bool fence = text::trim(line).substr(0, 3) == "```";
        if (fence) {
            out += std::string(line) + "\n";
            inside = !inside;
            first_body_line = inside;
            continue;
        }
        if (!inside) {
            out += std::string(line) + "\n";
        } else if (first_body_line) {
            out += "<your code>\n";
            first_body_line = false;
        }
    }
    if (!s.empty() && s.back() != '\n' && !out.empty()) out.pop_back();
    return out;
}

IclExemplar make_head_exemplar(const std::string& problem_text, const std::string& answer_space,
                               const std::vector<Step>& steps, int head_steps) {
    IclExemplar e{problem_text, answer_space, {}};
    auto n = std::min<std::size_t>(steps.size(), static_cast<std::size_t>(std::max(0, head_steps)));
    e.steps.assign(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(n));
    return e;
}

IclExemplar make_full_exemplar(const std::string& problem_text, const std::string& answer_space,
                               const std::vector<Step>& steps) {
    IclExemplar e{problem_text, answer_space, steps};
    for (auto& s : e.steps) {
        s.action.output = elide_code(s.action.output);
        for (auto& o : s.observations) o.content = "...";
    }
    return e;
}

std::string answer_space(const Problem& p) {
    switch (p.answer_kind) {
        case AnswerKind::numeric: return "a single number";
        case AnswerKind::nli3: return "Agree, Contradict, Uncertain";
        case AnswerKind::graph: return "one edge per line, written as <step> -> <step>";
        case AnswerKind::option_index: {
            std::vector<std::string> opts;
            for (std::size_t i = 1; i <= p.statements.size(); ++i) opts.push_back(std::to_string(i));
            return text::join(opts, ", ");
        }
    }
    return {};
}

Prompt build_prompt(const PromptInput& in, const PromptPolicy& policy, const IclBank* bank) {
    Prompt p;
    std::string system(kFormat);
    system += render_tactic_document(*in.tactic);
    p.messages.push_back({"system", system});

    static const std::vector<Step> none;
    const auto& steps = in.steps ? *in.steps : none;
    const IclEntry* entry = bank ? bank->find(in.tactic->name) : nullptr;
    std::string user;
    if (entry) {
        bool head_phase = !in.routing && static_cast<int>(steps.size()) < policy.head_steps;
        if (head_phase && !entry->heads.empty()) {
            for (const auto& e : entry->heads) {
                if (p.head_count == policy.head_exemplars) break;
                append_exemplar(user, e);
                ++p.head_count;
            }
        } else {
            int want = in.routing ? policy.routing_full_exemplars : policy.full_exemplars;
            for (const auto& e : entry->fulls) {
                if (p.full_count == want) break;
                append_exemplar(user, e);
                ++p.full_count;
            }
        }
    }
    p.zero_shot = p.head_count == 0 && p.full_count == 0;
    user += "=== Question\n\n" + in.problem_text + "\n\n";
    if (!in.answer_space.empty()) user += "=== Final answer is one of the following\n\n" + in.answer_space + "\n\n";
    user += "=== Steps so far\n\n";
    user += steps.empty() ? std::string("(none)") : render_steps(steps);
    user += "\n\n=== Next step\n";
    p.messages.push_back({"user", user});
    return p;
}

}  // namespace tactix
