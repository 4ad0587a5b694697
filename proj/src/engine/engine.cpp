// SPDX-License-Identifier: Apache-2.0
#include "tactix/engine/engine.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <thread>

#include "tactix/codec/response.hpp"
#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/answer.hpp"
#include "tactix/core/text.hpp"
#include "tactix/observe/observer.hpp"

namespace tactix {

std::int64_t approx_tokens(std::string_view text) { return static_cast<std::int64_t>((text.size() + 3) / 4); }

std::vector<std::string> validate_limits(const EngineLimits& l) {
    std::vector<std::string> out;
    if (l.max_steps < 1) out.push_back("max_steps must be >= 1");
    if (l.max_consecutive_errors < 1) out.push_back("max_consecutive_errors must be >= 1");
    return out;
}

Task task_for(const Problem& p, const std::string& tactic_name) {
    Task t;
    t.trajectory_id = p.id + "/" + tactic_name;
    t.problem_id = p.id;
    t.text = problem_text(p);
    t.answer_space = answer_space(p);
    t.gold = p.gold;
    t.kind = p.answer_kind;
    return t;
}

Engine::Engine(std::vector<Tactic> pool, CompletionProvider& llm, SandboxClient& sandbox, const IclBank* bank,
               EngineConfig cfg)
    : pool_(std::move(pool)), llm_(llm), sandbox_(sandbox), bank_(bank), cfg_(std::move(cfg)) {
    auto bad = validate_limits(cfg_.limits);
    if (!bad.empty()) throw std::invalid_argument(text::join(bad, "; "));
    std::set<std::string> names;
    for (const auto& t : pool_)
        if (!names.insert(t.name).second) throw std::invalid_argument("duplicate tactic in pool: " + t.name);
}

const Tactic* Engine::find_tactic(std::string_view name) const {
    for (const auto& t : pool_)
        if (t.name == name) return &t;
    return nullptr;
}

std::vector<std::string> Engine::pool_names() const {
    std::vector<std::string> out;
    for (const auto& t : pool_)
        if (t.name != "routing") out.push_back(t.name);
    return out;
}

Engine::Reply Engine::ask(const std::vector<Message>& messages) {
    Reply r;
    for (int attempt = 0; attempt < std::max(1, cfg_.attempts); ++attempt) {
        if (attempt > 0 && cfg_.backoff.count() > 0) std::this_thread::sleep_for(cfg_.backoff * (1 << (attempt - 1)));
        try {
            r.text = text::sanitize_utf8(llm_.complete(messages, cfg_.params).text);
            return r;
        } catch (const TransportError& e) {
            r.error = e.what();
        }
    }
    return r;
}

// Appends the step and updates the status. Returns true when the trajectory ended.
bool Engine::finish_step(Trajectory& t, Step step, int& consecutive) {
    consecutive = step.all_error() ? consecutive + 1 : 0;
    t.steps.push_back(std::move(step));
    if (consecutive >= cfg_.limits.max_consecutive_errors) {
        t.status = TrajStatus::error_limit;
        return true;
    }
    if (static_cast<int>(t.steps.size()) >= cfg_.limits.max_steps) {
        t.status = TrajStatus::max_steps;
        return true;
    }
    return false;
}

namespace {

Step error_step(std::string raw, std::string_view observer, std::string content) {
    Step s;
    s.action.output = std::move(raw);
    s.observations.push_back({std::string(observer), ObsStatus::error, std::move(content)});
    return s;
}

Step from_parsed(const ParsedResponse& p) { return Step{p.thought, {p.raw_name, p.action_input, p.action_output}, {}}; }

}  // namespace

Trajectory Engine::run_subtrajectory(const Task& task, const Tactic& tactic) {
    Trajectory t;
    t.id = task.trajectory_id;
    t.problem_id = task.problem_id;
    t.tactic = tactic.name;
    int consecutive = 0;
    ObserveOptions opts;
    opts.timeout_ms = cfg_.sandbox_timeout_ms;
    const auto& terminal = tactic.terminal_action().name;

    while (t.status == TrajStatus::running) {
        auto prompt = build_prompt({&tactic, task.text, task.answer_space, &t.steps, false}, cfg_.policy, bank_);
        if (prompt.zero_shot && std::find(t.flags.begin(), t.flags.end(), "zero_shot") == t.flags.end())
            t.flags.push_back("zero_shot");
        auto reply = ask(prompt.messages);
        if (!reply.text) {
            finish_step(t, error_step("", kGatewayObserver, "LLM request failed: " + reply.error), consecutive);
            continue;
        }
        auto parsed = parse_llm_response(*reply.text, tactic);
        if (auto* fe = std::get_if<FormatError>(&parsed)) {
            finish_step(t, error_step(*reply.text, kParserObserver, describe(*fe)), consecutive);
            continue;
        }
        if (auto* ue = std::get_if<UnknownActionError>(&parsed)) {
            finish_step(t, error_step(*reply.text, kParserObserver, describe(*ue)), consecutive);
            continue;
        }
        const auto& p = std::get<ParsedResponse>(parsed);
        auto step = from_parsed(p);
        if (p.action_name == terminal && !p.call_target) {
            auto answer = std::string(text::trim(p.action_output));
            step.observations = observe(p, tactic, sandbox_, opts);
            bool accept = cfg_.mode == EngineMode::evaluate || !task.gold ||
                          answers_equal(task.kind, *task.gold, answer, false);
            if (accept) {
                t.steps.push_back(std::move(step));
                t.status = TrajStatus::answered;
                t.final_answer = answer;
                break;
            }
            step.observations.push_back({std::string(kParserObserver), ObsStatus::error, "The answer is incorrect."});
            finish_step(t, std::move(step), consecutive);
            continue;
        }
        step.observations = observe(p, tactic, sandbox_, opts);
        finish_step(t, std::move(step), consecutive);
    }
    t.token_count = cfg_.tokenizer(render_steps(t.steps));
    return t;
}

RoutingResult Engine::run_routing(const Problem& problem, const Tactic& routing) {
    RoutingResult out;
    auto& t = out.routing;
    t.id = problem.id + "/" + routing.name;
    t.problem_id = problem.id;
    t.tactic = routing.name;
    int consecutive = 0;
    ObserveOptions opts;
    opts.timeout_ms = cfg_.sandbox_timeout_ms;
    opts.pool = pool_names();
    const auto text = problem_text(problem);
    const auto space = answer_space(problem);
    const auto& terminal = routing.terminal_action().name;

    while (t.status == TrajStatus::running) {
        auto prompt = build_prompt({&routing, text, space, &t.steps, true}, cfg_.policy, bank_);
        if (prompt.zero_shot && std::find(t.flags.begin(), t.flags.end(), "zero_shot") == t.flags.end())
            t.flags.push_back("zero_shot");
        auto reply = ask(prompt.messages);
        if (!reply.text) {
            finish_step(t, error_step("", kGatewayObserver, "LLM request failed: " + reply.error), consecutive);
            continue;
        }
        auto parsed = parse_llm_response(*reply.text, routing);
        if (auto* fe = std::get_if<FormatError>(&parsed)) {
            finish_step(t, error_step(*reply.text, kParserObserver, describe(*fe)), consecutive);
            continue;
        }
        if (auto* ue = std::get_if<UnknownActionError>(&parsed)) {
            finish_step(t, error_step(*reply.text, kParserObserver, describe(*ue)), consecutive);
            continue;
        }
        const auto& p = std::get<ParsedResponse>(parsed);
        auto step = from_parsed(p);
        if (p.action_name == terminal && !p.call_target) {
            step.observations = observe(p, routing, sandbox_, opts);
            t.steps.push_back(std::move(step));
            t.status = TrajStatus::answered;
            t.final_answer = std::string(text::trim(p.action_output));
            break;
        }
        if (!p.call_target) {
            step.observations = observe(p, routing, sandbox_, opts);
            finish_step(t, std::move(step), consecutive);
            continue;
        }
        auto payload = parse_call_payload(p.action_output);
        if (!payload) {
            step.observations.push_back({std::string(kParserObserver), ObsStatus::error,
                                         "A tactic call needs '### option' with a statement number and '### subproblem' "
                                         "with the subproblem text."});
            finish_step(t, std::move(step), consecutive);
            continue;
        }
        step.observations = observe(p, routing, sandbox_, opts);
        auto name = resolve_call(routing, *p.call_target, opts.pool);
        const Tactic* child_tactic = name ? find_tactic(*name) : nullptr;
        if (!child_tactic) {
            finish_step(t, std::move(step), consecutive);
            continue;
        }
        Task sub;
        sub.trajectory_id = t.id + "/" + std::to_string(out.children.size() + 1);
        sub.problem_id = problem.id;
        sub.text = payload->subproblem;
        auto child = run_subtrajectory(sub, *child_tactic);
        child.option = payload->option;
        child.subproblem = payload->subproblem;
        if (child.status == TrajStatus::answered) {
            step.observations.push_back({routing.observer_name(), ObsStatus::ok, std::string(kCallOk) + *child.final_answer});
        } else {
            step.observations.push_back({routing.observer_name(), ObsStatus::error,
                                         "Tactic execution failed: the sub-trajectory ended with status " +
                                             std::string(to_string(child.status))});
        }
        t.children.push_back(child.id);
        out.children.push_back(std::move(child));
        finish_step(t, std::move(step), consecutive);
    }
    t.token_count = cfg_.tokenizer(render_steps(t.steps));
    return out;
}

std::vector<std::string> check_trajectory(const Trajectory& t, const Tactic& tactic, const EngineLimits& limits) {
    std::vector<std::string> v;
    auto n = static_cast<int>(t.steps.size());
    if (n > limits.max_steps) v.push_back("more steps than max_steps");
    int trailing = 0;
    for (auto it = t.steps.rbegin(); it != t.steps.rend() && it->all_error(); ++it) ++trailing;
    int run = 0;
    for (const auto& s : t.steps) {
        run = s.all_error() ? run + 1 : 0;
        if (run >= limits.max_consecutive_errors && t.status != TrajStatus::error_limit)
            v.push_back("error run reaches the limit without error_limit status");
    }
    bool last_terminal = n > 0 && t.steps.back().action.name == tactic.terminal_action().name;
    switch (t.status) {
        case TrajStatus::running: v.push_back("trajectory still running"); break;
        case TrajStatus::answered:
            if (!t.final_answer) v.push_back("answered without final_answer");
            if (!last_terminal) v.push_back("answered but last action is not terminal");
            break;
        case TrajStatus::max_steps:
            if (n != limits.max_steps) v.push_back("max_steps status with a different step count");
            if (t.final_answer) v.push_back("final_answer on an unanswered trajectory");
            break;
        case TrajStatus::error_limit:
            if (trailing != limits.max_consecutive_errors) v.push_back("error_limit without exactly the limit of trailing error steps");
            if (t.final_answer) v.push_back("final_answer on an unanswered trajectory");
            break;
    }
    return v;
}

}  // namespace tactix
