// SPDX-License-Identifier: Apache-2.0
#include "tactix/databuild/transforms.hpp"

#include <json.hpp>

#include "tactix/codec/response.hpp"
#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/errors.hpp"
#include "tactix/engine/engine.hpp"
#include "tactix/metrics/score.hpp"
#include "tactix/observe/observer.hpp"

namespace tactix {

using json = nlohmann::ordered_json;

Trajectory make_routing_trajectory(const Problem& hybrid, const Tactic& routing) {
    if (!hybrid.hybrid) throw ConfigError("problem " + hybrid.id + " has no blend provenance");
    const auto* label = std::get_if<OptionIndex>(&hybrid.gold);
    if (!label) throw ConfigError("problem " + hybrid.id + " has no option label");
    Trajectory t;
    t.id = hybrid.id + "/" + routing.name;
    t.problem_id = hybrid.id;
    t.tactic = routing.name;
    const auto& options = hybrid.hybrid->option_sources;
    for (std::size_t i = 0; i < options.size(); ++i) {
        const auto& o = options[i];
        const auto* route = routing.route_for_tactic(o.gold_tactic);
        if (!route) throw ConfigError("routing tactic has no route to " + o.gold_tactic);
        auto n = std::to_string(i + 1);
        Step s;
        s.thought = "Option " + n + " is a " + route->problem_kind + " problem. I will use " + route->phrase + " tactic to solve it.";
        s.action = {"Call tactic: " + route->call_name, "The main problem, and the past results",
                    render_call_payload(static_cast<int>(i + 1), o.text)};
        s.observations = {{std::string(kParserObserver), ObsStatus::ok, "Solving subproblem with tactic " + o.gold_tactic},
                          {routing.observer_name(), ObsStatus::ok, std::string(kCallOk) + o.gold_answer}};
        t.steps.push_back(std::move(s));
    }
    Step last;
    last.thought = "I have solved all the subproblems, I will aggregate the results and produce the answer";
    last.action = {routing.terminal_action().name, "all thoughts, actions, and observations so far", std::to_string(label->value)};
    t.steps.push_back(std::move(last));
    t.status = TrajStatus::answered;
    t.final_answer = std::to_string(label->value);
    return t;
}

namespace {

const Tactic& tactic_for(const Trajectory& t, const std::vector<Tactic>& tactics) {
    for (const auto& x : tactics)
        if (x.name == t.tactic) return x;
    throw ConfigError("trajectory " + t.id + " uses unknown tactic " + t.tactic);
}

bool produces_program(const Tactic& tactic, const std::string& name) {
    const auto* a = tactic.find_action(name);
    return a && a->produces_program;
}

}  // namespace

std::pair<std::vector<Trajectory>, std::vector<Trajectory>> filter_no_program(const std::vector<Trajectory>& trajs,
                                                                              const std::vector<Tactic>& tactics) {
    std::pair<std::vector<Trajectory>, std::vector<Trajectory>> out;
    for (const auto& t : trajs) {
        auto trace = last_program(t, tactic_for(t, tactics));
        (trace.has_program && trace.ran ? out.first : out.second).push_back(t);
    }
    return out;
}

std::set<std::size_t> detect_bad_steps(const Trajectory& t, const Tactic& tactic) {
    std::set<std::size_t> bad;
    const auto& terminal = tactic.terminal_action().name;
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const auto& name = t.steps[k].action.name;
        bool revise = is_revise_action(name);
        bool answer = name == terminal;
        if (!revise && !answer) continue;
        for (std::size_t i = 0; i < k; ++i) {
            const auto& earlier = t.steps[i].action.name;
            if ((revise && produces_program(tactic, earlier)) || (answer && earlier == terminal)) bad.insert(i);
        }
    }
    return bad;
}

Trajectory to_pj(const Trajectory& t, const Tactic& tactic) {
    Trajectory cur = t;
    std::vector<std::size_t> origin(cur.steps.size());
    for (std::size_t i = 0; i < origin.size(); ++i) origin[i] = i;
    while (true) {
        auto bad = detect_bad_steps(cur, tactic);
        if (bad.empty()) break;
        auto& steps = cur.steps;
        std::vector<bool> removed(steps.size(), false);
        for (auto b : bad) {
            if (removed[b]) continue;
            std::size_t j = b + 1;
            while (j < steps.size() && (removed[j] || bad.count(j) || steps[j].action.name != steps[b].action.name)) ++j;
            if (j == steps.size()) {
                removed[b] = true;
                cur.flags.push_back("pj_dropped:" + std::to_string(origin[b]));
                continue;
            }
            // Same-name bad steps between b and j collapse into b.
            for (auto other : bad)
                if (other > b && other < j && steps[other].action.name == steps[b].action.name) removed[other] = true;
            steps[b].action = steps[j].action;
            steps[b].observations = steps[j].observations;
            removed[j] = true;
        }
        std::vector<Step> kept;
        std::vector<std::size_t> kept_origin;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (removed[i]) continue;
            kept.push_back(std::move(steps[i]));
            kept_origin.push_back(origin[i]);
        }
        steps = std::move(kept);
        origin = std::move(kept_origin);
    }
    cur.token_count = approx_tokens(render_steps(cur.steps));
    return cur;
}

TrainSample make_sample(const Trajectory& t, const std::set<std::size_t>& masked, SampleOrigin origin) {
    TrainSample s;
    s.origin = origin;
    s.source_trajectory_id = t.id;
    s.text = render_steps(t.steps);
    const std::size_t sep = std::string_view("\n\n=== response ===\n\n").size();
    const std::size_t thought_header = std::string_view("### Thought\n").size();
    std::size_t at = 0;
    for (std::size_t k = 0; k < t.steps.size(); ++k) {
        const auto& step = t.steps[k];
        Step bare = step;
        bare.observations.clear();
        auto full = render_step(step).size();
        auto without = render_step(bare).size();
        auto thought_len = (k ? sep : 0) + thought_header + step.thought.size() + 1;
        auto action_len = without - (thought_header + step.thought.size() + 1);
        bool train = !masked.count(k);
        s.mask.push_back({at, at + thought_len, train, SpanKind::thought});
        at += thought_len;
        s.mask.push_back({at, at + action_len, train, SpanKind::action});
        at += action_len;
        if (full > without) {
            s.mask.push_back({at, at + (full - without), false, SpanKind::observation});
            at += full - without;
        }
    }
    return s;
}

TrainSample to_ipj(const Trajectory& t, const Tactic& tactic) {
    return make_sample(t, detect_bad_steps(t, tactic), SampleOrigin::ipj);
}

std::vector<std::string> check_sample(const TrainSample& s) {
    std::vector<std::string> v;
    std::size_t at = 0;
    for (const auto& m : s.mask) {
        if (m.start != at) v.push_back("span at " + std::to_string(m.start) + " does not continue from " + std::to_string(at));
        if (m.end <= m.start) v.push_back("empty span at " + std::to_string(m.start));
        if (m.kind == SpanKind::observation && m.trainable) v.push_back("trainable observation span at " + std::to_string(m.start));
        at = m.end;
    }
    if (at != s.text.size()) v.push_back("spans end at " + std::to_string(at) + ", text has " + std::to_string(s.text.size()) + " bytes");
    return v;
}

std::string_view to_string(SampleOrigin o) { return o == SampleOrigin::pj ? "PJ" : "IPJ"; }

std::string sample_to_json(const TrainSample& s) {
    json j;
    j["text"] = s.text;
    json mask = json::array();
    for (const auto& m : s.mask) mask.push_back(json::array({m.start, m.end, m.trainable}));
    j["mask"] = std::move(mask);
    j["origin"] = to_string(s.origin);
    j["source_trajectory_id"] = s.source_trajectory_id;
    return j.dump();
}

void write_samples(const std::string& path, const std::vector<TrainSample>& samples) {
    std::string out;
    for (const auto& s : samples) out += sample_to_json(s) + "\n";
    write_file(path, out);
}

}  // namespace tactix
