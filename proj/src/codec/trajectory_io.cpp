// SPDX-License-Identifier: Apache-2.0
#include "tactix/codec/trajectory_io.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tactix/core/answer.hpp"
#include "tactix/core/text.hpp"

namespace tactix {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kDocHeader = "=== trajectory ===";
constexpr std::string_view kStepSep = "\n\n=== response ===\n\n";
constexpr std::string_view kObsSep = "\n\n=== observations ===\n\n";
constexpr std::string_view kObserverPrefix = "# Observer: ";
constexpr std::string_view kStatusPrefix = "# Feedback status: ";
constexpr std::string_view kContentLine = "# Content:";

std::string_view status_text(ObsStatus s) { return s == ObsStatus::ok ? "feedback ok" : "feedback error"; }

std::string_view take_prefix(std::string_view s, std::string_view prefix, std::string_view what) {
    if (s.substr(0, prefix.size()) != prefix) throw CodecError("expected " + std::string(what));
    return s.substr(prefix.size());
}

Observation parse_observation(std::string_view block) {
    Observation o;
    auto rest = take_prefix(block, kObserverPrefix, "'# Observer: '");
    auto nl = rest.find('\n');
    if (nl == std::string_view::npos) throw CodecError("truncated observation block");
    o.observer = std::string(rest.substr(0, nl));
    rest = take_prefix(rest.substr(nl + 1), kStatusPrefix, "'# Feedback status: '");
    nl = rest.find('\n');
    if (nl == std::string_view::npos) throw CodecError("truncated observation block");
    auto status = rest.substr(0, nl);
    if (status == "feedback ok") o.status = ObsStatus::ok;
    else if (status == "feedback error") o.status = ObsStatus::error;
    else throw CodecError("unknown feedback status: " + std::string(status));
    rest = rest.substr(nl + 1);
    rest = take_prefix(rest, kContentLine, "'# Content:'");
    if (!rest.empty()) rest = take_prefix(rest, "\n", "newline after '# Content:'");
    o.content = std::string(rest);
    return o;
}

Step parse_step(std::string_view chunk) {
    Step s;
    auto rest = take_prefix(chunk, "### Thought\n", "'### Thought'");
    // Prepend the newline consumed by the header so an empty field still matches.
    std::string buf = "\n" + std::string(rest);
    std::string_view v = buf;
    auto cut = [&](std::string_view marker, std::string& field) {
        auto at = v.find(marker);
        if (at == std::string_view::npos) throw CodecError("missing '" + std::string(text::trim(marker)) + "'");
        field = std::string(v.substr(1, at - 1));
        v = v.substr(at + marker.size() - 1);
    };
    cut("\n### Action\n## Name\n", s.thought);
    cut("\n## Input\n", s.action.name);
    cut("\n## Output\n", s.action.input);
    v = v.substr(1);
    auto obs_at = v.find(kObsSep);
    if (obs_at == std::string_view::npos) {
        s.action.output = std::string(v);
        return s;
    }
    s.action.output = std::string(v.substr(0, obs_at));
    auto obs = v.substr(obs_at + kObsSep.size());
    std::string sep = "\n\n" + std::string(kObserverPrefix);
    while (true) {
        auto next = obs.find(sep);
        s.observations.push_back(parse_observation(obs.substr(0, next)));
        if (next == std::string_view::npos) break;
        obs = obs.substr(next + 2);
    }
    return s;
}

bool line_reserved(std::string_view line) {
    static const std::array<std::string_view, 8> exact{"### Thought", "### Action", "## Name", "## Input",
                                                       "## Output", "=== observations ===", "=== response ===",
                                                       "=== trajectory ==="};
    for (auto e : exact)
        if (line == e) return true;
    for (auto p : {kObserverPrefix, kStatusPrefix, kContentLine})
        if (line.substr(0, p.size()) == p) return true;
    return false;
}

bool field_safe(std::string_view s) {
    for (auto line : text::split(s, '\n'))
        if (line_reserved(line)) return false;
    return true;
}

bool single_line(std::string_view s) { return s.find('\n') == std::string_view::npos && s.find('\r') == std::string_view::npos; }

json gold_to_json(const AnswerValue& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Number>) {
                double r = std::round(x.value);
                if (r == x.value && std::fabs(r) < 9e15) return static_cast<std::int64_t>(r);
                return x.value;
            } else if constexpr (std::is_same_v<T, Label>) {
                return x.text;
            } else if constexpr (std::is_same_v<T, Graph>) {
                json arr = json::array();
                for (const auto& e : x.edges) arr.push_back(json::array({e.from, e.to}));
                return arr;
            } else {
                return x.value;
            }
        },
        v);
}

AnswerValue gold_from_json(const json& j, AnswerKind kind) {
    switch (kind) {
        case AnswerKind::numeric:
            if (!j.is_number()) throw CodecError("numeric gold must be a number");
            return Number{j.get<double>()};
        case AnswerKind::nli3:
            if (!j.is_string()) throw CodecError("label gold must be a string");
            return Label{j.get<std::string>()};
        case AnswerKind::graph: {
            if (!j.is_array()) throw CodecError("graph gold must be a list of [from, to] pairs");
            Graph g;
            for (const auto& e : j) {
                if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
                    throw CodecError("graph edge must be [from, to]");
                g.edges.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
            }
            return g;
        }
        case AnswerKind::option_index:
            if (!j.is_number_integer()) throw CodecError("option gold must be an integer");
            return OptionIndex{j.get<int>()};
    }
    throw CodecError("unknown answer kind");
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->template get<T>();
}

std::optional<std::string> opt_string(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

json opt_json(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

template <typename T, typename F>
std::vector<T> read_lines(const std::string& path, F parse) {
    auto data = read_file(path);
    std::vector<T> out;
    std::size_t lineno = 0;
    for (auto line : text::split_lines(data)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            out.push_back(parse(line));
        } catch (const CodecError& e) {
            throw CodecError(e.what(), lineno);
        } catch (const json::exception& e) {
            throw CodecError(e.what(), lineno);
        }
    }
    return out;
}

}  // namespace

std::string render_step(const Step& s) {
    std::string out = "### Thought\n" + s.thought + "\n### Action\n## Name\n" + s.action.name + "\n## Input\n" +
                      s.action.input + "\n## Output\n" + s.action.output;
    if (!s.observations.empty()) {
        out += kObsSep;
        for (std::size_t i = 0; i < s.observations.size(); ++i) {
            const auto& o = s.observations[i];
            if (i) out += "\n\n";
            out += std::string(kObserverPrefix) + o.observer + "\n" + std::string(kStatusPrefix) +
                   std::string(status_text(o.status)) + "\n" + std::string(kContentLine) + "\n" + o.content;
        }
    }
    return out;
}

std::string render_steps(const std::vector<Step>& steps) {
    std::string out;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) out += kStepSep;
        out += render_step(steps[i]);
    }
    return out;
}

std::string render_trajectory(const Trajectory& t) {
    std::string out(kDocHeader);
    out += "\n# Id: " + t.id;
    out += "\n# Problem: " + t.problem_id;
    out += "\n# Tactic: " + t.tactic;
    out += "\n# Status: " + std::string(to_string(t.status));
    out += "\n# Children: " + json(t.children).dump();
    out += "\n# Tokens: " + std::to_string(t.token_count);
    if (t.final_answer) out += "\n# Final answer: " + json(*t.final_answer).dump();
    if (t.option) out += "\n# Option: " + std::to_string(*t.option);
    if (t.subproblem) out += "\n# Subproblem: " + json(*t.subproblem).dump();
    if (!t.flags.empty()) out += "\n# Flags: " + json(t.flags).dump();
    out += "\n";
    if (!t.steps.empty()) out += "\n" + render_steps(t.steps) + "\n";
    return out;
}

std::vector<Step> parse_steps(std::string_view body) {
    std::vector<Step> steps;
    while (true) {
        auto next = body.find(kStepSep);
        steps.push_back(parse_step(body.substr(0, next)));
        if (next == std::string_view::npos) break;
        body = body.substr(next + kStepSep.size());
    }
    return steps;
}

Trajectory parse_trajectory_text(std::string_view doc) {
    Trajectory t;
    auto head_end = doc.find("\n\n");
    auto head = doc.substr(0, head_end == std::string_view::npos ? doc.size() : head_end);
    if (!head.empty() && head.back() == '\n') head.remove_suffix(1);
    auto lines = text::split_lines(head);
    if (lines.empty() || lines[0] != kDocHeader) throw CodecError("missing '=== trajectory ===' header", 1);
    bool seen_status = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        auto line = lines[i];
        auto colon = line.find(": ");
        if (line.substr(0, 2) != "# " || colon == std::string_view::npos)
            throw CodecError("malformed header line", i + 1);
        auto key = line.substr(2, colon - 2);
        auto val = line.substr(colon + 2);
        try {
            if (key == "Id") t.id = val;
            else if (key == "Problem") t.problem_id = val;
            else if (key == "Tactic") t.tactic = val;
            else if (key == "Status") {
                auto s = parse_traj_status(val);
                if (!s) throw CodecError("unknown status");
                t.status = *s;
                seen_status = true;
            } else if (key == "Children") t.children = json::parse(val).get<std::vector<std::string>>();
            else if (key == "Tokens") t.token_count = std::stoll(std::string(val));
            else if (key == "Final answer") t.final_answer = json::parse(val).get<std::string>();
            else if (key == "Option") t.option = std::stoi(std::string(val));
            else if (key == "Subproblem") t.subproblem = json::parse(val).get<std::string>();
            else if (key == "Flags") t.flags = json::parse(val).get<std::vector<std::string>>();
            else throw CodecError("unknown header key '" + std::string(key) + "'");
        } catch (const CodecError& e) {
            throw CodecError(e.what(), i + 1);
        } catch (const std::exception& e) {
            throw CodecError(std::string("bad header value: ") + e.what(), i + 1);
        }
    }
    if (!seen_status) throw CodecError("missing '# Status' header");
    if (head_end == std::string_view::npos) return t;
    auto body = doc.substr(head_end + 2);
    if (body.empty()) return t;
    if (body.back() != '\n') throw CodecError("document must end with a newline");
    body.remove_suffix(1);
    t.steps = parse_steps(body);
    return t;
}

bool text_safe(const Trajectory& t) {
    for (auto* s : {&t.id, &t.problem_id, &t.tactic})
        if (!single_line(*s)) return false;
    for (const auto& step : t.steps) {
        if (!single_line(step.action.name) || line_reserved(step.action.name)) return false;
        for (auto* f : {&step.thought, &step.action.input, &step.action.output})
            if (!field_safe(*f)) return false;
        for (const auto& o : step.observations)
            if (!single_line(o.observer) || !field_safe(o.content)) return false;
    }
    return true;
}

std::string trajectory_to_json(const Trajectory& t) {
    json j;
    j["id"] = t.id;
    j["problem_id"] = t.problem_id;
    j["tactic"] = t.tactic;
    j["status"] = to_string(t.status);
    json steps = json::array();
    for (const auto& s : t.steps) {
        json obs = json::array();
        for (const auto& o : s.observations)
            obs.push_back({{"observer", o.observer}, {"status", to_string(o.status)}, {"content", o.content}});
        steps.push_back({{"thought", s.thought},
                         {"action", {{"name", s.action.name}, {"input", s.action.input}, {"output", s.action.output}}},
                         {"observations", obs}});
    }
    j["steps"] = steps;
    j["final_answer"] = opt_json(t.final_answer);
    j["children"] = t.children;
    j["token_count"] = t.token_count;
    j["option"] = t.option ? json(*t.option) : json(nullptr);
    j["subproblem"] = opt_json(t.subproblem);
    j["flags"] = t.flags;
    return j.dump();
}

Trajectory trajectory_from_json(std::string_view line) {
    auto j = json::parse(line);
    if (!j.is_object()) throw CodecError("trajectory must be a JSON object");
    Trajectory t;
    t.id = get_or<std::string>(j, "id", "");
    t.problem_id = j.at("problem_id").get<std::string>();
    t.tactic = j.at("tactic").get<std::string>();
    auto st = parse_traj_status(j.at("status").get<std::string>());
    if (!st) throw CodecError("unknown trajectory status");
    t.status = *st;
    for (const auto& js : j.at("steps")) {
        Step s;
        s.thought = js.at("thought").get<std::string>();
        const auto& a = js.at("action");
        s.action = {a.at("name").get<std::string>(), a.at("input").get<std::string>(), a.at("output").get<std::string>()};
        for (const auto& jo : js.at("observations")) {
            auto os = parse_obs_status(jo.at("status").get<std::string>());
            if (!os) throw CodecError("unknown observation status");
            s.observations.push_back({jo.at("observer").get<std::string>(), *os, jo.at("content").get<std::string>()});
        }
        t.steps.push_back(std::move(s));
    }
    t.final_answer = opt_string(j, "final_answer");
    t.children = get_or<std::vector<std::string>>(j, "children", {});
    t.token_count = get_or<std::int64_t>(j, "token_count", 0);
    if (auto it = j.find("option"); it != j.end() && !it->is_null()) t.option = it->get<int>();
    t.subproblem = opt_string(j, "subproblem");
    t.flags = get_or<std::vector<std::string>>(j, "flags", {});
    return t;
}

void for_each_jsonl_line(const std::string& path, const std::function<void(std::string_view)>& fn) {
    read_lines<int>(path, [&](std::string_view l) {
        fn(l);
        return 0;
    });
}

std::vector<Trajectory> read_trajectories(const std::string& path) {
    return read_lines<Trajectory>(path, [](std::string_view l) { return trajectory_from_json(l); });
}

void write_trajectories(const std::string& path, const std::vector<Trajectory>& ts) {
    std::string out;
    for (const auto& t : ts) out += trajectory_to_json(t) + "\n";
    write_file(path, out);
}

std::string problem_to_json(const Problem& p) {
    json j;
    j["id"] = p.id;
    j["source"] = to_string(p.source);
    j["context"] = p.context;
    j["question"] = p.question;
    j["statements"] = p.statements;
    j["gold"] = gold_to_json(p.gold);
    j["answer_kind"] = to_string(p.answer_kind);
    j["fuzzy_eligible"] = p.fuzzy_eligible;
    j["gold_program"] = opt_json(p.gold_program);
    j["gold_tactic"] = opt_json(p.gold_tactic);
    if (p.hybrid) {
        json h;
        h["difficulty"] = to_string(p.hybrid->difficulty);
        h["granularity"] = to_string(p.hybrid->granularity);
        json srcs = json::array();
        for (const auto& s : p.hybrid->option_sources)
            srcs.push_back({{"problem_id", s.problem_id},
                            {"dataset", to_string(s.dataset)},
                            {"gold_tactic", s.gold_tactic},
                            {"is_correct", s.is_correct},
                            {"text", s.text},
                            {"gold_answer", s.gold_answer},
                            {"gold_program", opt_json(s.gold_program)}});
        h["option_sources"] = srcs;
        j["hybrid"] = h;
    }
    return j.dump();
}

Problem problem_from_json(std::string_view line) {
    auto j = json::parse(line);
    if (!j.is_object()) throw CodecError("problem must be a JSON object");
    Problem p;
    p.id = j.at("id").get<std::string>();
    auto src = parse_source(j.at("source").get<std::string>());
    if (!src) throw CodecError("unknown source");
    p.source = *src;
    p.context = get_or<std::string>(j, "context", "");
    p.question = get_or<std::string>(j, "question", "");
    p.statements = get_or<std::vector<std::string>>(j, "statements", {});
    auto kind = parse_answer_kind(j.at("answer_kind").get<std::string>());
    if (!kind) throw CodecError("unknown answer_kind");
    p.answer_kind = *kind;
    p.gold = gold_from_json(j.at("gold"), p.answer_kind);
    p.fuzzy_eligible = get_or<bool>(j, "fuzzy_eligible", false);
    p.gold_program = opt_string(j, "gold_program");
    p.gold_tactic = opt_string(j, "gold_tactic");
    if (auto it = j.find("hybrid"); it != j.end() && !it->is_null()) {
        const auto& h = *it;
        HybridInfo info;
        auto d = parse_difficulty(h.at("difficulty").get<std::string>());
        auto g = parse_granularity(h.at("granularity").get<std::string>());
        if (!d || !g) throw CodecError("bad hybrid difficulty or granularity");
        info.difficulty = *d;
        info.granularity = *g;
        for (const auto& s : h.at("option_sources")) {
            OptionSource o;
            o.problem_id = s.at("problem_id").get<std::string>();
            auto ds = parse_source(s.at("dataset").get<std::string>());
            if (!ds) throw CodecError("unknown option dataset");
            o.dataset = *ds;
            o.gold_tactic = s.at("gold_tactic").get<std::string>();
            o.is_correct = s.at("is_correct").get<bool>();
            o.text = get_or<std::string>(s, "text", "");
            o.gold_answer = get_or<std::string>(s, "gold_answer", "");
            o.gold_program = opt_string(s, "gold_program");
            info.option_sources.push_back(std::move(o));
        }
        p.hybrid = std::move(info);
    }
    return p;
}

std::vector<Problem> read_problems(const std::string& path) {
    return read_lines<Problem>(path, [](std::string_view l) { return problem_from_json(l); });
}

void write_problems(const std::string& path, const std::vector<Problem>& ps) {
    std::string out;
    for (const auto& p : ps) out += problem_to_json(p) + "\n";
    write_file(path, out);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodecError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CodecError("cannot write " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw CodecError("write failed: " + path);
}

}  // namespace tactix
