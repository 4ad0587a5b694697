// SPDX-License-Identifier: Apache-2.0
#include "tactix/metrics/score.hpp"

#include <json.hpp>

#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/answer.hpp"
#include "tactix/metrics/bleu.hpp"
#include "tactix/observe/observer.hpp"

namespace tactix {

using json = nlohmann::ordered_json;

std::string_view to_string(ErrorType e) {
    switch (e) {
        case ErrorType::correct: return "correct";
        case ErrorType::wrong_ans: return "wrong_ans";
        case ErrorType::runtime_err: return "runtime_err";
        case ErrorType::wrong_format: return "wrong_format";
    }
    return "runtime_err";
}

std::optional<ErrorType> parse_error_type(std::string_view s) {
    for (auto e : {ErrorType::correct, ErrorType::wrong_ans, ErrorType::runtime_err, ErrorType::wrong_format})
        if (to_string(e) == s) return e;
    return std::nullopt;
}

std::vector<std::string> validate_record(const ScoreRecord& r) {
    std::vector<std::string> v;
    if (r.correct && !r.answered) v.emplace_back("correct but not answered");
    if ((r.error_type == ErrorType::runtime_err) != !r.answered) v.emplace_back("runtime_err must coincide with no answer");
    if (r.correct && !r.correct_fuzzy) v.emplace_back("correct but not fuzzy-correct");
    if ((r.error_type == ErrorType::correct) != r.correct) v.emplace_back("error_type correct must coincide with correct");
    if (r.program_ran && !r.has_program) v.emplace_back("program ran without a program");
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (r.codebleu && !unit(*r.codebleu)) v.emplace_back("codebleu outside [0,1]");
    for (const auto& o : r.options) {
        if (!unit(o.subp_bleu)) v.emplace_back("subproblem bleu outside [0,1]");
        if (o.option_codebleu && !unit(*o.option_codebleu)) v.emplace_back("option codebleu outside [0,1]");
    }
    return v;
}

ProgramTrace last_program(const Trajectory& t, const Tactic& tactic) {
    ProgramTrace out;
    const auto runner = tactic.observer_name();
    for (const auto& s : t.steps) {
        const auto* spec = tactic.find_action(s.action.name);
        if (!spec || !spec->produces_program) continue;
        auto fence = extract_code_fence(s.action.output);
        if (!fence) continue;
        out.has_program = true;
        out.program = assemble_program(tactic, fence->body);
        out.ran = false;
        for (const auto& o : s.observations)
            if (o.observer == runner && o.status == ObsStatus::ok) out.ran = true;
    }
    return out;
}

namespace {

void score_answer(ScoreRecord& r, const Trajectory& t, const Problem& p) {
    r.problem_id = p.id;
    r.trajectory_id = t.id;
    r.fuzzy_eligible = p.fuzzy_eligible;
    r.answered = t.status == TrajStatus::answered && t.final_answer.has_value();
    if (!r.answered) {
        r.error_type = ErrorType::runtime_err;
        return;
    }
    r.answer = t.final_answer;
    r.correct = answers_equal(p.answer_kind, p.gold, *r.answer, false);
    r.correct_fuzzy = r.correct || (p.fuzzy_eligible && answers_equal(p.answer_kind, p.gold, *r.answer, true));
    if (r.correct) r.error_type = ErrorType::correct;
    else if (!answer_format_valid(p.answer_kind, *r.answer)) r.error_type = ErrorType::wrong_format;
    else r.error_type = ErrorType::wrong_ans;
}

void set_group(ScoreRecord& r, const Problem& p) {
    if (p.hybrid && p.hybrid->option_sources.size() > 1) {
        r.dataset = "hybrid";
        r.difficulty = std::string(to_string(p.hybrid->difficulty));
    } else if (p.hybrid && p.hybrid->option_sources.size() == 1) {
        r.dataset = std::string(to_string(p.hybrid->option_sources[0].dataset));
    } else {
        r.dataset = std::string(to_string(p.source));
    }
}

std::vector<OptionSource> options_of(const Problem& p) {
    if (p.hybrid) return p.hybrid->option_sources;
    OptionSource o;
    o.problem_id = p.id;
    o.dataset = p.source;
    o.gold_tactic = p.gold_tactic.value_or("");
    o.is_correct = true;
    o.text = problem_text(p);
    o.gold_answer = answer_text(p.gold);
    o.gold_program = p.gold_program;
    return {o};
}

const Tactic* find(const std::vector<Tactic>& pool, std::string_view name) {
    for (const auto& t : pool)
        if (t.name == name) return &t;
    return nullptr;
}

}  // namespace

ScoreRecord score_trajectory(const Trajectory& t, const Tactic& tactic, const Problem& p, const CodeBleuConfig& cfg) {
    ScoreRecord r;
    score_answer(r, t, p);
    set_group(r, p);
    auto trace = last_program(t, tactic);
    r.has_program = trace.has_program;
    r.program_ran = trace.ran;
    if (trace.program && p.gold_program) r.codebleu = codebleu(*trace.program, *p.gold_program, cfg);
    return r;
}

ScoreRecord score_routing(const Trajectory& routing, const std::vector<Trajectory>& children,
                          const std::vector<Tactic>& pool, const Problem& p, const CodeBleuConfig& cfg) {
    ScoreRecord r;
    score_answer(r, routing, p);
    set_group(r, p);
    r.routing = true;

    bool all_ran = true;
    for (const auto& c : children) {
        const auto* tactic = find(pool, c.tactic);
        if (!tactic) continue;
        auto trace = last_program(c, *tactic);
        if (!trace.has_program) continue;
        r.has_program = true;
        all_ran = all_ran && trace.ran;
    }
    r.program_ran = r.has_program && all_ran;

    auto sources = options_of(p);
    double sum = 0.0;
    int with_codebleu = 0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& src = sources[i];
        OptionScore o;
        o.option = static_cast<int>(i + 1);
        o.expected_tactic = src.gold_tactic;
        const Trajectory* child = nullptr;
        for (const auto& c : children)
            if (c.option == o.option) child = &c;
        if (child) {
            o.tactic = child->tactic;
            o.tactic_correct = child->tactic == src.gold_tactic;
            if (child->subproblem) o.subp_bleu = bleu(*child->subproblem, src.text);
            if (const auto* tactic = find(pool, child->tactic)) {
                auto trace = last_program(*child, *tactic);
                if (trace.program && src.gold_program) o.option_codebleu = codebleu(*trace.program, *src.gold_program, cfg);
            }
        }
        if (o.option_codebleu) {
            sum += *o.option_codebleu;
            ++with_codebleu;
        }
        r.options.push_back(std::move(o));
    }
    if (with_codebleu) r.codebleu = sum / with_codebleu;
    return r;
}

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_double(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

std::string record_to_json(const ScoreRecord& r) {
    json j;
    j["problem_id"] = r.problem_id;
    j["trajectory_id"] = r.trajectory_id;
    j["dataset"] = r.dataset;
    j["difficulty"] = r.difficulty;
    j["routing"] = r.routing;
    j["fuzzy_eligible"] = r.fuzzy_eligible;
    j["answer"] = r.answer ? json(*r.answer) : json(nullptr);
    j["answered"] = r.answered;
    j["correct"] = r.correct;
    j["correct_fuzzy"] = r.correct_fuzzy;
    j["has_program"] = r.has_program;
    j["program_ran"] = r.program_ran;
    j["codebleu"] = opt(r.codebleu);
    j["error_type"] = to_string(r.error_type);
    json options = json::array();
    for (const auto& o : r.options) {
        json oj;
        oj["option"] = o.option;
        oj["expected_tactic"] = o.expected_tactic;
        oj["tactic"] = o.tactic;
        oj["tactic_correct"] = o.tactic_correct;
        oj["subp_bleu"] = o.subp_bleu;
        oj["option_codebleu"] = opt(o.option_codebleu);
        options.push_back(std::move(oj));
    }
    j["options"] = std::move(options);
    return j.dump();
}

ScoreRecord record_from_json(std::string_view line) {
    auto j = json::parse(line);
    ScoreRecord r;
    r.problem_id = j.at("problem_id").get<std::string>();
    r.trajectory_id = j.at("trajectory_id").get<std::string>();
    r.dataset = j.at("dataset").get<std::string>();
    r.difficulty = j.value("difficulty", "");
    r.routing = j.value("routing", false);
    r.fuzzy_eligible = j.value("fuzzy_eligible", false);
    if (!j.at("answer").is_null()) r.answer = j.at("answer").get<std::string>();
    r.answered = j.at("answered").get<bool>();
    r.correct = j.at("correct").get<bool>();
    r.correct_fuzzy = j.at("correct_fuzzy").get<bool>();
    r.has_program = j.at("has_program").get<bool>();
    r.program_ran = j.at("program_ran").get<bool>();
    r.codebleu = opt_double(j.at("codebleu"));
    auto et = parse_error_type(j.at("error_type").get<std::string>());
    if (!et) throw CodecError("unknown error_type: " + j.at("error_type").get<std::string>());
    r.error_type = *et;
    for (const auto& oj : j.value("options", json::array())) {
        OptionScore o;
        o.option = oj.at("option").get<int>();
        o.expected_tactic = oj.at("expected_tactic").get<std::string>();
        o.tactic = oj.at("tactic").get<std::string>();
        o.tactic_correct = oj.at("tactic_correct").get<bool>();
        o.subp_bleu = oj.at("subp_bleu").get<double>();
        o.option_codebleu = opt_double(oj.at("option_codebleu"));
        r.options.push_back(std::move(o));
    }
    return r;
}

std::vector<ScoreRecord> read_records(const std::string& path) {
    std::vector<ScoreRecord> out;
    for_each_jsonl_line(path, [&](std::string_view l) { out.push_back(record_from_json(l)); });
    return out;
}

void write_records(const std::string& path, const std::vector<ScoreRecord>& rs) {
    std::string out;
    for (const auto& r : rs) out += record_to_json(r) + "\n";
    write_file(path, out);
}

}  // namespace tactix
