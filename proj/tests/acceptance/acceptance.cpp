// SPDX-License-Identifier: Apache-2.0
// One PASS/FAIL line per acceptance criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "support/gen.hpp"
#include "support/records.hpp"
#include "support/scenario.hpp"
#include "tactix/cli/app.hpp"
#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/answer.hpp"
#include "tactix/core/text.hpp"
#include "tactix/databuild/blend.hpp"
#include "tactix/databuild/transforms.hpp"
#include "tactix/engine/engine.hpp"
#include "tactix/metrics/agreement.hpp"
#include "tactix/metrics/bleu.hpp"
#include "tactix/metrics/codebleu.hpp"
#include "tactix/metrics/report.hpp"
#include "tactix/metrics/score.hpp"

using namespace tactix;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(TACTIX_SOURCE_DIR);
const fs::path kFixtures = kRoot / "tests" / "fixtures";

const std::vector<Tactic>& pool() {
    static const auto tactics = load_tactic_dir((kRoot / "tactics").string());
    return tactics;
}

/// Collects failed expectations of one criterion.
struct Check {
    std::vector<std::string> failures;
    std::string detail;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
        else if (!ok) failures.back() = "... and more";
    }
};

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

std::vector<std::vector<std::string>> read_tsv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    auto content = read_file(p.string());
    for (auto line : text::split_lines(content)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        for (auto c : text::split(line, '\t')) cells.emplace_back(c);
        rows.push_back(std::move(cells));
    }
    return rows;
}

// ---- criteria ----

void metric_strictness(Check& c) {
    gen::Rng rng(4242);
    std::size_t records = 0;
    for (int i = 0; i < 200; ++i) {
        auto corpus = gen::corpus(rng);
        records += corpus.size();
        for (bool fuzzy : {false, true}) {
            AggregateConfig cfg;
            cfg.fuzzy = fuzzy;
            for (const auto& row : aggregate(corpus, cfg).rows) {
                c.expect(*row.acc >= *row.acc_w_prog && *row.acc_w_prog >= *row.acc_w_prog_plus,
                         "Acc >= Acc w/ Prog >= Acc w/ Prog+ violated in corpus " + std::to_string(i));
                if (row.acc_opt_done) c.expect(*row.acc_opt_done <= *row.acc, "Acc Opt done > Acc in corpus " + std::to_string(i));
            }
        }
    }
    c.expect(40.83 >= 12.09 && 12.09 >= 11.56, "reference row ordering");
    c.detail = "200 corpora, " + std::to_string(records) + " records, 0 violations required";
}

void codebleu_criterion(Check& c) {
    int n = 0;
    for (const auto& e : fs::directory_iterator(kFixtures / "programs")) {
        if (e.path().extension() != ".py") continue;
        auto src = read_file(e.path().string());
        c.expect(near(codebleu(src, src), 1.0, 1e-9), "identity fails on " + e.path().filename().string());
        ++n;
    }
    c.expect(n == 50, "expected 50 fixture programs, found " + std::to_string(n));
    const std::pair<const char*, const char*> disjoint[] = {
        {"alpha = beta + gamma\n", "print(42)\n"},
        {"q = 7\nwhile q:\n    q -= 1\n", "import os\nfor name in os.listdir('.'):\n    print(name)\n"},
        {"class Box:\n    pass\n", "total = sum([3, 4])\nprint(total)\n"},
    };
    for (const auto& [a, b] : disjoint) c.expect(codebleu(a, b) < 0.15, std::string("disjoint pair scores >= 0.15: ") + a);
    auto rows = read_tsv(kFixtures / "codebleu" / "golden.tsv");
    c.expect(rows.size() == 10, "golden suite must hold 10 pairs");
    double worst = 0;
    for (const auto& r : rows) {
        auto cand = read_file((kFixtures / "codebleu" / (r[0] + "_cand.py")).string());
        auto ref = read_file((kFixtures / "codebleu" / (r[0] + "_ref.py")).string());
        double d = std::fabs(codebleu(cand, ref) - std::stod(r[1]));
        worst = std::max(worst, d);
        c.expect(d <= 0.02, "golden pair " + r[0] + " off by " + std::to_string(d));
    }
    CodeBleuConfig def;
    c.expect(def.w_ngram == 0.15 && def.w_weighted_ngram == 0.15 && def.w_syntax == 0.35 && def.w_dataflow == 0.35,
             "default weights");
    c.detail = std::to_string(n) + " identities, worst golden deviation " + std::to_string(worst);
}

void engine_fuzz(Check& c) {
    const auto& math = scenario::by_name(pool(), "math");
    Problem p;
    p.id = "gsm-rain";
    p.question = "It rained 2 inches on Monday and 3 more on Tuesday. How much on Tuesday?";
    p.gold = Number{5};
    p.fuzzy_eligible = true;
    p.gold_tactic = "math";
    FunctionSandbox sb([](const std::string& src, int) {
        return src.size() % 3 == 0 ? ExecutionResult{ExitStatus::nonzero, "", "boom", 1} : ExecutionResult{ExitStatus::ok, "1\n", "", 1};
    });
    auto resp = [](const std::string& name, const std::string& out) {
        return "### Thought\nt\n### Action\n## Name\n" + name + "\n## Input\nx\n## Output\n" + out + "\n";
    };
    const std::vector<std::string> valid{resp("Plan", "p"), resp("Write program", "```python\ndef main():\n    print(5)\n```"),
                                         resp("Revise code", "no fence"), resp("Aggregate and answer", "5"),
                                         resp("Execute shell", "ls")};
    EngineConfig cfg;
    cfg.backoff = std::chrono::milliseconds(0);
    gen::Rng rng(77);
    std::map<TrajStatus, int> by_status;
    for (int i = 0; i < 10000; ++i) {
        double p_valid = gen::uniform(rng, 0, 10) / 20.0;
        CallbackProvider llm("fuzz", [&](const auto&) {
            if (gen::coin(rng, p_valid)) return gen::pick(rng, valid);
            std::string s;
            int n = gen::uniform(rng, 0, 200);
            for (int k = 0; k < n; ++k) s += static_cast<char>(gen::uniform(rng, 0, 255));
            return s;
        });
        Engine e(pool(), llm, sb, nullptr, cfg);
        auto t = e.run_subtrajectory(p, math);
        by_status[t.status]++;
        auto v = check_trajectory(t, math, {});
        c.expect(v.empty(), "trajectory " + std::to_string(i) + ": " + (v.empty() ? "" : v.front()));
        c.expect(t.steps.size() <= 7, "more than 7 steps");
    }
    c.detail = "10000 runs: answered " + std::to_string(by_status[TrajStatus::answered]) + ", max_steps " +
               std::to_string(by_status[TrajStatus::max_steps]) + ", error_limit " + std::to_string(by_status[TrajStatus::error_limit]);
}

void codec_roundtrip(Check& c) {
    gen::Rng rng(2024);
    for (int i = 0; i < 1000; ++i) {
        auto t = gen::trajectory(rng);
        auto doc = render_trajectory(t);
        try {
            auto back = parse_trajectory_text(doc);
            c.expect(back == t, "round trip differs on trajectory " + std::to_string(i));
            c.expect(render_trajectory(back) == doc, "re-render differs on trajectory " + std::to_string(i));
        } catch (const std::exception& e) {
            c.expect(false, std::string("parse failed: ") + e.what());
        }
    }
    auto doc = read_file((kFixtures / "trajectories" / "routing_gfr.txt").string());
    c.expect(render_trajectory(parse_trajectory_text(doc)) == doc, "routing fixture does not re-render byte for byte");
    c.detail = "1000 generated + routing fixture (" + std::to_string(doc.size()) + " bytes)";
}

void pj_ipj(Check& c) {
    const auto& math = scenario::by_name(pool(), "math");
    Step c1{"t_c1", {"Plan", "in", "plan"}, {{"Action parser", ObsStatus::ok, "o_c1"}}};
    Step w2{"t_w2", {"Revise code", "in", "a_w2"}, {{"python interpreter", ObsStatus::error, "o_w2"}}};
    Step c3{"t_c3", {"Revise code", "in", "a_c3"}, {{"python interpreter", ObsStatus::ok, "o_c3"}}};
    Trajectory t;
    t.id = "canon/math";
    t.tactic = "math";
    t.steps = {c1, w2, c3};
    auto pj = to_pj(t, math);
    std::vector<Step> want{c1, Step{"t_w2", c3.action, c3.observations}};
    c.expect(pj.steps == want, "PJ of [c1, w2, c3] is not [c1, (t_w2, a_c3, o_c3)]");
    auto s = to_ipj(t, math);
    std::map<std::size_t, std::pair<bool, bool>> per_step;  // thought, action trainable
    std::size_t step = 0;
    for (const auto& m : s.mask) {
        if (m.kind == SpanKind::thought) per_step[step].first = m.trainable;
        if (m.kind == SpanKind::action) per_step[step++].second = m.trainable;
    }
    c.expect(per_step[0] == std::make_pair(true, true), "c1 thought/action must be trainable");
    c.expect(per_step[1] == std::make_pair(false, false), "w2 thought/action must be masked");
    c.expect(per_step[2] == std::make_pair(true, true), "c3 thought/action must be trainable");
    c.expect(check_sample(s).empty(), "canonical IPJ spans do not account for the text");

    gen::Rng rng(31);
    auto names = math.action_names();
    for (int i = 0; i < 500; ++i) {
        auto g = gen::action_trajectory(rng, names);
        auto sample = to_ipj(g, math);
        auto v = check_sample(sample);
        c.expect(v.empty(), "mask accounting: " + (v.empty() ? "" : v.front()));
        c.expect(sample.text == render_steps(g.steps), "IPJ text is not the rendered trajectory");
        auto again = to_pj(g, math);
        c.expect(detect_bad_steps(again, math).empty(), "PJ output still has bad steps");
        c.expect(check_sample(make_sample(again, {}, SampleOrigin::pj)).empty(), "PJ sample accounting");
    }
    c.detail = "canonical case + 500 generated trajectories";
}

void blend_roundtrip(Check& c) {
    auto sources = read_problems((kFixtures / "problems" / "sources.jsonl").string());
    SourcePools pools;
    std::map<std::string, Problem> by_id;
    for (const auto& p : sources) {
        pools[p.source].push_back(p);
        by_id[p.id] = p;
    }
    const auto& routing = scenario::by_name(pool(), "routing");
    int made = 0;
    for (auto d : {Difficulty::GG, Difficulty::GF, Difficulty::GFX, Difficulty::GFR, Difficulty::GFRX})
        for (auto g : {Granularity::easy, Granularity::hard})
            for (std::uint64_t seed = 0; seed < 10; ++seed, ++made) {
                auto letters = std::string(to_string(d));
                auto src = sample_difficulty(d, pools, 977 * seed + static_cast<std::uint64_t>(made));
                c.expect(src.size() == letters.size(), "source count differs from the difficulty letters");
                std::set<std::string> ids;
                for (std::size_t k = 0; k < src.size(); ++k) {
                    ids.insert(src[k].id);
                    if (letters[k] == 'X') {
                        bool earlier = false;
                        for (std::size_t j = 0; j < k; ++j) earlier |= src[j].source == src[k].source;
                        c.expect(earlier, "X drawn from a dataset not named before it");
                    } else {
                        c.expect(src[k].source == *source_for_letter(letters[k]), "letter constraint violated");
                    }
                }
                c.expect(ids.size() == src.size(), "a source problem was drawn twice");
                auto r = blend(src, plan_blend("h" + std::to_string(made), d, g, src.size(), seed), rule_blend);
                const auto& h = r.problem;
                c.expect(validate_problem(h).empty(), "hybrid fails validation");
                int correct = 0;
                for (std::size_t i = 0; i < h.hybrid->option_sources.size(); ++i) {
                    const auto& o = h.hybrid->option_sources[i];
                    correct += o.is_correct;
                    const auto& origin = by_id.at(o.problem_id);
                    c.expect(answers_equal(origin.answer_kind, origin.gold, answer_text(r.claims[i]), false) == o.is_correct,
                             "statement truth disagrees with the correct flag");
                }
                c.expect(correct == 1, "hybrid without exactly one correct option");
                auto t = make_routing_trajectory(h, routing);
                for (std::size_t i = 0; i + 1 < t.steps.size(); ++i) {
                    auto payload = parse_call_payload(t.steps[i].action.output);
                    c.expect(payload.has_value(), "routing step without a payload");
                    if (payload) c.expect(bleu(payload->subproblem, h.hybrid->option_sources[i].text) == 1.0, "subproblem BLEU below 1");
                }
            }
    c.detail = std::to_string(made) + " hybrids over 5 difficulties x 2 granularities";
}

void fuzzy_fixtures(Check& c) {
    const auto& math = scenario::by_name(pool(), "math");
    auto score = [&](const std::string& answer, double gold) {
        Problem p;
        p.id = "fx";
        p.question = "How much?";
        p.gold = Number{gold};
        p.fuzzy_eligible = true;
        p.gold_tactic = "math";
        Trajectory t;
        t.id = "fx/math";
        t.problem_id = "fx";
        t.tactic = "math";
        t.steps = {{"done", {"Aggregate and answer", "all", answer}, {}}};
        t.status = TrajStatus::answered;
        t.final_answer = answer;
        return score_trajectory(t, math, p);
    };
    auto inches = score("The rainfall on Tuesday is 5 inches.", 5);
    c.expect(!inches.correct, "'... is 5 inches.' must fail exact match");
    c.expect(inches.correct_fuzzy, "'... is 5 inches.' must pass fuzzy match");
    c.expect(inches.error_type == ErrorType::wrong_format, "'... is 5 inches.' must be wrong_format");
    c.expect(!score("**40**", 140).correct_fuzzy, "'**40**' against 140 must fail fuzzy match");
    c.expect(score("$62.00", 62).correct_fuzzy, "'$62.00' against 62 must pass fuzzy match");
    c.detail = "3 model outputs";
}

void krippendorff(Check& c) {
    using Row = std::vector<std::optional<std::string>>;
    AnnotationMatrix same;
    for (int u = 0; u < 10; ++u) same.push_back(Row(3, std::string(u % 2 ? "Y" : "N")));
    c.expect(near(krippendorff_alpha(same), 1.0, 1e-12), "perfect agreement is not 1");
    const std::string a = "0100000010", b = "1110010000";
    AnnotationMatrix two;
    for (std::size_t i = 0; i < a.size(); ++i) two.push_back({std::string(1, a[i]), std::string(1, b[i])});
    double hand = krippendorff_alpha(two);
    c.expect(near(hand, 2.0 / 21.0, 1e-9), "hand example differs from 2/21");
    AnnotationMatrix m;
    for (const auto& r : read_tsv(kFixtures / "judge_verdicts.tsv")) {
        Row row;
        for (const auto& cell : r) row.push_back(cell == "." ? std::nullopt : std::optional<std::string>(cell));
        m.push_back(std::move(row));
    }
    double alpha = krippendorff_alpha(m);
    c.expect(near(alpha, 0.69, 0.005), "verdict fixture alpha " + std::to_string(alpha));
    std::ostringstream os;
    os.precision(6);
    os << "hand " << hand << ", fixture " << alpha << " over " << m.size() << " units";
    c.detail = os.str();
}

void end_to_end(Check& c) {
    auto dir = kFixtures / "route20";
    auto out = fs::temp_directory_path() / ("tactix_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(out);
    RunConfig cfg;
    cfg.mode = Mode::route;
    cfg.problems = (dir / "problems.jsonl").string();
    cfg.tactics_dir = (kRoot / "tactics").string();
    cfg.icl_bank = (dir / "icl_bank.jsonl").string();
    cfg.replay = (dir / "replay.jsonl").string();
    cfg.sandbox_table = (dir / "sandbox.jsonl").string();
    cfg.parallelism = 4;
    cfg.out = out.string();
    std::ostringstream so, se;
    int code = run(cfg, so, se);
    c.expect(code == 0, "route exited " + std::to_string(code) + ": " + se.str());
    for (const auto& e : fs::directory_iterator(dir / "golden")) {
        auto got = out / e.path().filename();
        c.expect(fs::exists(got) && read_file(got.string()) == read_file(e.path().string()),
                 e.path().filename().string() + " differs from the golden output");
    }
    auto problems = read_problems(cfg.problems);
    c.expect(problems.size() == 20, "fixture must hold 20 problems");
    bool found = false;
    for (const auto& r : read_records((out / "records.jsonl").string())) {
        if (r.problem_id != "hyb-route-000") continue;
        found = true;
        c.expect(r.answer == std::optional<std::string>("2"), "answer is not 2");
        c.expect(r.correct, "answer not scored correct");
        double tac = 0, subp = 0;
        for (const auto& o : r.options) {
            tac += o.tactic_correct;
            subp += o.subp_bleu;
        }
        c.expect(r.options.size() == 4, "expected 4 options");
        c.expect(!r.options.empty() && near(100.0 * tac / r.options.size(), 100.0, 1e-9), "Tac Recog below 100%");
        c.expect(!r.options.empty() && near(subp / r.options.size(), 1.0, 1e-9), "SubP Recog below 1.0");
    }
    c.expect(found, "no record for hyb-route-000");
    std::string row;
    for (auto line : text::split_lines(read_file((out / "answers.tsv").string())))
        if (line.rfind("hyb-route-000\t", 0) == 0) row = std::string(line);
    c.expect(row == "hyb-route-000\thybrid\tGFRX\tanswered\t2\tyes\t100.00\t1.0000", "answers row: " + row);
    fs::remove_all(out);
    c.detail = "20 problems, row: " + text::replace_all(row, "\t", " | ");
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<void(Check&)> fn;
};

}  // namespace

int main() {
    const Criterion criteria[] = {
        {"metric-strictness", 5, metric_strictness},
        {"codebleu", 30, codebleu_criterion},
        {"engine-termination-fuzz", 120, engine_fuzz},
        {"codec-round-trip", 10, codec_roundtrip},
        {"pj-ipj", 30, pj_ipj},
        {"blend-round-trip", 30, blend_roundtrip},
        {"fuzzy-match-fixtures", 5, fuzzy_fixtures},
        {"krippendorff-alpha", 5, krippendorff},
        {"end-to-end-route", 30, end_to_end},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        auto t0 = std::chrono::steady_clock::now();
        try {
            cr.fn(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("threw: ") + e.what());
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        c.expect(secs < cr.budget_s, "runtime over the " + std::to_string(static_cast<int>(cr.budget_s)) + "s budget");
        bool ok = c.failures.empty();
        failed += !ok;
        std::ostringstream time;
        time.setf(std::ios::fixed);
        time.precision(2);
        time << secs << "s";
        std::cout << (ok ? "PASS " : "FAIL ") << cr.name << " [" << time.str() << "] " << c.detail;
        for (const auto& f : c.failures) std::cout << " | " << f;
        std::cout << "\n";
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed\n" : "all criteria passed\n");
    return failed ? 1 : 0;
}
