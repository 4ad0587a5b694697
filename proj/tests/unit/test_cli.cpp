// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <unistd.h>

#include "tactix/cli/app.hpp"
#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/text.hpp"
#include "tactix/databuild/transforms.hpp"
#include "tactix/llm/replay.hpp"
#include "tactix/metrics/score.hpp"

using namespace tactix;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(TACTIX_SOURCE_DIR);
const fs::path kFixtures = kRoot / "tests" / "fixtures";

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("tactix_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

RunConfig fixture_config(Mode mode, const std::string& dir, const fs::path& out) {
    RunConfig cfg;
    cfg.mode = mode;
    auto at = [&](const char* name) { return (kFixtures / dir / name).string(); };
    cfg.problems = at("problems.jsonl");
    cfg.tactics_dir = (kRoot / "tactics").string();
    cfg.icl_bank = at("icl_bank.jsonl");
    cfg.replay = at("replay.jsonl");
    cfg.sandbox_table = at("sandbox.jsonl");
    cfg.out = out.string();
    return cfg;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome exec(const RunConfig& cfg) {
    std::ostringstream out, err;
    int code = run(cfg, out, err);
    return {code, out.str(), err.str()};
}

void same_tree(const fs::path& got, const fs::path& want) {
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(want)) {
        ++n;
        auto name = e.path().filename();
        INFO(name.string());
        REQUIRE(fs::exists(got / name));
        CHECK(read_file((got / name).string()) == read_file(e.path().string()));
    }
    CHECK(n > 0);
}

ScoreRecord rec(bool correct, bool program, std::optional<double> cb) {
    ScoreRecord r;
    r.problem_id = "p";
    r.dataset = "gsm8k";
    r.answered = true;
    r.answer = "1";
    r.correct = r.correct_fuzzy = correct;
    r.error_type = correct ? ErrorType::correct : ErrorType::wrong_ans;
    r.has_program = r.program_ran = program;
    r.codebleu = cb;
    return r;
}

}  // namespace

TEST_CASE("mode names") {
    for (auto m : {Mode::solve, Mode::route, Mode::blend, Mode::filter, Mode::prep_train, Mode::report})
        CHECK(parse_mode(to_string(m)) == m);
    CHECK(to_string(Mode::prep_train) == "prep-train");
    CHECK_FALSE(parse_mode("train"));
}

TEST_CASE("config validation fails before any work") {
    auto out = scratch("validate");
    auto base = fixture_config(Mode::route, "route20", out);
    CHECK_NOTHROW(validate_config(base));

    auto c = base;
    c.out.clear();
    CHECK(exec(c).code == 1);
    c = base;
    c.sandbox_cmd = "python3 runner.py";
    CHECK(exec(c).code == 1);
    c = base;
    c.sandbox_table.clear();
    CHECK(exec(c).code == 1);
    c = base;
    c.limits.max_steps = 0;
    CHECK(exec(c).code == 1);
    c = base;
    c.codebleu.threshold = 1.5;
    CHECK(exec(c).code == 1);
    c = base;
    c.provider = "rule";
    CHECK(exec(c).code == 1);
    c = base;
    c.problems = (out / "missing.jsonl").string();
    auto r = exec(c);
    CHECK(r.code == 1);
    CHECK(r.err.find("--problems") != std::string::npos);
    c = base;
    c.tactics_dir = (out / "none").string();
    CHECK(exec(c).code == 1);
    CHECK(fs::is_empty(out));
}

TEST_CASE("solve reproduces the golden run") {
    auto out = scratch("solve");
    auto r = exec(fixture_config(Mode::solve, "solve3", out));
    CHECK(r.code == 0);
    CHECK(r.err.empty());
    same_tree(out, kFixtures / "solve3" / "golden");
    CHECK(read_trajectories((out / "trajectories.jsonl").string()).size() == 3);
    CHECK(r.out == read_file((out / "report.txt").string()));
}

TEST_CASE("solve edge cases") {
    auto out = scratch("solve-empty");
    write_file((out / "empty.jsonl").string(), "");
    auto cfg = fixture_config(Mode::solve, "solve3", out / "run");
    cfg.problems = (out / "empty.jsonl").string();
    auto r = exec(cfg);
    CHECK(r.code == 0);
    CHECK(read_file((out / "run" / "trajectories.jsonl").string()).empty());
    CHECK(r.out == "No records to report.\n");

    auto ps = read_problems((kFixtures / "solve3" / "problems.jsonl").string());
    ps[1].gold_tactic = "algebra";
    write_problems((out / "bad.jsonl").string(), ps);
    cfg.problems = (out / "bad.jsonl").string();
    cfg.out = (out / "bad-run").string();
    r = exec(cfg);
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown tactic algebra") != std::string::npos);
    CHECK_FALSE(fs::exists(out / "bad-run"));
}

TEST_CASE("route reproduces the golden run at any parallelism") {
    for (int par : {1, 4}) {
        auto out = scratch("route" + std::to_string(par));
        auto cfg = fixture_config(Mode::route, "route20", out);
        cfg.parallelism = par;
        auto r = exec(cfg);
        CHECK(r.code == 0);
        CHECK(r.err.empty());
        same_tree(out, kFixtures / "route20" / "golden");
    }
    auto records = read_records((kFixtures / "route20" / "golden" / "records.jsonl").string());
    REQUIRE(records.size() == 20);
    for (const auto& rec : records) {
        CHECK(rec.routing);
        CHECK(validate_record(rec).empty());
    }
    auto rain = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.problem_id == "gsm-rain"; });
    REQUIRE(rain != records.end());
    CHECK(rain->options.size() == 1);
    CHECK(rain->dataset == "gsm8k");
    CHECK(rain->correct);
}

TEST_CASE("route fails on replay problems") {
    auto out = scratch("route-bad");
    auto cfg = fixture_config(Mode::route, "route20", out / "a");
    cfg.icl_bank.clear();
    auto r = exec(cfg);
    CHECK(r.code == 2);
    CHECK(r.err.find("prompt fingerprint") != std::string::npos);
    CHECK(r.err.find("--- prompt tail ---") != std::string::npos);

    auto script = read_replay_script(cfg.replay);
    script.push_back({"gsm-rain", std::nullopt, "extra"});
    write_replay_script((out / "extra.jsonl").string(), script);
    cfg = fixture_config(Mode::route, "route20", out / "b");
    cfg.replay = (out / "extra.jsonl").string();
    r = exec(cfg);
    CHECK(r.code == 2);
    CHECK(r.err.find("gsm-rain has 1 unused") != std::string::npos);

    ReplayScript missing;
    for (auto& e : read_replay_script(cfg.replay))
        if (e.key != "ps-tea") missing.push_back(e);
    write_replay_script((out / "missing.jsonl").string(), missing);
    cfg = fixture_config(Mode::route, "route20", out / "c");
    cfg.replay = (out / "missing.jsonl").string();
    r = exec(cfg);
    CHECK(r.code == 1);
    CHECK(r.err.find("ps-tea") != std::string::npos);
}

TEST_CASE("report layouts") {
    auto out = scratch("report");
    write_records((out / "two.jsonl").string(), {rec(true, true, 0.5), rec(true, false, std::nullopt)});
    RunConfig cfg;
    cfg.mode = Mode::report;
    cfg.records = (out / "two.jsonl").string();
    cfg.format = "csv";
    auto r = exec(cfg);
    CHECK(r.code == 0);
    auto lines = text::split_lines(r.out);
    REQUIRE(lines.size() >= 2);
    CHECK(lines[1] == "gsm8k,-,tactic,2,100.00,50.00,50.00,0.5000,n/a,n/a,n/a,2,0,0,0");

    cfg.format = "text";
    r = exec(cfg);
    CHECK(r.out.find("Tac Recog") != std::string::npos);
    CHECK(r.out.find("n/a") != std::string::npos);

    cfg.format = "json";
    cfg.out = (out / "json").string();
    r = exec(cfg);
    CHECK(r.out == read_file((out / "json" / "report.json").string()));

    cfg.records = (kFixtures / "route20" / "golden" / "records.jsonl").string();
    cfg.format = "text";
    cfg.out.clear();
    r = exec(cfg);
    CHECK(r.out == read_file((kFixtures / "route20" / "golden" / "report.txt").string()));
    for (const auto* col : {"Acc", "Acc Opt done", "SubP Recog", "Tac Recog", "Prog Qual"}) CHECK(r.out.find(col) != std::string::npos);

    write_file((out / "empty.jsonl").string(), "");
    cfg.records = (out / "empty.jsonl").string();
    r = exec(cfg);
    CHECK(r.code == 0);
    CHECK(r.out == "No records to report.\n");
    cfg.format = "csv";
    r = exec(cfg);
    CHECK(r.err == "No records to report.\n");

    cfg.format = "xml";
    CHECK(exec(cfg).code == 1);
}

TEST_CASE("blend with the rule blender") {
    auto out = scratch("blend");
    RunConfig cfg;
    cfg.mode = Mode::blend;
    cfg.provider = "rule";
    cfg.problems = (kFixtures / "problems" / "sources.jsonl").string();
    cfg.tactics_dir = (kRoot / "tactics").string();
    cfg.count = 3;
    cfg.seed = 11;
    cfg.out = (out / "a").string();
    auto r = exec(cfg);
    CHECK(r.code == 0);
    CHECK(r.out == "blended 15 hybrids, rejected 0\n");
    auto hybrids = read_problems((out / "a" / "hybrids.jsonl").string());
    auto routes = read_trajectories((out / "a" / "routing.jsonl").string());
    REQUIRE(hybrids.size() == 15);
    REQUIRE(routes.size() == 15);
    for (std::size_t i = 0; i < hybrids.size(); ++i) {
        CHECK(validate_problem(hybrids[i]).empty());
        CHECK(routes[i].final_answer == answer_text(hybrids[i].gold));
    }

    cfg.out = (out / "b").string();
    exec(cfg);
    CHECK(read_file((out / "a" / "hybrids.jsonl").string()) == read_file((out / "b" / "hybrids.jsonl").string()));

    cfg.seed = 12;
    cfg.out = (out / "c").string();
    exec(cfg);
    CHECK(read_file((out / "a" / "hybrids.jsonl").string()) != read_file((out / "c" / "hybrids.jsonl").string()));

    cfg.judges = 1;
    CHECK(exec(cfg).code == 1);
}

TEST_CASE("blend with scripted LLM blender and judges") {
    auto out = scratch("blend-llm");
    ReplayScript script;
    script.push_back({"blend", std::nullopt, "Merged passage one."});
    script.push_back({"blend", std::nullopt, "Merged passage two."});
    script.push_back({"judge-1", std::nullopt, "Y\nfine"});
    script.push_back({"judge-1", std::nullopt, "N\nfacts lost"});
    write_replay_script((out / "replay.jsonl").string(), script);
    RunConfig cfg;
    cfg.mode = Mode::blend;
    cfg.provider = "replay";
    cfg.replay = (out / "replay.jsonl").string();
    cfg.problems = (kFixtures / "problems" / "sources.jsonl").string();
    cfg.tactics_dir = (kRoot / "tactics").string();
    cfg.difficulties = {Difficulty::GF};
    cfg.count = 2;
    cfg.judges = 1;
    cfg.out = (out / "run").string();
    auto r = exec(cfg);
    CHECK(r.code == 0);
    CHECK(r.out == "blended 1 hybrids, rejected 1\n");
    auto hybrids = read_problems((out / "run" / "hybrids.jsonl").string());
    REQUIRE(hybrids.size() == 1);
    CHECK(hybrids[0].context == "Merged passage one.");
    auto rejected = read_file((out / "run" / "rejected.tsv").string());
    CHECK(rejected.rfind("hyb-GF-easy-1\t", 0) == 0);
}

TEST_CASE("filter and prep-train") {
    auto out = scratch("filter");
    auto golden = read_trajectories((kFixtures / "route20" / "golden" / "trajectories.jsonl").string());
    // Make one child's program fail.
    auto input = golden;
    auto child = std::find_if(input.begin(), input.end(), [](const auto& t) { return t.id == "hyb-route-010/routing/1"; });
    REQUIRE(child != input.end());
    child->steps[0].observations.back().status = ObsStatus::error;
    write_trajectories((out / "input.jsonl").string(), input);
    RunConfig cfg;
    cfg.mode = Mode::filter;
    cfg.tactics_dir = (kRoot / "tactics").string();
    cfg.trajectories = (out / "input.jsonl").string();
    cfg.out = (out / "f").string();
    auto r = exec(cfg);
    CHECK(r.code == 0);
    auto kept = read_trajectories((out / "f" / "kept.jsonl").string());
    auto dropped = read_trajectories((out / "f" / "dropped.jsonl").string());
    CHECK(kept.size() + dropped.size() == golden.size());
    REQUIRE(dropped.size() == 1);
    CHECK(dropped[0].id == "hyb-route-010/routing/1");
    CHECK(read_file((out / "f" / "filter_log.tsv").string()).find("hyb-route-010/routing/1\tno_program\n") != std::string::npos);

    cfg.mode = Mode::prep_train;
    cfg.trajectories = (kFixtures / "route20" / "golden" / "trajectories.jsonl").string();
    cfg.out = (out / "p").string();
    r = exec(cfg);
    CHECK(r.code == 0);
    auto ipj = read_file((out / "p" / "ipj.jsonl").string());
    CHECK(std::count(ipj.begin(), ipj.end(), '\n') == static_cast<long>(golden.size()));
    CHECK(ipj.find("\"origin\":\"IPJ\"") != std::string::npos);
    CHECK(read_trajectories((out / "p" / "pj_trajectories.jsonl").string()) == golden);

    // Judges need the exemplar bank and the problems.
    cfg.mode = Mode::filter;
    cfg.trajectories = (out / "input.jsonl").string();
    cfg.judges = 1;
    CHECK(exec(cfg).code == 1);
    cfg.judge_bank = (kFixtures / "judge" / "program_bank.txt").string();
    cfg.problems = (kFixtures / "route20" / "problems.jsonl").string();
    cfg.provider = "replay";
    ReplayScript script;
    // Routing trajectories pass through without a vote.
    auto judged = std::count_if(kept.begin(), kept.end(), [](const auto& t) { return t.tactic != "routing"; });
    for (long i = 0; i < judged; ++i) script.push_back({"judge-1", std::nullopt, i == 0 ? "N\nhardcoded" : "Y"});
    write_replay_script((out / "judges.jsonl").string(), script);
    cfg.replay = (out / "judges.jsonl").string();
    cfg.out = (out / "j").string();
    r = exec(cfg);
    CHECK(r.code == 0);
    auto log = read_file((out / "j" / "filter_log.tsv").string());
    CHECK(std::count(log.begin(), log.end(), '\n') == static_cast<long>(golden.size()));
    CHECK(log.find("\ttrivial\n") != std::string::npos);
}
