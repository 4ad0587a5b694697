// SPDX-License-Identifier: Apache-2.0
// Builds the replay fixtures: 20 problems for route mode and 3 for solve
// mode, each with scripted LLM replies pinned to prompt fingerprints,
// recorded program results, an exemplar bank and golden run outputs.
#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "support/scenario.hpp"
#include "tactix/cli/app.hpp"
#include "tactix/codec/trajectory_io.hpp"
#include "tactix/databuild/blend.hpp"
#include "tactix/databuild/transforms.hpp"
#include "tactix/engine/engine.hpp"
#include "tactix/observe/observer.hpp"

using namespace tactix;
namespace fs = std::filesystem;

namespace {

struct Scripted {
    Problem problem;
    Trajectory routing;
};

const Problem& by_id(const std::vector<Problem>& ps, const std::string& id) {
    for (const auto& p : ps)
        if (p.id == id) return p;
    throw std::runtime_error("no source problem " + id);
}

/// The routing trajectory of a standalone problem: one call, then the child's answer.
Trajectory direct_routing(const Problem& p, const Tactic& routing) {
    auto t = make_routing_trajectory(wrap_single(p), routing);
    t.steps.back().action.output = answer_text(p.gold);
    t.final_answer = answer_text(p.gold);
    return t;
}

/// Ideal child steps for a source problem, with the observations the engine would record.
std::vector<Step> child_steps(const OptionSource& src, const Tactic& tactic) {
    auto replies = scenario::child_responses(src, tactic);
    std::vector<Step> steps;
    for (const auto& r : replies) steps.push_back(parse_steps(r).at(0));
    steps[0].observations = {{tactic.observer_name(), ObsStatus::ok, "stdout:\n" + src.gold_answer + "\n"}};
    return steps;
}

IclBank make_bank(const std::vector<Problem>& sources, const std::vector<Tactic>& pool, const Problem& routing_example) {
    IclBank bank;
    for (const auto* id : {"gsm-mark", "gsm-becky", "folio-penguin", "folio-violin", "reclor-editorial", "ps-work"}) {
        const auto& p = by_id(sources, id);
        auto w = wrap_single(p);
        const auto& src = w.hybrid->option_sources.at(0);
        const auto& tactic = scenario::by_name(pool, src.gold_tactic);
        auto steps = child_steps(src, tactic);
        bank.add_head(tactic.name, make_head_exemplar(problem_text(p), answer_space(p), steps));
        bank.add_full(tactic.name, make_full_exemplar(problem_text(p), answer_space(p), steps));
    }
    const auto& routing = scenario::by_name(pool, "routing");
    auto t = make_routing_trajectory(routing_example, routing);
    bank.add_full("routing", make_full_exemplar(problem_text(routing_example), answer_space(routing_example), t.steps));
    return bank;
}

int run_golden(RunConfig cfg, const std::string& dir, const std::string& root) {
    auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
    cfg.problems = at("problems.jsonl");
    cfg.tactics_dir = (fs::path(root) / "tactics").string();
    cfg.icl_bank = at("icl_bank.jsonl");
    cfg.replay = at("replay.jsonl");
    cfg.sandbox_table = at("sandbox.jsonl");
    cfg.out = at("golden");
    std::ostringstream out, err;
    int code = run(cfg, out, err);
    std::cerr << err.str();
    return code;
}

EngineConfig pinning_config() {
    RunConfig defaults;
    EngineConfig ecfg;
    ecfg.limits = defaults.limits;
    ecfg.backoff = std::chrono::milliseconds(0);
    return ecfg;
}

void write_inputs(const std::string& dir, const std::vector<Problem>& problems, const ReplayScript& pinned,
                  const std::map<std::string, ExecutionResult>& table, const IclBank& bank) {
    fs::create_directories(dir);
    auto at = [&](const char* name) { return (fs::path(dir) / name).string(); };
    write_problems(at("problems.jsonl"), problems);
    write_replay_script(at("replay.jsonl"), pinned);
    write_sandbox_table(at("sandbox.jsonl"), table);
    write_icl_bank(at("icl_bank.jsonl"), bank);
}

int build_solve(const std::string& root, const std::string& out_dir) {
    auto fixtures = fs::path(root) / "tests" / "fixtures";
    auto pool = load_tactic_dir((fs::path(root) / "tactics").string());
    auto sources = read_problems((fixtures / "problems" / "sources.jsonl").string());
    auto routing_example = wrap_single(by_id(sources, "gsm-bowling"));
    auto bank = make_bank(sources, pool, routing_example);
    std::vector<Problem> problems;
    std::map<std::string, ExecutionResult> table;
    ReplayScript pinned;
    for (const auto* id : {"gsm-rain", "folio-cat", "ps-work"}) {
        const auto& p = by_id(sources, id);
        problems.push_back(p);
        auto w = wrap_single(p);
        scenario::add_sandbox_entries(w, pool, table);
    }
    ReplaySandbox sandbox(table);
    for (const auto& p : problems) {
        const auto& tactic = scenario::by_name(pool, *p.gold_tactic);
        ReplayScript script;
        for (auto& r : scenario::child_responses(wrap_single(p).hybrid->option_sources.at(0), tactic))
            script.push_back({p.id, std::nullopt, r});
        ReplayProvider replay(script);
        RecordingProvider rec(replay, p.id);
        Engine engine(pool, rec, sandbox, &bank, pinning_config());
        engine.run_subtrajectory(p, tactic);
        if (replay.remaining()) throw std::runtime_error(p.id + ": engine stopped before the script ended");
        pinned.insert(pinned.end(), rec.entries().begin(), rec.entries().end());
    }
    write_inputs(out_dir, problems, pinned, table, bank);
    RunConfig cfg;
    cfg.mode = Mode::solve;
    return run_golden(cfg, out_dir, root);
}

int build_route(const std::string& root, const std::string& out_dir) {
    auto fixtures = fs::path(root) / "tests" / "fixtures";
    auto pool = load_tactic_dir((fs::path(root) / "tactics").string());
    const auto& routing = scenario::by_name(pool, "routing");
    auto sources = read_problems((fixtures / "problems" / "sources.jsonl").string());
    SourcePools pools;
    for (const auto& p : sources) pools[p.source].push_back(p);

    std::vector<Scripted> items;
    auto hybrid0 = read_problems((fixtures / "problems" / "routing_hybrid.jsonl").string()).at(0);
    items.push_back({hybrid0, parse_trajectory_text(read_file((fixtures / "trajectories" / "routing_gfr.txt").string()))});

    const Difficulty ds[] = {Difficulty::GG, Difficulty::GF, Difficulty::GFX, Difficulty::GFR, Difficulty::GFRX};
    for (int i = 1; i <= 10; ++i) {
        auto d = ds[(i - 1) % 5];
        auto g = i <= 5 ? Granularity::easy : Granularity::hard;
        char id[32];
        std::snprintf(id, sizeof id, "hyb-route-%03d", i);
        auto src = sample_difficulty(d, pools, 1000 + static_cast<std::uint64_t>(i));
        auto h = blend(src, plan_blend(id, d, g, src.size(), 2000 + static_cast<std::uint64_t>(i)), rule_blend).problem;
        auto t = make_routing_trajectory(h, routing);
        if (i == 10) {
            // The router sends the first option to the math tactic whatever it is.
            auto& s = t.steps.front();
            s.action.name = "Call tactic: math";
            s.thought = "Option 1 is a math problem. I will use math tactic to solve it.";
        }
        items.push_back({h, t});
    }
    for (const auto* id : {"gsm-rain", "gsm-pennies", "gsm-wage", "folio-cat", "folio-rogan", "reclor-retina", "ps-work",
                           "ps-tea", "gsm-apples"}) {
        const auto& p = by_id(sources, id);
        auto t = direct_routing(p, routing);
        if (p.id == "gsm-apples") t.steps.back().action.output = "14";
        items.push_back({p, t});
    }

    auto icl_src = sample_difficulty(Difficulty::GFR, pools, 77);
    auto icl_example = blend(icl_src, plan_blend("hyb-icl", Difficulty::GFR, Granularity::easy, icl_src.size(), 78), rule_blend).problem;
    auto bank = make_bank(sources, pool, icl_example);

    std::vector<Problem> problems;
    std::map<std::string, ExecutionResult> table;
    ReplayScript unpinned;
    for (const auto& it : items) {
        problems.push_back(it.problem);
        auto as_hybrid = it.problem.hybrid ? it.problem : wrap_single(it.problem);
        scenario::add_sandbox_entries(as_hybrid, pool, table);
        for (auto& e : scenario::routing_script(as_hybrid, it.routing, pool)) {
            e.key = it.problem.id;
            unpinned.push_back(std::move(e));
        }
    }

    // Pin every reply to the prompt the engine builds under the default run config.
    ReplaySandbox sandbox(table);
    ReplayScript pinned;
    auto by_key = split_by_key(unpinned);
    for (const auto& p : problems) {
        ReplayProvider replay(by_key.at(p.id));
        RecordingProvider rec(replay, p.id);
        Engine engine(pool, rec, sandbox, &bank, pinning_config());
        engine.run_routing(p, routing);
        if (replay.remaining()) throw std::runtime_error(p.id + ": engine stopped before the script ended");
        pinned.insert(pinned.end(), rec.entries().begin(), rec.entries().end());
    }
    write_inputs(out_dir, problems, pinned, table, bank);
    RunConfig cfg;
    cfg.mode = Mode::route;
    return run_golden(cfg, out_dir, root);
}

}  // namespace

int main(int argc, char** argv) {
    std::string root = TACTIX_SOURCE_DIR;
    std::string out_dir;
    CLI::App app{"replay fixture generator"};
    app.add_option("--root", root, "source tree")->capture_default_str();
    app.add_option("--out", out_dir, "parent directory of the fixture directories")->required();
    CLI11_PARSE(app, argc, argv);
    int code = build_route(root, (fs::path(out_dir) / "route20").string());
    if (code) return code;
    return build_solve(root, (fs::path(out_dir) / "solve3").string());
}
