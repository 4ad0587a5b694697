// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>
#include <iostream>

#include "tactix/cli/app.hpp"

int main(int argc, char** argv) {
    using namespace tactix;
    RunConfig cfg;
    std::string mode = "solve";
    std::vector<std::string> difficulties;
    std::string granularity = "easy";

    CLI::App app{"tactix: tactic-guided reasoning runs, data building and scoring"};
    app.add_option("--mode", mode, "solve | route | blend | filter | prep-train | report")->required();
    app.add_option("--problems", cfg.problems, "problem JSONL");
    app.add_option("--tactics-dir", cfg.tactics_dir, "directory of tactic documents")->capture_default_str();
    app.add_option("--icl-bank", cfg.icl_bank, "in-context exemplar bank");
    app.add_option("--provider", cfg.provider, "replay | http | rule (blend only)")->capture_default_str();
    app.add_option("--model", cfg.model, "model name sent to the endpoint");
    app.add_option("--replay", cfg.replay, "replay script JSONL");
    app.add_option("--endpoint", cfg.endpoint, "base URL of the completion endpoint");
    app.add_option("--wire", cfg.wire, "openai_chat | anthropic_messages")->capture_default_str();
    app.add_option("--api-key-env", cfg.api_key_env, "environment variable holding the credential")->capture_default_str();
    app.add_option("--rps", cfg.requests_per_second, "request rate limit, 0 for none");
    app.add_option("--sandbox-table", cfg.sandbox_table, "recorded program results");
    app.add_option("--sandbox-cmd", cfg.sandbox_cmd, "command line of the program executor");
    app.add_option("--max-steps", cfg.limits.max_steps)->capture_default_str();
    app.add_option("--max-consecutive-errors", cfg.limits.max_consecutive_errors)->capture_default_str();
    app.add_option("--codebleu-threshold", cfg.codebleu.threshold)->capture_default_str();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--parallelism", cfg.parallelism)->capture_default_str();
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--difficulty", difficulties, "blend difficulties (default: all)");
    app.add_option("--granularity", granularity, "easy | hard")->capture_default_str();
    app.add_option("--count", cfg.count, "hybrids per difficulty")->capture_default_str();
    app.add_option("--judges", cfg.judges, "number of LLM judges")->capture_default_str();
    app.add_option("--trajectories", cfg.trajectories, "trajectory JSONL");
    app.add_option("--judge-bank", cfg.judge_bank, "labeled program exemplars");
    app.add_option("--records", cfg.records, "score record JSONL");
    app.add_option("--format", cfg.format, "text | json | csv")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(ExitCode::config);
    }

    auto m = parse_mode(mode);
    if (!m) {
        std::cerr << "config error: unknown mode " << mode << "\n";
        return static_cast<int>(ExitCode::config);
    }
    cfg.mode = *m;
    for (const auto& d : difficulties) {
        auto parsed = parse_difficulty(d);
        if (!parsed) {
            std::cerr << "config error: unknown difficulty " << d << "\n";
            return static_cast<int>(ExitCode::config);
        }
        cfg.difficulties.push_back(*parsed);
    }
    auto g = parse_granularity(granularity);
    if (!g) {
        std::cerr << "config error: unknown granularity " << granularity << "\n";
        return static_cast<int>(ExitCode::config);
    }
    cfg.granularity = *g;
    return run(cfg, std::cout, std::cerr);
}
