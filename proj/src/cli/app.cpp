// SPDX-License-Identifier: Apache-2.0
#include "tactix/cli/app.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "tactix/codec/tactic.hpp"
#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/errors.hpp"
#include "tactix/core/text.hpp"
#include "tactix/databuild/blend.hpp"
#include "tactix/databuild/judges.hpp"
#include "tactix/databuild/transforms.hpp"
#include "tactix/llm/http.hpp"
#include "tactix/llm/replay.hpp"
#include "tactix/metrics/report.hpp"
#include "tactix/metrics/score.hpp"
#include "tactix/observe/sandbox.hpp"

namespace tactix {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kModes[] = {"solve", "route", "blend", "filter", "prep-train", "report"};

void require_file(const std::string& path, std::string_view flag) {
    if (path.empty()) throw ConfigError(std::string(flag) + " is required");
    if (!fs::is_regular_file(path)) throw ConfigError(std::string(flag) + ": no such file " + path);
}

std::string out_file(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out);
    return (fs::path(cfg.out) / name).string();
}

std::vector<Tactic> load_pool(const RunConfig& cfg) {
    if (!fs::is_directory(cfg.tactics_dir)) throw ConfigError("--tactics-dir: no such directory " + cfg.tactics_dir);
    try {
        auto pool = load_tactic_dir(cfg.tactics_dir);
        if (pool.empty()) throw ConfigError("--tactics-dir: no tactic documents in " + cfg.tactics_dir);
        return pool;
    } catch (const TacticParseError& e) {
        throw ConfigError(std::string("tactic document: ") + e.what());
    }
}

const Tactic* find(const std::vector<Tactic>& pool, std::string_view name) {
    for (const auto& t : pool)
        if (t.name == name) return &t;
    return nullptr;
}

std::vector<Problem> load_problems(const RunConfig& cfg) {
    require_file(cfg.problems, "--problems");
    auto ps = read_problems(cfg.problems);
    std::set<std::string> seen;
    for (const auto& p : ps) {
        auto v = validate_problem(p);
        if (!v.empty()) throw ConfigError("problem " + p.id + ": " + v.front());
        if (!seen.insert(p.id).second) throw ConfigError("duplicate problem id " + p.id);
    }
    return ps;
}

/// Indices of `ps` ordered by problem id.
std::vector<std::size_t> by_id_order(const std::vector<Problem>& ps) {
    std::vector<std::size_t> idx(ps.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return ps[a].id < ps[b].id; });
    return idx;
}

/// LLM access. Replay fixtures hold one independent script per key.
class ProviderSet {
public:
    explicit ProviderSet(const RunConfig& cfg) {
        if (cfg.provider == "replay") {
            require_file(cfg.replay, "--replay");
            for (auto& [key, script] : split_by_key(read_replay_script(cfg.replay)))
                replay_[key] = std::make_unique<ReplayProvider>(std::move(script), "replay:" + key);
        } else if (cfg.provider == "http") {
            EndpointConfig ec;
            ec.provider_id = cfg.model.empty() ? "http" : cfg.model;
            ec.base_url = cfg.endpoint;
            ec.model = cfg.model;
            ec.wire = *parse_wire_format(cfg.wire);
            ec.api_key_env = cfg.api_key_env;
            ec.requests_per_second = cfg.requests_per_second;
            try {
                http_ = std::make_unique<HttpProvider>(ec);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        } else {
            throw ConfigError("provider " + cfg.provider + " cannot serve LLM calls");
        }
    }

    void require(const std::vector<std::string>& keys) const {
        if (http_) return;
        for (const auto& k : keys)
            if (!replay_.count(k)) throw ConfigError("replay fixture has no script for " + k);
    }

    CompletionProvider& get(const std::string& key) {
        if (http_) return *http_;
        return *replay_.at(key);
    }

    /// Replay scripts with responses nobody asked for.
    std::vector<std::string> unused(const std::vector<std::string>& keys) const {
        std::vector<std::string> out;
        if (http_) return out;
        for (const auto& k : keys) {
            const auto& r = *replay_.at(k);
            if (r.remaining()) out.push_back("replay script " + k + " has " + std::to_string(r.remaining()) + " unused responses");
        }
        return out;
    }

private:
    std::map<std::string, std::unique_ptr<ReplayProvider>> replay_;
    std::unique_ptr<HttpProvider> http_;
};

std::vector<std::string> split_args(const std::string& s) {
    std::vector<std::string> out;
    for (auto a : text::split(s, ' '))
        if (!a.empty()) out.emplace_back(a);
    return out;
}

std::unique_ptr<SandboxClient> make_sandbox(const RunConfig& cfg, const std::vector<Tactic>& used) {
    std::vector<std::string> required;
    for (const auto& t : used) required.insert(required.end(), t.libs.begin(), t.libs.end());
    if (!cfg.sandbox_table.empty()) {
        require_file(cfg.sandbox_table, "--sandbox-table");
        return std::make_unique<ReplaySandbox>(read_sandbox_table(cfg.sandbox_table), required);
    }
    auto argv = split_args(cfg.sandbox_cmd);
    std::vector<std::unique_ptr<SandboxClient>> clients;
    for (int i = 0; i < std::max(1, cfg.parallelism); ++i) {
        auto s = std::make_unique<ProcessSandbox>(argv);
        auto missing = missing_libs(required, s->handshake());
        if (!missing.empty()) throw ConfigError("sandbox lacks required library " + missing.front());
        clients.push_back(std::move(s));
    }
    return std::make_unique<SandboxPool>(std::move(clients));
}

std::unique_ptr<IclBank> load_bank(const RunConfig& cfg) {
    if (cfg.icl_bank.empty()) return nullptr;
    require_file(cfg.icl_bank, "--icl-bank");
    return std::make_unique<IclBank>(read_icl_bank(cfg.icl_bank));
}

EngineConfig engine_config(const RunConfig& cfg) {
    EngineConfig ec;
    ec.limits = cfg.limits;
    if (cfg.provider == "replay") ec.backoff = std::chrono::milliseconds(0);
    return ec;
}

std::vector<std::string> ids_of(const std::vector<Problem>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.id);
    return out;
}

std::size_t gateway_failures(const std::vector<Trajectory>& ts) {
    std::size_t n = 0;
    for (const auto& t : ts)
        for (const auto& s : t.steps)
            for (const auto& o : s.observations)
                if (o.observer == kGatewayObserver) ++n;
    return n;
}

std::string pct(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << v;
    return os.str();
}

std::string fixed4(double v) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << v;
    return os.str();
}

/// Per-problem answers, one line each, in record order.
std::string answers_table(const std::vector<ScoreRecord>& rs, const std::vector<Trajectory>& tops) {
    std::string out = "problem_id\tdataset\tdifficulty\tstatus\tanswer\tcorrect\tTac Recog\tSubP Recog\n";
    for (std::size_t i = 0; i < rs.size(); ++i) {
        const auto& r = rs[i];
        std::string tac = "n/a", subp = "n/a";
        if (r.routing && !r.options.empty()) {
            double ok = 0, bleu = 0;
            for (const auto& o : r.options) {
                ok += o.tactic_correct ? 1 : 0;
                bleu += o.subp_bleu;
            }
            tac = pct(100.0 * ok / static_cast<double>(r.options.size()));
            subp = fixed4(bleu / static_cast<double>(r.options.size()));
        }
        out += r.problem_id + "\t" + r.dataset + "\t" + (r.difficulty.empty() ? "-" : r.difficulty) + "\t" +
               std::string(to_string(tops[i].status)) + "\t" + text::replace_all(r.answer.value_or("-"), "\n", "; ") + "\t" + (r.correct ? "yes" : "no") +
               "\t" + tac + "\t" + subp + "\n";
    }
    return out;
}

int finish_run(const RunConfig& cfg, const std::vector<Trajectory>& all, const std::vector<Trajectory>& tops,
               const std::vector<ScoreRecord>& records, const std::vector<std::string>& leftovers, std::ostream& out,
               std::ostream& err) {
    write_trajectories(out_file(cfg, "trajectories.jsonl"), all);
    write_records(out_file(cfg, "records.jsonl"), records);
    AggregateConfig ac;
    ac.codebleu_threshold = cfg.codebleu.threshold;
    auto report = aggregate(records, ac);
    write_file(out_file(cfg, "report.txt"), report_text(report));
    write_file(out_file(cfg, "report.json"), report_json(report));
    write_file(out_file(cfg, "report.csv"), report_csv(report));
    write_file(out_file(cfg, "answers.tsv"), answers_table(records, tops));
    out << report_text(report);

    int code = static_cast<int>(ExitCode::ok);
    if (auto n = gateway_failures(all)) {
        err << "error: " << n << " LLM requests failed after retries\n";
        code = static_cast<int>(ExitCode::infrastructure);
    }
    for (const auto& l : leftovers) {
        err << "error: " << l << "\n";
        code = static_cast<int>(ExitCode::infrastructure);
    }
    return code;
}

}  // namespace

std::string_view to_string(Mode m) { return kModes[static_cast<int>(m)]; }

std::optional<Mode> parse_mode(std::string_view s) {
    for (int i = 0; i < 6; ++i)
        if (kModes[i] == s) return static_cast<Mode>(i);
    return std::nullopt;
}

void validate_config(const RunConfig& cfg) {
    auto v = validate_limits(cfg.limits);
    if (!v.empty()) throw ConfigError(v.front());
    try {
        cfg.codebleu.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (cfg.parallelism < 1) throw ConfigError("--parallelism must be at least 1");
    bool needs_out = cfg.mode != Mode::report;
    if (needs_out && cfg.out.empty()) throw ConfigError("--out is required");
    if (cfg.provider != "replay" && cfg.provider != "http" && cfg.provider != "rule")
        throw ConfigError("unknown provider " + cfg.provider);
    if (cfg.provider == "rule" && cfg.mode != Mode::blend) throw ConfigError("provider rule only serves blend");
    if (cfg.provider == "http" && !parse_wire_format(cfg.wire)) throw ConfigError("unknown wire format " + cfg.wire);
    switch (cfg.mode) {
        case Mode::solve:
        case Mode::route:
            if (cfg.sandbox_table.empty() == cfg.sandbox_cmd.empty())
                throw ConfigError("exactly one of --sandbox-table and --sandbox-cmd is required");
            if (!cfg.sandbox_cmd.empty() && split_args(cfg.sandbox_cmd).empty()) throw ConfigError("--sandbox-cmd is empty");
            break;
        case Mode::blend:
            if (cfg.count < 0) throw ConfigError("--count must not be negative");
            if (cfg.judges < 0) throw ConfigError("--judges must not be negative");
            if (cfg.provider == "rule" && cfg.judges > 0) throw ConfigError("judges need an LLM provider");
            break;
        case Mode::filter:
            require_file(cfg.trajectories, "--trajectories");
            if (cfg.judges > 0) {
                if (cfg.judges % 2 == 0) throw ConfigError("--judges must be odd");
                require_file(cfg.judge_bank, "--judge-bank");
                require_file(cfg.problems, "--problems");
            }
            break;
        case Mode::prep_train:
            require_file(cfg.trajectories, "--trajectories");
            break;
        case Mode::report:
            require_file(cfg.records, "--records");
            if (cfg.format != "text" && cfg.format != "json" && cfg.format != "csv")
                throw ConfigError("unknown report format " + cfg.format);
            break;
    }
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto pool = load_pool(cfg);
    auto problems = load_problems(cfg);
    std::vector<Tactic> used;
    std::vector<const Tactic*> tactic_of;
    for (const auto& p : problems) {
        if (!p.gold_tactic) throw ConfigError("problem " + p.id + " has no gold tactic");
        const auto* t = find(pool, *p.gold_tactic);
        if (!t) throw ConfigError("problem " + p.id + ": unknown tactic " + *p.gold_tactic);
        tactic_of.push_back(t);
        if (!find(used, t->name)) used.push_back(*t);
    }
    auto bank = load_bank(cfg);
    auto sandbox = make_sandbox(cfg, used);
    ProviderSet providers(cfg);
    auto keys = ids_of(problems);
    providers.require(keys);

    auto order = by_id_order(problems);
    auto ecfg = engine_config(cfg);
    std::function<Trajectory(std::size_t)> work = [&](std::size_t k) {
        auto i = order[k];
        Engine engine(pool, providers.get(problems[i].id), *sandbox, bank.get(), ecfg);
        return engine.run_subtrajectory(problems[i], *tactic_of[i]);
    };
    auto trajs = run_parallel<Trajectory>(order.size(), cfg.parallelism, work);
    std::vector<ScoreRecord> records;
    for (std::size_t k = 0; k < order.size(); ++k)
        records.push_back(score_trajectory(trajs[k], *tactic_of[order[k]], problems[order[k]], cfg.codebleu));
    return finish_run(cfg, trajs, trajs, records, providers.unused(keys), out, err);
}

int cmd_route(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto pool = load_pool(cfg);
    const auto* routing = find(pool, "routing");
    if (!routing) throw ConfigError("tactic pool has no routing tactic");
    for (const auto& r : routing->routes)
        if (!find(pool, r.tactic)) throw ConfigError("routing tactic routes to unknown tactic " + r.tactic);
    auto problems = load_problems(cfg);
    auto bank = load_bank(cfg);
    auto sandbox = make_sandbox(cfg, pool);
    ProviderSet providers(cfg);
    auto keys = ids_of(problems);
    providers.require(keys);

    auto order = by_id_order(problems);
    auto ecfg = engine_config(cfg);
    std::function<RoutingResult(std::size_t)> work = [&](std::size_t k) {
        const auto& p = problems[order[k]];
        Engine engine(pool, providers.get(p.id), *sandbox, bank.get(), ecfg);
        return engine.run_routing(p, *routing);
    };
    auto results = run_parallel<RoutingResult>(order.size(), cfg.parallelism, work);
    std::vector<Trajectory> all, tops;
    std::vector<ScoreRecord> records;
    for (std::size_t k = 0; k < order.size(); ++k) {
        auto& r = results[k];
        records.push_back(score_routing(r.routing, r.children, pool, problems[order[k]], cfg.codebleu));
        tops.push_back(r.routing);
        all.push_back(r.routing);
        for (auto& c : r.children) all.push_back(std::move(c));
    }
    return finish_run(cfg, all, tops, records, providers.unused(keys), out, err);
}

int cmd_blend(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto pool = load_pool(cfg);
    const auto* routing = find(pool, "routing");
    if (!routing) throw ConfigError("tactic pool has no routing tactic");
    auto sources = load_problems(cfg);
    SourcePools pools;
    for (const auto& p : sources) {
        if (p.source == Source::hybrid) throw ConfigError("blend sources must not be hybrids: " + p.id);
        if (!p.gold_tactic || !routing->route_for_tactic(*p.gold_tactic))
            throw ConfigError("source " + p.id + " has no routable gold tactic");
        pools[p.source].push_back(p);
    }
    std::unique_ptr<ProviderSet> providers;
    std::vector<std::string> keys;
    Blender blender = rule_blend;
    std::vector<CompletionProvider*> judges;
    if (cfg.provider != "rule") {
        providers = std::make_unique<ProviderSet>(cfg);
        keys.push_back("blend");
        for (int j = 1; j <= cfg.judges; ++j) keys.push_back("judge-" + std::to_string(j));
        providers->require(keys);
        blender = llm_blender(providers->get("blend"));
        for (int j = 1; j <= cfg.judges; ++j) judges.push_back(&providers->get("judge-" + std::to_string(j)));
    }

    auto difficulties = cfg.difficulties;
    if (difficulties.empty()) difficulties = {Difficulty::GG, Difficulty::GF, Difficulty::GFX, Difficulty::GFR, Difficulty::GFRX};
    std::mt19937_64 rng(cfg.seed);
    std::vector<Problem> hybrids;
    std::vector<Trajectory> trajs;
    std::string rejected;
    for (auto d : difficulties) {
        for (int i = 0; i < cfg.count; ++i) {
            auto id = "hyb-" + std::string(to_string(d)) + "-" + std::string(to_string(cfg.granularity)) + "-" +
                      std::to_string(i);
            auto srcs = sample_difficulty(d, pools, rng());
            auto spec = plan_blend(id, d, cfg.granularity, srcs.size(), rng());
            try {
                auto result = blend(srcs, spec, blender);
                if (!judges.empty()) {
                    auto vote = verify_blend(result.problem, srcs, judges);
                    if (!vote.pass) {
                        std::vector<std::string> why;
                        for (const auto& v : vote.verdicts) why.push_back(v.judge_id + ": " + text::replace_all(v.rationale, "\n", " "));
                        throw BlendRejected("judges rejected the blend", why);
                    }
                }
                trajs.push_back(make_routing_trajectory(result.problem, *routing));
                hybrids.push_back(std::move(result.problem));
            } catch (const BlendRejected& e) {
                rejected += id + "\t" + e.what() + "\n";
            }
        }
    }
    write_problems(out_file(cfg, "hybrids.jsonl"), hybrids);
    write_trajectories(out_file(cfg, "routing.jsonl"), trajs);
    write_file(out_file(cfg, "rejected.tsv"), rejected);
    out << "blended " << hybrids.size() << " hybrids, rejected "
        << std::count(rejected.begin(), rejected.end(), '\n') << "\n";
    int code = 0;
    if (providers)
        for (const auto& l : providers->unused(keys)) {
            err << "error: " << l << "\n";
            code = static_cast<int>(ExitCode::infrastructure);
        }
    return code;
}

int cmd_filter(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto pool = load_pool(cfg);
    auto trajs = read_trajectories(cfg.trajectories);
    std::vector<Trajectory> kept, dropped;
    std::string log;
    std::vector<Trajectory> candidates;
    for (auto& t : trajs) {
        const auto* tactic = find(pool, t.tactic);
        if (!tactic) throw ConfigError("trajectory " + t.id + " uses unknown tactic " + t.tactic);
        if (tactic->name == "routing") {
            log += t.id + "\tkept\n";
            kept.push_back(std::move(t));
        } else {
            candidates.push_back(std::move(t));
        }
    }
    auto [with_program, no_program] = filter_no_program(candidates, pool);
    for (auto& t : no_program) {
        log += t.id + "\tno_program\n";
        dropped.push_back(std::move(t));
    }

    std::unique_ptr<ProviderSet> providers;
    std::vector<std::string> keys;
    if (cfg.judges > 0) {
        auto bank = parse_trivial_bank(read_file(cfg.judge_bank));
        std::map<std::string, Problem> problems;
        for (auto& p : load_problems(cfg)) problems[p.id] = std::move(p);
        for (const auto& t : with_program)
            if (!problems.count(t.problem_id)) throw ConfigError("trajectory " + t.id + " refers to unknown problem " + t.problem_id);
        providers = std::make_unique<ProviderSet>(cfg);
        for (int j = 1; j <= cfg.judges; ++j) keys.push_back("judge-" + std::to_string(j));
        providers->require(keys);
        std::vector<CompletionProvider*> judges;
        for (const auto& k : keys) judges.push_back(&providers->get(k));
        for (auto& t : with_program) {
            const auto& p = problems.at(t.problem_id);
            auto trace = last_program(t, *find(pool, t.tactic));
            auto qa = problem_text(p) + "\n\n### Answer:\n" + answer_text(p.gold);
            auto outcome = classify_trivial(qa, trace.program.value_or(""), bank, judges);
            log += t.id + (outcome.trivial ? "\ttrivial\n" : "\tkept\n");
            (outcome.trivial ? dropped : kept).push_back(std::move(t));
        }
    } else {
        for (auto& t : with_program) {
            log += t.id + "\tkept\n";
            kept.push_back(std::move(t));
        }
    }
    write_trajectories(out_file(cfg, "kept.jsonl"), kept);
    write_trajectories(out_file(cfg, "dropped.jsonl"), dropped);
    write_file(out_file(cfg, "filter_log.tsv"), log);
    out << "kept " << kept.size() << ", dropped " << dropped.size() << "\n";
    int code = 0;
    if (providers)
        for (const auto& l : providers->unused(keys)) {
            err << "error: " << l << "\n";
            code = static_cast<int>(ExitCode::infrastructure);
        }
    return code;
}

int cmd_prep_train(const RunConfig& cfg, std::ostream& out, std::ostream&) {
    auto pool = load_pool(cfg);
    auto trajs = read_trajectories(cfg.trajectories);
    std::vector<Trajectory> pj_trajs;
    std::vector<TrainSample> pj, ipj;
    for (const auto& t : trajs) {
        const auto* tactic = find(pool, t.tactic);
        if (!tactic) throw ConfigError("trajectory " + t.id + " uses unknown tactic " + t.tactic);
        auto rewritten = to_pj(t, *tactic);
        pj.push_back(make_sample(rewritten, {}, SampleOrigin::pj));
        ipj.push_back(to_ipj(t, *tactic));
        pj_trajs.push_back(std::move(rewritten));
    }
    write_trajectories(out_file(cfg, "pj_trajectories.jsonl"), pj_trajs);
    write_samples(out_file(cfg, "pj.jsonl"), pj);
    write_samples(out_file(cfg, "ipj.jsonl"), ipj);
    out << "wrote " << pj.size() << " PJ and " << ipj.size() << " IPJ samples\n";
    return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    auto records = read_records(cfg.records);
    AggregateConfig ac;
    ac.codebleu_threshold = cfg.codebleu.threshold;
    auto report = aggregate(records, ac);
    if (records.empty() && cfg.format != "text") err << "No records to report.\n";
    std::string body = cfg.format == "json" ? report_json(report) : cfg.format == "csv" ? report_csv(report) : report_text(report);
    if (!cfg.out.empty()) {
        auto ext = cfg.format == "text" ? "txt" : cfg.format;
        write_file(out_file(cfg, "report." + ext), body);
    }
    out << body;
    return 0;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        validate_config(cfg);
        switch (cfg.mode) {
            case Mode::solve: return cmd_solve(cfg, out, err);
            case Mode::route: return cmd_route(cfg, out, err);
            case Mode::blend: return cmd_blend(cfg, out, err);
            case Mode::filter: return cmd_filter(cfg, out, err);
            case Mode::prep_train: return cmd_prep_train(cfg, out, err);
            case Mode::report: return cmd_report(cfg, out, err);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::config);
    } catch (const CodecError& e) {
        err << "config error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::config);
    } catch (const ReplayError& e) {
        err << "replay error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::infrastructure);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::infrastructure);
    }
    return static_cast<int>(ExitCode::infrastructure);
}

}  // namespace tactix
