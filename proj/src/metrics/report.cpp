// SPDX-License-Identifier: Apache-2.0
#include "tactix/metrics/report.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

namespace tactix {

using json = nlohmann::ordered_json;

bool counts_correct(const ScoreRecord& r, bool fuzzy) { return r.correct || (fuzzy && r.fuzzy_eligible && r.correct_fuzzy); }

bool counts_with_program(const ScoreRecord& r, bool fuzzy) {
    return counts_correct(r, fuzzy) && r.has_program && r.program_ran;
}

bool counts_with_program_plus(const ScoreRecord& r, const AggregateConfig& cfg) {
    return counts_with_program(r, cfg.fuzzy) && r.codebleu && *r.codebleu >= cfg.codebleu_threshold;
}

bool counts_options_done(const ScoreRecord& r, const AggregateConfig& cfg) {
    if (!counts_correct(r, cfg.fuzzy) || r.options.empty()) return false;
    return std::all_of(r.options.begin(), r.options.end(), [&](const OptionScore& o) {
        return o.tactic_correct && o.option_codebleu && *o.option_codebleu >= cfg.codebleu_threshold;
    });
}

namespace {

template <typename F>
std::optional<double> percent(const std::vector<ScoreRecord>& rs, F pred) {
    if (rs.empty()) return std::nullopt;
    auto n = std::count_if(rs.begin(), rs.end(), pred);
    return 100.0 * static_cast<double>(n) / static_cast<double>(rs.size());
}

}  // namespace

ReportRow aggregate_row(const std::vector<ScoreRecord>& rs, const AggregateConfig& cfg) {
    ReportRow row;
    row.n = rs.size();
    row.acc = percent(rs, [&](const ScoreRecord& r) { return counts_correct(r, cfg.fuzzy); });
    row.acc_w_prog = percent(rs, [&](const ScoreRecord& r) { return counts_with_program(r, cfg.fuzzy); });
    row.acc_w_prog_plus = percent(rs, [&](const ScoreRecord& r) { return counts_with_program_plus(r, cfg); });

    double cb = 0.0;
    std::size_t n_cb = 0;
    double bleu_sum = 0.0;
    std::size_t n_opt = 0, tac_ok = 0;
    bool any_routing = false;
    for (const auto& r : rs) {
        row.errors[static_cast<std::size_t>(r.error_type)]++;
        if (r.codebleu) {
            cb += *r.codebleu;
            ++n_cb;
        }
        any_routing = any_routing || r.routing;
        for (const auto& o : r.options) {
            ++n_opt;
            tac_ok += o.tactic_correct ? 1 : 0;
            bleu_sum += o.subp_bleu;
        }
    }
    if (n_cb) row.prog_qual = cb / static_cast<double>(n_cb);
    if (any_routing && n_opt) {
        row.tac_recog = 100.0 * static_cast<double>(tac_ok) / static_cast<double>(n_opt);
        row.subp_recog = bleu_sum / static_cast<double>(n_opt);
    }
    if (any_routing) row.acc_opt_done = percent(rs, [&](const ScoreRecord& r) { return counts_options_done(r, cfg); });
    return row;
}

AggregateReport aggregate(const std::vector<ScoreRecord>& records, const AggregateConfig& cfg) {
    AggregateReport rep;
    rep.config = cfg;
    rep.records = records.size();
    std::map<std::tuple<std::string, std::string, bool>, std::vector<ScoreRecord>> groups;
    for (const auto& r : records) groups[{r.dataset, r.difficulty, r.routing}].push_back(r);
    for (const auto& [key, rs] : groups) {
        auto row = aggregate_row(rs, cfg);
        row.dataset = std::get<0>(key);
        row.difficulty = std::get<1>(key);
        row.routing = std::get<2>(key);
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

std::vector<std::string> check_report(const AggregateReport& r) {
    std::vector<std::string> v;
    constexpr double eps = 1e-9;
    auto pct = [&](const std::optional<double>& x, const char* what) {
        if (x && (*x < -eps || *x > 100.0 + eps)) v.push_back(std::string(what) + " outside [0,100]");
    };
    for (const auto& row : r.rows) {
        pct(row.acc, "Acc");
        pct(row.acc_w_prog, "Acc_w_Prog");
        pct(row.acc_w_prog_plus, "Acc_w_Prog_plus");
        pct(row.tac_recog, "Tac_Recog");
        pct(row.acc_opt_done, "Acc_Opt_done");
        if (row.acc && row.acc_w_prog && *row.acc_w_prog > *row.acc + eps) v.push_back("Acc_w_Prog exceeds Acc");
        if (row.acc_w_prog && row.acc_w_prog_plus && *row.acc_w_prog_plus > *row.acc_w_prog + eps)
            v.push_back("Acc_w_Prog_plus exceeds Acc_w_Prog");
        if (row.acc && row.acc_opt_done && *row.acc_opt_done > *row.acc + eps) v.push_back("Acc_Opt_done exceeds Acc");
        for (const auto& m : {row.prog_qual, row.subp_recog})
            if (m && (*m < -eps || *m > 1.0 + eps)) v.push_back("mean outside [0,1]");
    }
    return v;
}

namespace {

const std::array<const char*, 4> kErrorNames{"correct", "wrong_ans", "runtime_err", "wrong_format"};

std::string cell(const std::optional<double>& v, int decimals) {
    if (!v) return "n/a";
    return fmt::format("{:.{}f}", *v, decimals);
}

std::string setting(const ReportRow& row) { return row.routing ? "routing" : "tactic"; }

std::vector<std::string> header() {
    std::vector<std::string> h{"Dataset", "Difficulty", "Setting", "N", "Acc", "Acc w/ Prog", "Acc w/ Prog+", "Prog Qual",
                               "Tac Recog", "Acc Opt done", "SubP Recog"};
    for (auto e : kErrorNames) h.emplace_back(e);
    return h;
}

std::vector<std::string> cells(const ReportRow& row) {
    std::vector<std::string> c{row.dataset,
                               row.difficulty.empty() ? "-" : row.difficulty,
                               setting(row),
                               std::to_string(row.n),
                               cell(row.acc, 2),
                               cell(row.acc_w_prog, 2),
                               cell(row.acc_w_prog_plus, 2),
                               cell(row.prog_qual, 4),
                               cell(row.tac_recog, 2),
                               cell(row.acc_opt_done, 2),
                               cell(row.subp_recog, 4)};
    for (auto n : row.errors) c.push_back(std::to_string(n));
    return c;
}

json value(const std::optional<double>& v) { return v ? json(*v) : json("n/a"); }

}  // namespace

std::string report_json(const AggregateReport& r) {
    json j;
    j["records"] = r.records;
    j["codebleu_threshold"] = r.config.codebleu_threshold;
    j["fuzzy"] = r.config.fuzzy;
    json rows = json::array();
    for (const auto& row : r.rows) {
        json o;
        o["dataset"] = row.dataset;
        o["difficulty"] = row.difficulty;
        o["setting"] = setting(row);
        o["n"] = row.n;
        o["Acc"] = value(row.acc);
        o["Acc_w_Prog"] = value(row.acc_w_prog);
        o["Acc_w_Prog_plus"] = value(row.acc_w_prog_plus);
        o["Prog_Qual"] = value(row.prog_qual);
        o["Tac_Recog"] = value(row.tac_recog);
        o["Acc_Opt_done"] = value(row.acc_opt_done);
        o["SubP_Recog"] = value(row.subp_recog);
        json errors;
        for (std::size_t i = 0; i < kErrorNames.size(); ++i) errors[kErrorNames[i]] = row.errors[i];
        o["errors"] = std::move(errors);
        rows.push_back(std::move(o));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string report_text(const AggregateReport& r) {
    if (r.rows.empty()) return "No records to report.\n";
    std::vector<std::vector<std::string>> table{header()};
    for (const auto& row : r.rows) table.push_back(cells(row));
    std::vector<std::size_t> width(table[0].size(), 0);
    for (const auto& line : table)
        for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
    std::string out;
    for (std::size_t k = 0; k < table.size(); ++k) {
        std::string line;
        for (std::size_t i = 0; i < table[k].size(); ++i) {
            if (i) line += "  ";
            // Text columns left-aligned, numbers right-aligned.
            line += i < 3 ? fmt::format("{:<{}}", table[k][i], width[i]) : fmt::format("{:>{}}", table[k][i], width[i]);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
        if (k == 0) {
            std::size_t total = 0;
            for (auto w : width) total += w;
            out += std::string(total + 2 * (width.size() - 1), '-') + "\n";
        }
    }
    return out;
}

std::string report_csv(const AggregateReport& r) {
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ',';
            bool quote = v[i].find_first_of(",\"\n") != std::string::npos;
            if (!quote) {
                s += v[i];
                continue;
            }
            s += '"';
            for (char c : v[i]) s += c == '"' ? std::string("\"\"") : std::string(1, c);
            s += '"';
        }
        return s + "\n";
    };
    std::string out = join(header());
    for (const auto& row : r.rows) out += join(cells(row));
    return out;
}

}  // namespace tactix
