// SPDX-License-Identifier: Apache-2.0
#include "tactix/databuild/judges.hpp"

#include <stdexcept>

#include "tactix/core/text.hpp"
#include "tactix/databuild/blend.hpp"

namespace tactix {

namespace {

constexpr std::string_view kQa = "=== Question and answer";
constexpr std::string_view kProgram = "=== Proposed program";
constexpr std::string_view kGood = "### Program good";

std::optional<bool> yes_no(std::string_view word) {
    auto w = text::to_lower(word);
    while (!w.empty() && (w.back() == '.' || w.back() == ',' || w.back() == ':')) w.pop_back();
    if (w == "y" || w == "yes") return true;
    if (w == "n" || w == "no") return false;
    return std::nullopt;
}

}  // namespace

JudgeVerdict parse_judge_reply(std::string_view judge_id, std::string_view reply) {
    JudgeVerdict v;
    v.judge_id = std::string(judge_id);
    auto lines = text::split_lines(reply);
    std::size_t i = 0;
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i < lines.size()) {
        auto head = text::trim(lines[i]);
        if (head == kGood || head == "### Verdict") ++i;
    }
    while (i < lines.size() && text::trim(lines[i]).empty()) ++i;
    if (i >= lines.size()) return v;
    auto first = text::trim(lines[i]);
    auto word = first.substr(0, first.find_first_of(" \t"));
    v.good = yes_no(word);
    if (!v.good) return v;
    std::vector<std::string> rest;
    auto tail = text::trim(first.substr(word.size()));
    if (!tail.empty()) rest.emplace_back(tail);
    for (++i; i < lines.size(); ++i) rest.emplace_back(lines[i]);
    v.rationale = text::trim_blank_lines(text::join(rest, "\n"));
    return v;
}

JudgeVerdict ask_judge(CompletionProvider& judge, const std::vector<Message>& prompt) {
    try {
        return parse_judge_reply(judge.provider_id(), judge.complete(prompt, {}).text);
    } catch (const TransportError& e) {
        return {judge.provider_id(), std::nullopt, std::string("abstained: ") + e.what()};
    }
}

bool majority_yes(const std::vector<JudgeVerdict>& verdicts) {
    int yes = 0, no = 0;
    for (const auto& v : verdicts) {
        if (!v.good) continue;
        (*v.good ? yes : no)++;
    }
    return yes > no;
}

std::vector<Message> verify_prompt(const Problem& hybrid, const std::vector<Problem>& sources) {
    std::string system =
        "You check a merged passage against the passages it was built from. Answer Y if every fact, number and name "
        "of every source passage can still be recovered from the merged passage, and N otherwise. Start your reply "
        "with Y or N on its own line, then explain briefly.";
    std::string user;
    for (std::size_t i = 0; i < sources.size(); ++i)
        user += "=== Source " + std::to_string(i + 1) + "\n" + decompose(sources[i]).context + "\n\n";
    user += "=== Merged passage\n" + hybrid.context + "\n\n### Verdict\n";
    return {{"system", system}, {"user", user}};
}

VoteOutcome verify_blend(const Problem& hybrid, const std::vector<Problem>& sources,
                         const std::vector<CompletionProvider*>& judges) {
    if (judges.empty()) throw std::invalid_argument("verify_blend needs at least one judge");
    VoteOutcome out;
    auto prompt = verify_prompt(hybrid, sources);
    for (auto* j : judges) out.verdicts.push_back(ask_judge(*j, prompt));
    out.pass = majority_yes(out.verdicts);
    return out;
}

std::vector<TrivialExemplar> parse_trivial_bank(std::string_view doc) {
    std::vector<TrivialExemplar> out;
    std::size_t at = doc.find(kQa);
    while (at != std::string_view::npos) {
        auto next = doc.find(kQa, at + kQa.size());
        auto block = doc.substr(at + kQa.size(), next == std::string_view::npos ? std::string_view::npos : next - at - kQa.size());
        auto p = block.find(kProgram);
        auto g = block.find(kGood);
        if (p == std::string_view::npos || g == std::string_view::npos || g < p)
            throw std::invalid_argument("exemplar block without '" + std::string(kProgram) + "' and '" + std::string(kGood) + "'");
        TrivialExemplar e;
        e.question_and_answer = text::trim_blank_lines(block.substr(0, p));
        e.program = text::trim_blank_lines(block.substr(p + kProgram.size(), g - p - kProgram.size()));
        auto verdict = parse_judge_reply("bank", block.substr(g));
        if (!verdict.good) throw std::invalid_argument("exemplar verdict must be Y or N");
        e.good = *verdict.good;
        e.rationale = verdict.rationale;
        out.push_back(std::move(e));
        at = next;
    }
    return out;
}

std::string render_trivial_bank(const std::vector<TrivialExemplar>& bank) {
    std::string out;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        const auto& e = bank[i];
        if (i) out += "\n";
        out += std::string(kQa) + "\n" + e.question_and_answer + "\n" + std::string(kProgram) + "\n" + e.program + "\n" +
               std::string(kGood) + "\n" + (e.good ? "Y" : "N");
        if (!e.rationale.empty()) out += " " + e.rationale;
        out += "\n";
    }
    return out;
}

std::vector<Message> trivial_prompt(std::string_view question_and_answer, std::string_view program,
                                    const std::vector<TrivialExemplar>& bank) {
    std::string system =
        "You review programs written to solve reasoning problems. A program is good (Y) when it models the problem "
        "and computes the answer. It is trivial (N) when it hardcodes the answer or keeps its reasoning in comments "
        "or constants instead of computing it. Reply with Y or N on the first line, then a short rationale.";
    std::string user = render_trivial_bank(bank);
    if (!user.empty()) user += "\n";
    user += std::string(kQa) + "\n" + std::string(question_and_answer) + "\n" + std::string(kProgram) + "\n" +
            std::string(program) + "\n" + std::string(kGood) + "\n";
    return {{"system", system}, {"user", user}};
}

TrivialOutcome classify_trivial(std::string_view question_and_answer, std::string_view program,
                                const std::vector<TrivialExemplar>& bank, const std::vector<CompletionProvider*>& judges) {
    if (judges.empty() || judges.size() % 2 == 0)
        throw std::invalid_argument("classify_trivial needs an odd number of judges");
    TrivialOutcome out;
    auto prompt = trivial_prompt(question_and_answer, program, bank);
    for (auto* j : judges) out.verdicts.push_back(ask_judge(*j, prompt));
    out.trivial = !majority_yes(out.verdicts);
    return out;
}

}  // namespace tactix
