// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tactix/core/problem.hpp"
#include "tactix/llm/provider.hpp"

namespace tactix {

/// One judge's vote; nullopt `good` means the judge abstained
/// (transport failure or an unreadable reply).
struct JudgeVerdict {
    std::string judge_id;
    std::optional<bool> good;
    std::string rationale;
    bool operator==(const JudgeVerdict&) const = default;
};

/// Y/N at the start of the reply (after an optional "### Program good" or
/// "### Verdict" header), then free-form rationale. Anything else abstains.
JudgeVerdict parse_judge_reply(std::string_view judge_id, std::string_view reply);

/// Asks one judge; transport failures become an abstention.
JudgeVerdict ask_judge(CompletionProvider& judge, const std::vector<Message>& prompt);

struct VoteOutcome {
    bool pass = false;
    std::vector<JudgeVerdict> verdicts;
};

/// Majority of non-abstaining votes; ties and all-abstain fail.
bool majority_yes(const std::vector<JudgeVerdict>& verdicts);

// ---- blend verification ----

std::vector<Message> verify_prompt(const Problem& hybrid, const std::vector<Problem>& sources);

/// Every judge checks that each source's facts survive in the blended
/// context. Throws std::invalid_argument without judges.
VoteOutcome verify_blend(const Problem& hybrid, const std::vector<Problem>& sources,
                         const std::vector<CompletionProvider*>& judges);

// ---- trivial-program classification ----

/// A labeled example: question and answer, the proposed program, the verdict.
struct TrivialExemplar {
    std::string question_and_answer;
    std::string program;
    bool good = false;
    std::string rationale;
    bool operator==(const TrivialExemplar&) const = default;
};

/// Blocks of "=== Question and answer" / "=== Proposed program" /
/// "### Program good" followed by Y or N and an optional rationale.
std::vector<TrivialExemplar> parse_trivial_bank(std::string_view text);
std::string render_trivial_bank(const std::vector<TrivialExemplar>& bank);

std::vector<Message> trivial_prompt(std::string_view question_and_answer, std::string_view program,
                                    const std::vector<TrivialExemplar>& bank);

struct TrivialOutcome {
    bool trivial = true;
    std::vector<JudgeVerdict> verdicts;
};

/// Requires an odd number of judges. Good only with a strict majority of
/// non-abstaining "Y" votes; ties count as trivial.
TrivialOutcome classify_trivial(std::string_view question_and_answer, std::string_view program,
                                const std::vector<TrivialExemplar>& bank, const std::vector<CompletionProvider*>& judges);

}  // namespace tactix
