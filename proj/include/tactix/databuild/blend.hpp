// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactix/core/errors.hpp"
#include "tactix/core/problem.hpp"
#include "tactix/llm/provider.hpp"

namespace tactix {

class BlendRejected : public std::runtime_error {
public:
    BlendRejected(const std::string& msg, std::vector<std::string> rationales)
        : std::runtime_error(msg), rationales_(std::move(rationales)) {}
    const std::vector<std::string>& rationales() const { return rationales_; }

private:
    std::vector<std::string> rationales_;
};

/// Context part and answer part of a source problem.
struct Decomposed {
    std::string context;
    std::string ask;
};
Decomposed decompose(const Problem& p);

/// A declarative statement claiming `answer` for the source problem.
std::string make_statement(const Problem& p, const AnswerValue& answer);

/// An incorrect answer of the same kind: numbers move by 1-20% at the gold's
/// precision, labels and option indices change, a graph gets one edge reversed.
AnswerValue make_distractor(const Problem& p, std::uint64_t seed);

/// Merges source contexts into one passage.
using Blender = std::function<std::string(const std::vector<std::string>& contexts, Granularity g)>;

/// Deterministic stand-in: easy keeps contexts contiguous with short
/// transitions; hard interleaves their sentences round-robin.
std::string rule_blend(const std::vector<std::string>& contexts, Granularity g);
/// One LLM call per hybrid; the reply is the blended passage.
Blender llm_blender(CompletionProvider& llm, CompletionParams params = {});
std::vector<Message> blend_prompt(const std::vector<std::string>& contexts, Granularity g);

struct BlendSpec {
    std::string id;
    Difficulty difficulty = Difficulty::GG;
    Granularity granularity = Granularity::easy;
    /// Index into the sources of the one answered correctly.
    std::size_t correct_source = 0;
    /// 1-based position of the correct statement.
    int label = 1;
    std::uint64_t seed = 0;
};

/// Random correct source and label for `n` sources.
BlendSpec plan_blend(std::string id, Difficulty d, Granularity g, std::size_t n, std::uint64_t seed);

struct BlendResult {
    Problem problem;
    /// Answer each statement claims, in option order.
    std::vector<AnswerValue> claims;
};

/// Builds a hybrid problem from 2-4 sources (or 1 for the wrapped case).
/// The correct option sits at spec.label; the others keep source order.
BlendResult blend(const std::vector<Problem>& sources, const BlendSpec& spec, const Blender& blender);

/// A standalone problem as a one-option hybrid with an unchanged context.
Problem wrap_single(const Problem& p);

using SourcePools = std::map<Source, std::vector<Problem>>;

/// Sources for a difficulty, in letter order, drawn without replacement.
/// X draws a dataset uniformly from the letters before it. Throws ConfigError
/// when a needed pool is empty or too small.
std::vector<Problem> sample_difficulty(Difficulty d, const SourcePools& pools, std::uint64_t seed);

}  // namespace tactix
