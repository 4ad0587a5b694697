// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

#include "tactix/codec/tactic.hpp"
#include "tactix/core/problem.hpp"
#include "tactix/core/trajectory.hpp"
#include "tactix/llm/provider.hpp"

namespace tactix {

struct PromptPolicy {
    /// Head exemplars (first two steps of a solved problem) shown while the
    /// trajectory has fewer than `head_steps` steps.
    int head_exemplars = 5;
    int head_steps = 2;
    /// Full exemplars shown from then on.
    int full_exemplars = 2;
    /// Routing prompts always use this many full exemplars.
    int routing_full_exemplars = 2;
};

struct IclExemplar {
    std::string problem_text;
    std::string answer_space;
    std::vector<Step> steps;
    bool operator==(const IclExemplar&) const = default;
};

struct IclEntry {
    std::vector<IclExemplar> heads;
    std::vector<IclExemplar> fulls;
};

/// Exemplars per tactic name.
class IclBank {
public:
    void add_head(const std::string& tactic, IclExemplar e) { entries_[tactic].heads.push_back(std::move(e)); }
    void add_full(const std::string& tactic, IclExemplar e) { entries_[tactic].fulls.push_back(std::move(e)); }
    const IclEntry* find(const std::string& tactic) const;
    bool empty_for(const std::string& tactic) const;
    const std::map<std::string, IclEntry>& entries() const { return entries_; }

private:
    std::map<std::string, IclEntry> entries_;
};

IclBank read_icl_bank(const std::string& path);
void write_icl_bank(const std::string& path, const IclBank& bank);

/// First `head_steps` steps of a solved trajectory.
IclExemplar make_head_exemplar(const std::string& problem_text, const std::string& answer_space,
                               const std::vector<Step>& steps, int head_steps = 2);
/// Whole trajectory with code bodies and observation contents elided.
IclExemplar make_full_exemplar(const std::string& problem_text, const std::string& answer_space,
                               const std::vector<Step>& steps);
/// Code fence bodies become "<your code>".
std::string elide_code(std::string_view text);

/// How the final answer of a problem must look.
std::string answer_space(const Problem& p);

struct PromptInput {
    const Tactic* tactic = nullptr;
    std::string problem_text;
    std::string answer_space;
    const std::vector<Step>* steps = nullptr;
    bool routing = false;
};

struct Prompt {
    std::vector<Message> messages;
    /// No exemplars were available for the tactic.
    bool zero_shot = false;
    int head_count = 0;
    int full_count = 0;
};

Prompt build_prompt(const PromptInput& in, const PromptPolicy& policy, const IclBank* bank);

}  // namespace tactix
