// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tactix/codec/tactic.hpp"
#include "tactix/core/problem.hpp"
#include "tactix/core/trajectory.hpp"

namespace tactix {

/// The ideal routing trajectory of a hybrid: one call per option, each
/// pasting the source problem verbatim and observing its gold answer, then
/// the aggregate action answering with the label.
Trajectory make_routing_trajectory(const Problem& hybrid, const Tactic& routing);

/// Splits trajectories into (kept, dropped); dropped ones never emitted a
/// program or their last program failed. `tactics` resolves each trajectory's tactic.
std::pair<std::vector<Trajectory>, std::vector<Trajectory>> filter_no_program(const std::vector<Trajectory>& trajs,
                                                                              const std::vector<Tactic>& tactics);

/// Indices of steps superseded later: programs before a revision, answers
/// before a later answer.
std::set<std::size_t> detect_bad_steps(const Trajectory& t, const Tactic& tactic);

/// Rewrites each bad step with the action and observations of the next good
/// step carrying the same action name (keeping the bad step's thought) and
/// drops the absorbed step. Bad steps without such a successor are dropped
/// and recorded as "pj_dropped:<index>" flags. Repeats until no bad step is left.
Trajectory to_pj(const Trajectory& t, const Tactic& tactic);

enum class SpanKind { thought, action, observation };
enum class SampleOrigin { pj, ipj };

struct MaskSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    bool trainable = false;
    SpanKind kind = SpanKind::thought;
    bool operator==(const MaskSpan&) const = default;
};

struct TrainSample {
    std::string text;
    std::vector<MaskSpan> mask;
    SampleOrigin origin = SampleOrigin::ipj;
    std::string source_trajectory_id;
    bool operator==(const TrainSample&) const = default;
};

/// Rendered steps with spans tiling the whole text. Thought and action
/// spans are trainable unless the step is listed in `masked`; observation
/// spans never are.
TrainSample make_sample(const Trajectory& t, const std::set<std::size_t>& masked, SampleOrigin origin);

/// The original trajectory with thought/action of bad steps masked out.
TrainSample to_ipj(const Trajectory& t, const Tactic& tactic);

/// Span accounting: ordered, disjoint, covering the text, observations never trainable.
std::vector<std::string> check_sample(const TrainSample& s);

std::string_view to_string(SampleOrigin o);
std::string sample_to_json(const TrainSample& s);
void write_samples(const std::string& path, const std::vector<TrainSample>& samples);

}  // namespace tactix
