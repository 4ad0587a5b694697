// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tactix/llm/provider.hpp"

namespace tactix {

struct ReplayEntry {
    /// Groups entries into independent scripts (one per top-level problem).
    std::string key;
    std::optional<std::string> match;
    std::string response;
    bool operator==(const ReplayEntry&) const = default;
};

using ReplayScript = std::vector<ReplayEntry>;

/// Replay faults are fixture problems, not transport flakiness: never retried.
class ReplayError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ScriptExhausted : public ReplayError {
public:
    explicit ScriptExhausted(std::size_t calls)
        : ReplayError("replay script exhausted after " + std::to_string(calls) + " responses") {}
};

class ReplayMismatch : public ReplayError {
public:
    ReplayMismatch(std::size_t index, const std::string& expected, const std::string& got, const std::string& diff)
        : ReplayError("replay entry " + std::to_string(index) + ": prompt fingerprint " + got + " != expected " +
                      expected + "\n" + diff),
          diff_(diff) {}
    const std::string& diff() const { return diff_; }

private:
    std::string diff_;
};

/// Serves scripted responses in order. Deterministic; thread-safe (calls are serialized).
class ReplayProvider : public CompletionProvider {
public:
    explicit ReplayProvider(ReplayScript script, std::string id = "replay");
    Completion complete(const std::vector<Message>& messages, const CompletionParams& params) override;
    std::string provider_id() const override { return id_; }

    std::size_t consumed() const;
    std::size_t remaining() const;
    /// Fingerprints of every prompt seen, in call order.
    std::vector<std::string> transcript() const;

private:
    ReplayScript script_;
    std::string id_;
    mutable std::mutex mu_;
    std::size_t next_ = 0;
    std::vector<std::string> transcript_;
};

/// Records responses of a wrapped provider as replay entries (fixture generation).
class RecordingProvider : public CompletionProvider {
public:
    RecordingProvider(CompletionProvider& inner, std::string key) : inner_(inner), key_(std::move(key)) {}
    Completion complete(const std::vector<Message>& messages, const CompletionParams& params) override;
    std::string provider_id() const override { return inner_.provider_id(); }
    const ReplayScript& entries() const { return entries_; }

private:
    CompletionProvider& inner_;
    std::string key_;
    std::mutex mu_;
    ReplayScript entries_;
};

ReplayScript read_replay_script(const std::string& path);
void write_replay_script(const std::string& path, const ReplayScript& script);
/// Entries grouped by key, order within a key preserved.
std::map<std::string, ReplayScript> split_by_key(const ReplayScript& script);

}  // namespace tactix
