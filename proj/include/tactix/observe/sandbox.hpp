// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tactix {

enum class ExitStatus { ok, nonzero, timeout, protocol_error };

struct ExecutionResult {
    ExitStatus exit_status = ExitStatus::protocol_error;
    std::string stdout_text;
    std::string stderr_text;
    std::int64_t duration_ms = 0;
    bool operator==(const ExecutionResult&) const = default;
};

struct SandboxLimits {
    std::int64_t max_stdout_bytes = 64 * 1024;
    int max_memory_mb = 512;
};

std::string_view to_string(ExitStatus s);
std::optional<ExitStatus> parse_exit_status(std::string_view s);

/// Client side of the guest-program executor.
class SandboxClient {
public:
    virtual ~SandboxClient() = default;
    virtual ExecutionResult run(const std::string& source, int timeout_ms) = 0;
    /// Libraries the executor reports as importable.
    virtual std::vector<std::string> libs() const = 0;
};

/// Tactic libraries missing from the executor's list. Entries containing a
/// space ("Any builtin Python libs") describe the standard library and are
/// always satisfied.
std::vector<std::string> missing_libs(const std::vector<std::string>& required, const std::vector<std::string>& available);

/// Speaks line-delimited JSON over the stdio of a child process:
/// handshake {"protocol":"sandbox/1","libs":[...]}, then one request and one
/// response per line. The child is respawned after any failure.
class ProcessSandbox : public SandboxClient {
public:
    explicit ProcessSandbox(std::vector<std::string> argv, SandboxLimits limits = {}, int grace_ms = 1000);
    ~ProcessSandbox() override;
    ProcessSandbox(const ProcessSandbox&) = delete;
    ProcessSandbox& operator=(const ProcessSandbox&) = delete;

    ExecutionResult run(const std::string& source, int timeout_ms) override;
    std::vector<std::string> libs() const override;
    /// Starts the child if needed and returns the handshake libs. Throws on a bad handshake.
    std::vector<std::string> handshake();
    int spawn_count() const { return spawns_; }

private:
    void start();
    void stop();
    std::optional<std::string> read_line(int timeout_ms);

    std::vector<std::string> argv_;
    SandboxLimits limits_;
    int grace_ms_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buffer_;
    bool eof_ = false;
    std::vector<std::string> libs_;
    std::uint64_t next_id_ = 0;
    int spawns_ = 0;
    mutable std::mutex mu_;
};

/// Answers from a table keyed by program fingerprint; unknown programs fail
/// with a nonzero exit so fixture gaps are visible.
class ReplaySandbox : public SandboxClient {
public:
    explicit ReplaySandbox(std::map<std::string, ExecutionResult> table, std::vector<std::string> libs = {});
    ExecutionResult run(const std::string& source, int timeout_ms) override;
    std::vector<std::string> libs() const override { return libs_; }
    static std::string fingerprint(const std::string& source);

private:
    std::map<std::string, ExecutionResult> table_;
    std::vector<std::string> libs_;
};

std::map<std::string, ExecutionResult> read_sandbox_table(const std::string& path);
void write_sandbox_table(const std::string& path, const std::map<std::string, ExecutionResult>& table);

/// Sandbox backed by a function (tests, fuzzing).
class FunctionSandbox : public SandboxClient {
public:
    using Fn = std::function<ExecutionResult(const std::string&, int)>;
    explicit FunctionSandbox(Fn fn, std::vector<std::string> libs = {}) : fn_(std::move(fn)), libs_(std::move(libs)) {}
    ExecutionResult run(const std::string& source, int timeout_ms) override { return fn_(source, timeout_ms); }
    std::vector<std::string> libs() const override { return libs_; }

private:
    Fn fn_;
    std::vector<std::string> libs_;
};

/// Fixed set of clients; run() borrows a free one, blocking while all are busy.
class SandboxPool : public SandboxClient {
public:
    explicit SandboxPool(std::vector<std::unique_ptr<SandboxClient>> clients);
    ExecutionResult run(const std::string& source, int timeout_ms) override;
    std::vector<std::string> libs() const override;

private:
    std::vector<std::unique_ptr<SandboxClient>> clients_;
    std::vector<bool> busy_;
    std::mutex mu_;
    std::condition_variable cv_;
};

}  // namespace tactix
