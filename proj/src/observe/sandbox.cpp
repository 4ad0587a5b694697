// SPDX-License-Identifier: Apache-2.0
#include "tactix/observe/sandbox.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/text.hpp"

namespace tactix {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

std::string_view to_string(ExitStatus s) {
    switch (s) {
        case ExitStatus::ok: return "ok";
        case ExitStatus::nonzero: return "nonzero";
        case ExitStatus::timeout: return "timeout";
        case ExitStatus::protocol_error: return "protocol_error";
    }
    return "protocol_error";
}

std::optional<ExitStatus> parse_exit_status(std::string_view s) {
    for (auto e : {ExitStatus::ok, ExitStatus::nonzero, ExitStatus::timeout, ExitStatus::protocol_error})
        if (to_string(e) == s) return e;
    return std::nullopt;
}

std::vector<std::string> missing_libs(const std::vector<std::string>& required, const std::vector<std::string>& available) {
    std::vector<std::string> out;
    for (const auto& r : required) {
        if (r.find(' ') != std::string::npos) continue;
        if (std::find(available.begin(), available.end(), r) == available.end()) out.push_back(r);
    }
    return out;
}

// ---- ProcessSandbox ----

ProcessSandbox::ProcessSandbox(std::vector<std::string> argv, SandboxLimits limits, int grace_ms)
    : argv_(std::move(argv)), limits_(limits), grace_ms_(grace_ms) {
    if (argv_.empty()) throw std::invalid_argument("sandbox command is empty");
    // A dead runner must surface as a protocol error, not kill the harness.
    signal(SIGPIPE, SIG_IGN);
}

ProcessSandbox::~ProcessSandbox() { stop(); }

void ProcessSandbox::start() {
    int in_pipe[2], out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0) throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
    if (pipe2(out_pipe, O_CLOEXEC) != 0) {
        close(in_pipe[0]);
        close(in_pipe[1]);
        throw std::runtime_error(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        close(in_pipe[0]);
        close(in_pipe[1]);
        close(out_pipe[0]);
        close(out_pipe[1]);
        execvp(args[0], args.data());
        _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    pid_ = pid;
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    buffer_.clear();
    ++spawns_;
}

void ProcessSandbox::stop() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        kill(pid_, SIGKILL);
        waitpid(pid_, nullptr, 0);
    }
    pid_ = -1;
    libs_.clear();
}

std::optional<std::string> ProcessSandbox::read_line(int timeout_ms) {
    auto deadline = Clock::now() + std::chrono::milliseconds(timeout_ms);
    eof_ = false;
    while (true) {
        if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
            auto line = buffer_.substr(0, nl);
            buffer_.erase(0, nl + 1);
            return line;
        }
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
        if (left <= 0) return std::nullopt;
        pollfd pfd{from_child_, POLLIN, 0};
        int rc = poll(&pfd, 1, static_cast<int>(left));
        if (rc < 0 && errno == EINTR) continue;
        if (rc <= 0) return std::nullopt;
        if (!(pfd.revents & POLLIN)) {
            eof_ = true;
            return std::nullopt;
        }
        char chunk[4096];
        auto n = read(from_child_, chunk, sizeof chunk);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            eof_ = true;
            return std::nullopt;
        }
        buffer_.append(chunk, static_cast<std::size_t>(n));
    }
}

std::vector<std::string> ProcessSandbox::handshake() {
    std::lock_guard lock(mu_);
    if (pid_ > 0) return libs_;
    start();
    auto line = read_line(10000 + grace_ms_);
    if (!line) {
        stop();
        throw std::runtime_error("sandbox: no handshake from " + argv_[0]);
    }
    try {
        auto j = json::parse(*line);
        if (j.at("protocol").get<std::string>() != "sandbox/1") throw std::runtime_error("unsupported protocol");
        libs_ = j.at("libs").get<std::vector<std::string>>();
    } catch (const std::exception& e) {
        stop();
        throw std::runtime_error(std::string("sandbox: bad handshake: ") + e.what());
    }
    return libs_;
}

std::vector<std::string> ProcessSandbox::libs() const {
    std::lock_guard lock(mu_);
    return libs_;
}

ExecutionResult ProcessSandbox::run(const std::string& source, int timeout_ms) {
    auto t0 = Clock::now();
    auto elapsed = [&] { return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count(); };
    ExecutionResult fail;
    fail.exit_status = ExitStatus::protocol_error;
    try {
        handshake();
    } catch (const std::exception& e) {
        fail.stderr_text = e.what();
        fail.duration_ms = elapsed();
        return fail;
    }
    std::lock_guard lock(mu_);
    auto id = "r" + std::to_string(next_id_++);
    json req;
    req["id"] = id;
    req["source"] = source;
    req["timeout_ms"] = std::max(100, timeout_ms);
    req["limits"] = {{"max_stdout_bytes", limits_.max_stdout_bytes}, {"max_memory_mb", limits_.max_memory_mb}};
    auto line = req.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
    std::size_t off = 0;
    while (off < line.size()) {
        auto n = write(to_child_, line.data() + off, line.size() - off);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) {
            stop();
            fail.stderr_text = "sandbox: runner closed its input";
            fail.duration_ms = elapsed();
            return fail;
        }
        off += static_cast<std::size_t>(n);
    }
    auto reply = read_line(std::max(100, timeout_ms) + grace_ms_);
    if (!reply) {
        bool alive = !eof_;
        stop();
        ExecutionResult r;
        r.exit_status = alive ? ExitStatus::timeout : ExitStatus::protocol_error;
        r.stderr_text = alive ? "sandbox: no reply within timeout; runner restarted" : "sandbox: runner exited";
        r.duration_ms = elapsed();
        return r;
    }
    try {
        auto j = json::parse(*reply);
        if (j.at("id").get<std::string>() != id) throw std::runtime_error("reply id does not echo request id " + id);
        auto st = parse_exit_status(j.at("exit_status").get<std::string>());
        if (!st) throw std::runtime_error("unknown exit_status");
        ExecutionResult r;
        r.exit_status = *st;
        r.stdout_text = j.value("stdout", "");
        r.stderr_text = j.value("stderr", "");
        r.duration_ms = j.value("duration_ms", static_cast<std::int64_t>(elapsed()));
        return r;
    } catch (const std::exception& e) {
        stop();
        fail.stderr_text = std::string("sandbox: malformed reply: ") + e.what();
        fail.duration_ms = elapsed();
        return fail;
    }
}

// ---- ReplaySandbox ----

ReplaySandbox::ReplaySandbox(std::map<std::string, ExecutionResult> table, std::vector<std::string> libs)
    : table_(std::move(table)), libs_(std::move(libs)) {}

std::string ReplaySandbox::fingerprint(const std::string& source) { return text::fnv1a_hex(source); }

ExecutionResult ReplaySandbox::run(const std::string& source, int) {
    auto it = table_.find(fingerprint(source));
    if (it != table_.end()) return it->second;
    ExecutionResult r;
    r.exit_status = ExitStatus::nonzero;
    r.stderr_text = "replay sandbox: no recorded result for program " + fingerprint(source);
    return r;
}

std::map<std::string, ExecutionResult> read_sandbox_table(const std::string& path) {
    std::map<std::string, ExecutionResult> out;
    auto data = read_file(path);
    std::size_t lineno = 0;
    for (auto line : text::split_lines(data)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto j = json::parse(line);
            ExecutionResult r;
            auto st = parse_exit_status(j.at("exit_status").get<std::string>());
            if (!st) throw CodecError("unknown exit_status", lineno);
            r.exit_status = *st;
            r.stdout_text = j.value("stdout", "");
            r.stderr_text = j.value("stderr", "");
            r.duration_ms = j.value("duration_ms", 0);
            out[j.at("fingerprint").get<std::string>()] = r;
        } catch (const json::exception& e) {
            throw CodecError(e.what(), lineno);
        }
    }
    return out;
}

void write_sandbox_table(const std::string& path, const std::map<std::string, ExecutionResult>& table) {
    std::string out;
    for (const auto& [fp, r] : table) {
        nlohmann::ordered_json j;
        j["fingerprint"] = fp;
        j["exit_status"] = to_string(r.exit_status);
        j["stdout"] = r.stdout_text;
        j["stderr"] = r.stderr_text;
        j["duration_ms"] = r.duration_ms;
        out += j.dump() + "\n";
    }
    write_file(path, out);
}

// ---- SandboxPool ----

SandboxPool::SandboxPool(std::vector<std::unique_ptr<SandboxClient>> clients)
    : clients_(std::move(clients)), busy_(clients_.size(), false) {
    if (clients_.empty()) throw std::invalid_argument("sandbox pool needs at least one client");
}

ExecutionResult SandboxPool::run(const std::string& source, int timeout_ms) {
    std::size_t slot = 0;
    {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return std::find(busy_.begin(), busy_.end(), false) != busy_.end(); });
        slot = static_cast<std::size_t>(std::find(busy_.begin(), busy_.end(), false) - busy_.begin());
        busy_[slot] = true;
    }
    struct Release {
        SandboxPool* pool;
        std::size_t slot;
        ~Release() {
            {
                std::lock_guard lock(pool->mu_);
                pool->busy_[slot] = false;
            }
            pool->cv_.notify_one();
        }
    } release{this, slot};
    return clients_[slot]->run(source, timeout_ms);
}

std::vector<std::string> SandboxPool::libs() const { return clients_.front()->libs(); }

}  // namespace tactix
