// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tactix {

struct Message {
    std::string role;  // "system", "user" or "assistant"
    std::string content;
    bool operator==(const Message&) const = default;
};

struct CompletionParams {
    double temperature = 0.0;
    int max_output_tokens = 1024;
    std::vector<std::string> stop;
};

struct Completion {
    std::string text;
    /// The backend stopped because of max_output_tokens.
    bool truncated = false;
};

/// Transport-level failures. The engine retries these; everything else propagates.
class TransportError : public std::runtime_error {
public:
    enum class Kind { network, auth, rate_limit, timeout, server, protocol };
    TransportError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

class AuthError : public TransportError {
public:
    explicit AuthError(const std::string& msg) : TransportError(Kind::auth, msg) {}
};
class RateLimitError : public TransportError {
public:
    explicit RateLimitError(const std::string& msg) : TransportError(Kind::rate_limit, msg) {}
};
class TimeoutError : public TransportError {
public:
    explicit TimeoutError(const std::string& msg) : TransportError(Kind::timeout, msg) {}
};

/// f_LLM. Implementations must be callable from several threads at once.
class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual Completion complete(const std::vector<Message>& messages, const CompletionParams& params) = 0;
    virtual std::string provider_id() const = 0;
};

/// Provider backed by a function; used for scripted tests and fuzzing.
class CallbackProvider : public CompletionProvider {
public:
    using Fn = std::function<std::string(const std::vector<Message>&)>;
    CallbackProvider(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
    Completion complete(const std::vector<Message>& messages, const CompletionParams&) override { return {fn_(messages), false}; }
    std::string provider_id() const override { return id_; }

private:
    std::string id_;
    Fn fn_;
};

/// Stable hash of a message list, used to pin replay entries to prompts.
std::string prompt_fingerprint(const std::vector<Message>& messages);

}  // namespace tactix
