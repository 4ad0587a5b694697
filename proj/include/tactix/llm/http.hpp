// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "tactix/llm/provider.hpp"
#include "tactix/llm/rate_limit.hpp"

namespace tactix {

enum class WireFormat { openai_chat, anthropic_messages };

struct EndpointConfig {
    std::string provider_id = "http";
    /// Scheme, host and optional port, e.g. "https://api.example.com" or "http://127.0.0.1:8080".
    std::string base_url;
    /// Request path; defaults per wire format when empty.
    std::string path;
    std::string model;
    WireFormat wire = WireFormat::openai_chat;
    /// Name of the environment variable holding the credential.
    std::string api_key_env;
    double requests_per_second = 0.0;
    int timeout_ms = 120000;
};

/// Chat-completion client. Errors are typed (AuthError, RateLimitError,
/// TimeoutError, TransportError); no retries happen here.
class HttpProvider : public CompletionProvider {
public:
    explicit HttpProvider(EndpointConfig cfg);
    Completion complete(const std::vector<Message>& messages, const CompletionParams& params) override;
    std::string provider_id() const override { return cfg_.provider_id; }

private:
    EndpointConfig cfg_;
    std::string api_key_;
    std::shared_ptr<TokenBucket> limiter_;
};

std::optional<WireFormat> parse_wire_format(std::string_view s);

}  // namespace tactix
