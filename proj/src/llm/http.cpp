// SPDX-License-Identifier: Apache-2.0
#include "tactix/llm/http.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace tactix {

using json = nlohmann::json;

namespace {

std::string default_path(WireFormat w) { return w == WireFormat::openai_chat ? "/v1/chat/completions" : "/v1/messages"; }

json request_body(const EndpointConfig& cfg, const std::vector<Message>& messages, const CompletionParams& params) {
    json body;
    body["model"] = cfg.model;
    body["temperature"] = params.temperature;
    body["max_tokens"] = params.max_output_tokens;
    if (!params.stop.empty()) body[cfg.wire == WireFormat::openai_chat ? "stop" : "stop_sequences"] = params.stop;
    json msgs = json::array();
    std::string system;
    for (const auto& m : messages) {
        if (cfg.wire == WireFormat::anthropic_messages && m.role == "system") {
            if (!system.empty()) system += "\n\n";
            system += m.content;
            continue;
        }
        msgs.push_back({{"role", m.role}, {"content", m.content}});
    }
    if (!system.empty()) body["system"] = system;
    body["messages"] = msgs;
    return body;
}

Completion parse_reply(WireFormat wire, const std::string& raw) {
    json j;
    try {
        j = json::parse(raw);
    } catch (const json::exception& e) {
        throw TransportError(TransportError::Kind::protocol, std::string("response is not JSON: ") + e.what());
    }
    try {
        Completion c;
        if (wire == WireFormat::openai_chat) {
            const auto& choice = j.at("choices").at(0);
            c.text = choice.at("message").at("content").get<std::string>();
            c.truncated = choice.value("finish_reason", "") == "length";
        } else {
            for (const auto& part : j.at("content"))
                if (part.value("type", "") == "text") c.text += part.at("text").get<std::string>();
            c.truncated = j.value("stop_reason", "") == "max_tokens";
        }
        return c;
    } catch (const json::exception& e) {
        throw TransportError(TransportError::Kind::protocol, std::string("unexpected response shape: ") + e.what());
    }
}

}  // namespace

std::optional<WireFormat> parse_wire_format(std::string_view s) {
    if (s == "openai") return WireFormat::openai_chat;
    if (s == "anthropic") return WireFormat::anthropic_messages;
    return std::nullopt;
}

HttpProvider::HttpProvider(EndpointConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.base_url.empty()) throw std::invalid_argument("http provider: endpoint URL missing");
    if (cfg_.path.empty()) cfg_.path = default_path(cfg_.wire);
    if (!cfg_.api_key_env.empty()) {
        const char* key = std::getenv(cfg_.api_key_env.c_str());
        if (!key || !*key) throw std::invalid_argument("http provider: environment variable " + cfg_.api_key_env + " is not set");
        api_key_ = key;
    }
    limiter_ = limiter_for(cfg_.provider_id, cfg_.requests_per_second);
}

Completion HttpProvider::complete(const std::vector<Message>& messages, const CompletionParams& params) {
    if (limiter_) limiter_->acquire();
    httplib::Client cli(cfg_.base_url);
    auto secs = cfg_.timeout_ms / 1000;
    auto usecs = (cfg_.timeout_ms % 1000) * 1000;
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);
    httplib::Headers headers;
    if (!api_key_.empty()) {
        if (cfg_.wire == WireFormat::openai_chat) {
            headers.emplace("Authorization", "Bearer " + api_key_);
        } else {
            headers.emplace("x-api-key", api_key_);
            headers.emplace("anthropic-version", "2023-06-01");
        }
    }
    auto body = request_body(cfg_, messages, params).dump();
    auto res = cli.Post(cfg_.path, headers, body, "application/json");
    if (!res) {
        auto err = res.error();
        auto msg = cfg_.provider_id + ": " + httplib::to_string(err);
        if (err == httplib::Error::Read || err == httplib::Error::Write || err == httplib::Error::ConnectionTimeout)
            throw TimeoutError(msg);
        throw TransportError(TransportError::Kind::network, msg);
    }
    auto status = res->status;
    auto detail = cfg_.provider_id + ": HTTP " + std::to_string(status) + ": " + res->body.substr(0, 300);
    if (status == 401 || status == 403) throw AuthError(detail);
    if (status == 429) throw RateLimitError(detail);
    if (status == 408 || status == 504) throw TimeoutError(detail);
    if (status >= 500) throw TransportError(TransportError::Kind::server, detail);
    if (status < 200 || status >= 300) throw TransportError(TransportError::Kind::protocol, detail);
    return parse_reply(cfg_.wire, res->body);
}

}  // namespace tactix
