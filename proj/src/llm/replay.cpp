// SPDX-License-Identifier: Apache-2.0
#include "tactix/llm/replay.hpp"

#include <json.hpp>

#include "tactix/codec/trajectory_io.hpp"
#include "tactix/core/text.hpp"

namespace tactix {

using json = nlohmann::ordered_json;

std::string prompt_fingerprint(const std::vector<Message>& messages) {
    std::string buf;
    for (const auto& m : messages) {
        buf += m.role;
        buf += '\x1f';
        buf += m.content;
        buf += '\x1e';
    }
    return text::fnv1a_hex(buf);
}

ReplayProvider::ReplayProvider(ReplayScript script, std::string id) : script_(std::move(script)), id_(std::move(id)) {}

Completion ReplayProvider::complete(const std::vector<Message>& messages, const CompletionParams&) {
    std::lock_guard lock(mu_);
    auto fp = prompt_fingerprint(messages);
    transcript_.push_back(fp);
    if (next_ >= script_.size()) throw ScriptExhausted(script_.size());
    const auto& e = script_[next_];
    if (e.match && *e.match != fp) {
        std::string tail = messages.empty() ? "" : messages.back().content;
        if (tail.size() > 600) tail = "..." + tail.substr(tail.size() - 600);
        throw ReplayMismatch(next_, *e.match, fp, "--- prompt tail ---\n" + tail);
    }
    ++next_;
    return {e.response, false};
}

std::size_t ReplayProvider::consumed() const {
    std::lock_guard lock(mu_);
    return next_;
}

std::size_t ReplayProvider::remaining() const {
    std::lock_guard lock(mu_);
    return script_.size() - next_;
}

std::vector<std::string> ReplayProvider::transcript() const {
    std::lock_guard lock(mu_);
    return transcript_;
}

Completion RecordingProvider::complete(const std::vector<Message>& messages, const CompletionParams& params) {
    auto c = inner_.complete(messages, params);
    std::lock_guard lock(mu_);
    entries_.push_back({key_, prompt_fingerprint(messages), c.text});
    return c;
}

ReplayScript read_replay_script(const std::string& path) {
    auto data = read_file(path);
    ReplayScript out;
    std::size_t lineno = 0;
    for (auto line : text::split_lines(data)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto j = json::parse(line);
            ReplayEntry e;
            if (auto it = j.find("key"); it != j.end()) e.key = it->get<std::string>();
            if (auto it = j.find("match"); it != j.end() && !it->is_null()) e.match = it->get<std::string>();
            e.response = j.at("response").get<std::string>();
            out.push_back(std::move(e));
        } catch (const json::exception& e) {
            throw CodecError(e.what(), lineno);
        }
    }
    return out;
}

void write_replay_script(const std::string& path, const ReplayScript& script) {
    std::string out;
    for (const auto& e : script) {
        json j;
        j["key"] = e.key;
        j["match"] = e.match ? json(*e.match) : json(nullptr);
        j["response"] = e.response;
        out += j.dump() + "\n";
    }
    write_file(path, out);
}

std::map<std::string, ReplayScript> split_by_key(const ReplayScript& script) {
    std::map<std::string, ReplayScript> out;
    for (const auto& e : script) out[e.key].push_back(e);
    return out;
}

}  // namespace tactix
