// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tactix/llm/http.hpp"
#include "tactix/llm/provider.hpp"
#include "tactix/llm/rate_limit.hpp"
#include "tactix/llm/replay.hpp"

using namespace tactix;
namespace fs = std::filesystem;

namespace {

// Stub chat server on a random local port; behaviour chosen per request path.
class StubServer {
public:
    StubServer() {
        srv_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            last_body = req.body;
            last_auth = req.get_header_value("Authorization");
            res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"canned reply"},"finish_reason":"stop"}]})",
                            "application/json");
        });
        srv_.Post("/trunc", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(R"({"choices":[{"message":{"content":"cut sho"},"finish_reason":"length"}]})", "application/json");
        });
        srv_.Post("/v1/messages", [this](const httplib::Request& req, httplib::Response& res) {
            last_body = req.body;
            last_auth = req.get_header_value("x-api-key");
            res.set_content(R"({"content":[{"type":"text","text":"part one"},{"type":"text","text":", part two"}],"stop_reason":"end_turn"})",
                            "application/json");
        });
        srv_.Post("/401", [](const httplib::Request&, httplib::Response& res) {
            res.status = 401;
            res.set_content("bad key", "text/plain");
        });
        srv_.Post("/429", [](const httplib::Request&, httplib::Response& res) { res.status = 429; });
        srv_.Post("/500", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
        srv_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) { res.set_content("<html>", "text/html"); });
        srv_.Post("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(1500));
            res.set_content("{}", "application/json");
        });
        port_ = srv_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { srv_.listen_after_bind(); });
        srv_.wait_until_ready();
    }
    ~StubServer() {
        srv_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::string last_body;
    std::string last_auth;

private:
    httplib::Server srv_;
    int port_ = 0;
    std::thread thread_;
};

EndpointConfig config(const StubServer& s, std::string path = "") {
    EndpointConfig c;
    c.base_url = s.url();
    c.path = std::move(path);
    c.model = "stub-model";
    c.timeout_ms = 5000;
    return c;
}

const std::vector<Message> kMsgs{{"system", "be brief"}, {"user", "hello"}};

}  // namespace

TEST_CASE("http provider returns the canned body") {
    StubServer s;
    setenv("TACTIX_TEST_KEY", "sekrit", 1);
    auto cfg = config(s);
    cfg.api_key_env = "TACTIX_TEST_KEY";
    HttpProvider p(cfg);
    CompletionParams params;
    params.max_output_tokens = 77;
    params.stop = {"=== observations ==="};
    auto c = p.complete(kMsgs, params);
    CHECK(c.text == "canned reply");
    CHECK_FALSE(c.truncated);
    CHECK(s.last_auth == "Bearer sekrit");
    auto body = nlohmann::json::parse(s.last_body);
    CHECK(body["model"] == "stub-model");
    CHECK(body["max_tokens"] == 77);
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"].size() == 2);
    CHECK(body["stop"][0] == "=== observations ===");
}

TEST_CASE("http provider anthropic wire format") {
    StubServer s;
    setenv("TACTIX_TEST_KEY", "k2", 1);
    auto cfg = config(s);
    cfg.wire = WireFormat::anthropic_messages;
    cfg.api_key_env = "TACTIX_TEST_KEY";
    HttpProvider p(cfg);
    CHECK(p.complete(kMsgs, {}).text == "part one, part two");
    auto body = nlohmann::json::parse(s.last_body);
    CHECK(body["system"] == "be brief");
    CHECK(body["messages"].size() == 1);
    CHECK(s.last_auth == "k2");
}

TEST_CASE("http provider typed errors") {
    StubServer s;
    CHECK_THROWS_AS(HttpProvider(config(s, "/401")).complete(kMsgs, {}), AuthError);
    CHECK_THROWS_AS(HttpProvider(config(s, "/429")).complete(kMsgs, {}), RateLimitError);
    try {
        HttpProvider(config(s, "/500")).complete(kMsgs, {});
        FAIL("expected a server error");
    } catch (const TransportError& e) {
        CHECK(e.kind() == TransportError::Kind::server);
    }
    try {
        HttpProvider(config(s, "/garbage")).complete(kMsgs, {});
        FAIL("expected a protocol error");
    } catch (const TransportError& e) {
        CHECK(e.kind() == TransportError::Kind::protocol);
    }
    auto slow = config(s, "/slow");
    slow.timeout_ms = 300;
    CHECK_THROWS_AS(HttpProvider(slow).complete(kMsgs, {}), TimeoutError);

    auto dead = config(s);
    dead.base_url = "http://127.0.0.1:1";
    CHECK_THROWS_AS(HttpProvider(dead).complete(kMsgs, {}), TransportError);
}

TEST_CASE("http provider flags server-side truncation") {
    StubServer s;
    auto c = HttpProvider(config(s, "/trunc")).complete(kMsgs, {});
    CHECK(c.text == "cut sho");
    CHECK(c.truncated);
}

TEST_CASE("http provider requires its credential variable") {
    StubServer s;
    unsetenv("TACTIX_MISSING_KEY");
    auto cfg = config(s);
    cfg.api_key_env = "TACTIX_MISSING_KEY";
    CHECK_THROWS_AS(HttpProvider{cfg}, std::invalid_argument);
    cfg.base_url.clear();
    cfg.api_key_env.clear();
    CHECK_THROWS_AS(HttpProvider{cfg}, std::invalid_argument);
}

TEST_CASE("replay serves responses in order then exhausts") {
    ReplayScript script;
    for (int i = 1; i <= 4; ++i) script.push_back({"k", std::nullopt, "response " + std::to_string(i)});
    ReplayProvider p(script);
    for (int i = 1; i <= 4; ++i) CHECK(p.complete({{"user", "q" + std::to_string(i)}}, {}).text == "response " + std::to_string(i));
    CHECK(p.remaining() == 0);
    CHECK_THROWS_AS(p.complete(kMsgs, {}), ScriptExhausted);
}

TEST_CASE("replay fingerprint guards prompt drift") {
    auto fp = prompt_fingerprint(kMsgs);
    ReplayProvider ok({{"k", fp, "fine"}});
    CHECK(ok.complete(kMsgs, {}).text == "fine");

    ReplayProvider drift({{"k", fp, "fine"}});
    auto altered = kMsgs;
    altered[1].content = "hello!";
    try {
        drift.complete(altered, {});
        FAIL("expected ReplayMismatch");
    } catch (const ReplayMismatch& e) {
        CHECK(e.diff().find("hello!") != std::string::npos);
    }
    CHECK(drift.consumed() == 0);
}

TEST_CASE("replay determinism and script files") {
    ReplayScript script{{"a", std::nullopt, "x"}, {"b", std::nullopt, "y\nz"}, {"a", prompt_fingerprint(kMsgs), "w"}};
    auto path = (fs::temp_directory_path() / "tactix_replay_test.jsonl").string();
    write_replay_script(path, script);
    CHECK(read_replay_script(path) == script);
    auto groups = split_by_key(script);
    REQUIRE(groups.size() == 2);
    CHECK(groups["a"].size() == 2);
    CHECK(groups["a"][1].response == "w");

    auto run = [&] {
        ReplayProvider p(groups["a"]);
        std::vector<std::string> out;
        out.push_back(p.complete({{"user", "first"}}, {}).text);
        out.push_back(p.complete(kMsgs, {}).text);
        out.push_back(p.transcript()[0]);
        return out;
    };
    CHECK(run() == run());
}

TEST_CASE("recording provider captures replayable entries") {
    CallbackProvider inner("cb", [](const std::vector<Message>& m) { return "echo:" + m.back().content; });
    RecordingProvider rec(inner, "p1");
    rec.complete({{"user", "one"}}, {});
    rec.complete({{"user", "two"}}, {});
    ReplayProvider replay(rec.entries());
    CHECK(replay.complete({{"user", "one"}}, {}).text == "echo:one");
    CHECK_THROWS_AS(replay.complete({{"user", "three"}}, {}), ReplayMismatch);
}

TEST_CASE("token bucket paces requests") {
    TokenBucket b(50.0, 1.0);
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 11; ++i) b.acquire();
    std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    CHECK(dt.count() >= 0.18);
    CHECK(dt.count() < 2.0);
    CHECK(limiter_for("x", 0) == nullptr);
    CHECK(limiter_for("same", 5) == limiter_for("same", 5));
}
