// test_remote.cpp
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "dcomp/composer.hpp"
#include "dcomp/remote_backend.hpp"
#include "testutil.hpp"

using namespace dcomp;
using nlohmann::json;

namespace {

struct LocalServer {
    httplib::Server server;
    std::thread thread;
    int port = 0;

    explicit LocalServer(std::function<json(const json&)> handler) {
        server.Post("/v1/chat/completions",
                    [handler = std::move(handler)](const httplib::Request& req,
                                                   httplib::Response& res) {
                        const json body = json::parse(req.body);
                        res.set_content(handler(body).dump(), "application/json");
                    });
        port = server.bind_to_any_port("127.0.0.1");
        thread = std::thread([this] { server.listen_after_bind(); });
        server.wait_until_ready();
    }
    ~LocalServer() {
        server.stop();
        thread.join();
    }
};

json reply(const std::string& text) {
    return json{{"choices", json::array({{{"message", {{"content", text}}}}})}};
}

} // namespace

TEST_CASE("missing api key env var is a configuration error") {
    RemoteConfig cfg;
    cfg.api_key_env = "DCOMP_TEST_KEY_THAT_DOES_NOT_EXIST";
    CHECK_THROWS_AS(RemoteChatBackend{cfg}, BackendError);

    cfg.require_api_key = false;  // local servers without auth are fine
    CHECK_NOTHROW(RemoteChatBackend{cfg});
}

TEST_CASE("remote backend speaks the chat-completions contract") {
    json seen;
    LocalServer server([&](const json& body) {
        seen = body;
        return reply("{\"index\":0,\"left\":1,\"top\":2,\"width\":3,\"height\":4}");
    });

    RemoteConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(server.port);
    cfg.require_api_key = false;
    cfg.model = "test-model";
    RemoteChatBackend backend(cfg);

    Conversation conv;
    conv.canvas = Canvas{100, 100};
    Turn t1;
    t1.human = "a poster of canvas width 100px, canvas height 100px. Now predict the "
               "background elements: element 0: <image>";
    t1.images.push_back({"element:e0", std::make_shared<Raster>(
                                           testutil::patterned_raster(8, 8, 1))});
    conv.turns.push_back(t1);

    const std::string out = backend.respond(conv);
    CHECK(out.find("\"left\":1") != std::string::npos);

    REQUIRE(seen.contains("messages"));
    CHECK(seen["model"] == "test-model");
    CHECK(seen["temperature"] == doctest::Approx(0.7));
    CHECK(seen["top_p"] == doctest::Approx(0.95));
    const json& msg = seen["messages"][0];
    CHECK(msg["role"] == "user");
    // Text is split around the <image> token with the PNG attached between.
    REQUIRE(msg["content"].size() == 2);
    CHECK(msg["content"][0]["type"] == "text");
    CHECK(msg["content"][1]["type"] == "image_url");
    const std::string url = msg["content"][1]["image_url"]["url"].get<std::string>();
    CHECK(url.rfind("data:image/png;base64,", 0) == 0);
}

TEST_CASE("assistant turns forward as context; multi-turn order preserved") {
    json seen;
    LocalServer server([&](const json& body) {
        seen = body;
        return reply("{}");
    });
    RemoteConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(server.port);
    cfg.require_api_key = false;
    RemoteChatBackend backend(cfg);

    Conversation conv;
    Turn t1;
    t1.human = "first";
    t1.assistant = "answer1";
    Turn t2;
    t2.human = "second";
    conv.turns.push_back(t1);
    conv.turns.push_back(t2);
    backend.respond(conv);

    REQUIRE(seen["messages"].size() == 3);
    CHECK(seen["messages"][0]["role"] == "user");
    CHECK(seen["messages"][1]["role"] == "assistant");
    CHECK(seen["messages"][1]["content"] == "answer1");
    CHECK(seen["messages"][2]["role"] == "user");
}

TEST_CASE("transport retries with backoff, then succeeds") {
    std::atomic<int> calls{0};
    LocalServer server([&](const json&) -> json {
        if (calls.fetch_add(1) == 0)
            throw std::runtime_error("boom");  // 500 from the server wrapper
        return reply("ok");
    });
    // The throwing handler produces a 500; the client must retry.
    RemoteConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(server.port);
    cfg.require_api_key = false;
    cfg.transport_retries = 2;
    cfg.backoff_initial_seconds = 0.01;
    RemoteChatBackend backend(cfg);

    Conversation conv;
    Turn t;
    t.human = "hi";
    conv.turns.push_back(t);
    CHECK(backend.respond(conv) == "ok");
    CHECK(calls.load() == 2);
}

TEST_CASE("unreachable host raises after exhausting retries") {
    RemoteConfig cfg;
    cfg.base_url = "http://127.0.0.1:1";  // nothing listens here
    cfg.require_api_key = false;
    cfg.transport_retries = 1;
    cfg.backoff_initial_seconds = 0.01;
    cfg.timeout_seconds = 1;
    RemoteChatBackend backend(cfg);
    Conversation conv;
    Turn t;
    t.human = "hi";
    conv.turns.push_back(t);
    CHECK_THROWS_AS(backend.respond(conv), BackendError);
}

TEST_CASE("full composition loop against a scripted remote server") {
    // The server walks the canned answers; each request must carry one more
    // user message than the previous (turns plus the canvas-state images).
    std::vector<std::string> script;
    {
        std::ifstream f(testutil::data_dir() + "/example_poster_transcript.json");
        nlohmann::json j;
        f >> j;
        for (const auto& t : j["turns"]) script.push_back(t["assistant"].get<std::string>());
    }
    std::atomic<std::size_t> step{0};
    std::vector<std::size_t> image_parts;
    std::mutex mu;
    LocalServer server([&](const json& body) {
        std::size_t images = 0;
        for (const auto& msg : body["messages"])
            if (msg["content"].is_array())
                for (const auto& part : msg["content"])
                    if (part["type"] == "image_url") ++images;
        {
            std::lock_guard lock(mu);
            image_parts.push_back(images);
        }
        return reply(script.at(step.fetch_add(1)));
    });

    RemoteConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(server.port);
    cfg.require_api_key = false;
    RemoteChatBackend backend(cfg);

    const dcomp::Design expected = testutil::example_poster();
    const auto result = dcomp::compose(expected.elements, expected.canvas, expected.plan,
                                       backend, testutil::shared_font_store(),
                                       testutil::example_vocab());
    CHECK(result.trace.backend_calls == 5);
    for (const auto& [id, rec] : expected.attributes)
        CHECK(result.design.attributes.at(id) == rec);
    // Image parts grow as states and element images accumulate:
    // turn 1: 1 element image; turn 2: +state; turn 3: +state +element; ...
    REQUIRE(image_parts.size() == 5);
    CHECK(image_parts[0] == 1);
    CHECK(image_parts[1] == 2);
    CHECK(image_parts[2] == 4);
    CHECK(image_parts[3] == 5);
    CHECK(image_parts[4] == 6);
}

TEST_CASE("remote labeler adapter completes a labeling prompt") {
    LocalServer server([&](const json& body) {
        // The labeling prompt arrives as one user message with an image.
        const auto& content = body["messages"][0]["content"];
        bool has_image = false;
        for (const auto& part : content)
            if (part["type"] == "image_url") has_image = true;
        return reply(has_image ? "Underlay" : "Background");
    });
    RemoteConfig cfg;
    cfg.base_url = "http://127.0.0.1:" + std::to_string(server.port);
    cfg.require_api_key = false;
    auto labeler = make_remote_labeler(std::make_shared<RemoteChatBackend>(cfg));

    LabelingRequest req;
    req.element_image = std::make_shared<Raster>(testutil::patterned_raster(6, 6, 2));
    CHECK(labeler(build_labeling_prompt(req)) == "Underlay");
}
