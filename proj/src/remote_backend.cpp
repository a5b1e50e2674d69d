// remote_backend.cpp
// SPDX-License-Identifier: Apache-2.0
#include "dcomp/remote_backend.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "dcomp/png_io.hpp"

namespace dcomp {

using nlohmann::json;

namespace {

std::string base64(const std::uint8_t* data, std::size_t len) {
    static constexpr char table[] =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (std::size_t i = 0; i < len; i += 3) {
        const std::uint32_t b0 = data[i];
        const std::uint32_t b1 = i + 1 < len ? data[i + 1] : 0;
        const std::uint32_t b2 = i + 2 < len ? data[i + 2] : 0;
        const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
        out += table[(triple >> 18) & 0x3F];
        out += table[(triple >> 12) & 0x3F];
        out += i + 1 < len ? table[(triple >> 6) & 0x3F] : '=';
        out += i + 2 < len ? table[triple & 0x3F] : '=';
    }
    return out;
}

json image_part(const Raster& raster) {
    const auto bytes = png::encode(raster);
    return json{{"type", "image_url"},
                {"image_url",
                 {{"url", "data:image/png;base64," + base64(bytes.data(), bytes.size())}}}};
}

/// Interleaves text and image parts following the <image> placeholders.
json content_parts(const std::string& text, const std::vector<ImageSlot>& images) {
    json parts = json::array();
    std::size_t pos = 0, img = 0;
    const std::string token = "<image>";
    while (true) {
        const std::size_t at = text.find(token, pos);
        const std::string chunk =
            at == std::string::npos ? text.substr(pos) : text.substr(pos, at - pos);
        if (!chunk.empty()) parts.push_back({{"type", "text"}, {"text", chunk}});
        if (at == std::string::npos) break;
        if (img < images.size() && images[img].image)
            parts.push_back(image_part(*images[img].image));
        ++img;
        pos = at + token.size();
    }
    return parts;
}

} // namespace

RemoteChatBackend::RemoteChatBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key) api_key_ = key;
    if (cfg_.require_api_key && api_key_.empty())
        throw BackendError("configuration: environment variable " + cfg_.api_key_env +
                           " is not set");
}

std::unique_ptr<Backend> RemoteChatBackend::with_seed(std::uint64_t seed) const {
    RemoteConfig cfg = cfg_;
    cfg.seed = seed;
    return std::make_unique<RemoteChatBackend>(cfg);
}

std::string RemoteChatBackend::post(const std::string& body_json) {
    for (int attempt = 0;; ++attempt) {
        httplib::Client client(cfg_.base_url);
        client.set_connection_timeout(cfg_.timeout_seconds);
        client.set_read_timeout(cfg_.timeout_seconds);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(cfg_.path, headers, body_json, "application/json");

        const bool transport_error = !res;
        const bool retryable_status = res && (res->status == 429 || res->status >= 500);
        if (!transport_error && !retryable_status) {
            if (res->status != 200)
                throw BackendError("remote returned HTTP " + std::to_string(res->status) +
                                   ": " + res->body);
            return res->body;
        }
        if (attempt >= cfg_.transport_retries)
            throw BackendError(transport_error
                                   ? "remote unreachable at " + cfg_.base_url
                                   : "remote kept failing with HTTP " +
                                         std::to_string(res->status));
        const double sleep_s = cfg_.backoff_initial_seconds * (1 << attempt);
        std::this_thread::sleep_for(std::chrono::duration<double>(sleep_s));
    }
}

std::string RemoteChatBackend::respond(const Conversation& so_far) {
    json messages = json::array();
    for (const Turn& turn : so_far.turns) {
        messages.push_back({{"role", "user"}, {"content", content_parts(turn.human, turn.images)}});
        if (!turn.assistant.empty())
            messages.push_back({{"role", "assistant"}, {"content", turn.assistant}});
    }
    json body = {{"model", cfg_.model},
                 {"temperature", cfg_.temperature},
                 {"top_p", cfg_.top_p},
                 {"messages", std::move(messages)}};
    if (cfg_.seed) body["seed"] = *cfg_.seed;

    const std::string response = post(body.dump());
    json parsed;
    try {
        parsed = json::parse(response);
    } catch (const json::exception& e) {
        throw BackendError(std::string("remote sent unparseable JSON: ") + e.what());
    }
    try {
        const json& content = parsed.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
        if (content.is_array()) {
            std::string text;
            for (const json& part : content)
                if (part.value("type", "") == "text") text += part.value("text", "");
            return text;
        }
    } catch (const json::exception&) {
    }
    throw BackendError("remote response missing choices[0].message.content");
}

std::string RemoteChatBackend::complete_prompt(const LabelingPrompt& prompt) {
    json body = {{"model", cfg_.model},
                 {"temperature", cfg_.temperature},
                 {"top_p", cfg_.top_p},
                 {"messages",
                  json::array({{{"role", "user"},
                                {"content", content_parts(prompt.text, prompt.images)}}})}};
    const std::string response = post(body.dump());
    json parsed;
    try {
        parsed = json::parse(response);
        const json& content = parsed.at("choices").at(0).at("message").at("content");
        if (content.is_string()) return content.get<std::string>();
    } catch (const json::exception& e) {
        throw BackendError(std::string("remote label response malformed: ") + e.what());
    }
    throw BackendError("remote label response missing content");
}

RemoteLabelFn make_remote_labeler(std::shared_ptr<RemoteChatBackend> backend) {
    return [backend](const LabelingPrompt& prompt) { return backend->complete_prompt(prompt); };
}

} // namespace dcomp
