// remote_backend.hpp
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "dcomp/composer.hpp"
#include "dcomp/planner.hpp"

namespace dcomp {

struct RemoteConfig {
    std::string base_url = "http://127.0.0.1:8080";
    std::string path = "/v1/chat/completions";
    std::string model = "default";
    std::string api_key_env = "OPENAI_API_KEY";
    bool require_api_key = true;
    double temperature = 0.7;
    double top_p = 0.95;
    int transport_retries = 3;          // exponential backoff on transport errors
    double backoff_initial_seconds = 0.5;
    int timeout_seconds = 120;
    std::optional<std::uint64_t> seed;  // forwarded when the server supports it
};

/// OpenAI-compatible chat-completions client. Conversation turns map to
/// user/assistant messages; human text is split at <image> tokens and the
/// bound rasters attach as base64 PNG image parts. The API key is read
/// from the configured environment variable, never from flags or files.
class RemoteChatBackend : public Backend {
public:
    explicit RemoteChatBackend(RemoteConfig cfg);

    BackendCapabilities capabilities() const override { return {false, true}; }
    std::string respond(const Conversation& so_far) override;
    std::unique_ptr<Backend> with_seed(std::uint64_t seed) const override;

    /// One-shot completion for the element-labeling prompt.
    std::string complete_prompt(const LabelingPrompt& prompt);

    const RemoteConfig& config() const { return cfg_; }

private:
    std::string post(const std::string& body_json);

    RemoteConfig cfg_;
    std::string api_key_;
};

/// Adapter for the planner's remote mode.
RemoteLabelFn make_remote_labeler(std::shared_ptr<RemoteChatBackend> backend);

} // namespace dcomp
