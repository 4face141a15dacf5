#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "causalrag/embedding.hpp"
#include "causalrag/prompts.hpp"

namespace causalrag {

enum class GatewayMode { Live, Mock };

std::string_view to_string(GatewayMode mode);
GatewayMode gateway_mode_from_string(std::string_view s);

struct GatewayConfig {
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-4o-mini";
    std::string embedding_model = "all-MiniLM-L6-v2";
    std::string api_key_env = "OPENAI_API_KEY";
    int max_retries = 3;  // retries after the first attempt, transient failures only
    std::chrono::milliseconds timeout{30000};
    std::chrono::milliseconds initial_backoff{250};  // doubles per retry, capped at 4s
    GatewayMode mode = GatewayMode::Live;
    int embedding_dim = 384;
    int max_completion_tokens = 4096;
    int max_concurrent = 4;  // bound on in-flight provider calls
    std::string mock_script_path;
};

// Deterministic scripted responses for mock mode. An entry matches a call by
// template id plus, in precedence order: exact digest of the rendered prompt,
// a substring of the rendered prompt, or any prompt of that template.
// Identical rendered prompts always replay the identical response.
class MockScript {
public:
    MockScript() = default;

    static MockScript from_file(const std::filesystem::path& path);
    static MockScript from_json_text(const std::string& json_text);

    void add_exact(TemplateId id, std::string prompt_digest_hex, std::string response);
    void add_contains(TemplateId id, std::string needle, std::string response);
    void add_default(TemplateId id, std::string response);
    void set_fallback(std::string response);

    std::optional<std::string> lookup(TemplateId id, const std::string& rendered_prompt) const;
    bool empty() const { return entries_.empty() && !fallback_.has_value(); }

private:
    struct Entry {
        TemplateId id;
        std::optional<std::string> digest;    // hex sha256 of the rendered prompt
        std::optional<std::string> contains;  // substring of the rendered prompt
        std::string response;
    };
    std::vector<Entry> entries_;
    std::optional<std::string> fallback_;
};

// Deterministic, platform-stable mock embedding: a normalized bag of seeded
// hash directions per token plus a low-weight whole-text direction, so texts
// sharing words land near each other and distinct texts never collide.
EmbeddingVector mock_embedding(const std::string& text, int dim);

// Single abstraction over all LLM and embedding calls: an OpenAI-compatible
// HTTP provider in live mode, a scripted replay in mock mode. Shareable
// across threads; in-flight provider calls are bounded by max_concurrent.
class Gateway {
public:
    explicit Gateway(GatewayConfig config);
    Gateway(GatewayConfig config, MockScript script);
    ~Gateway();

    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    std::string complete(TemplateId id, const std::string& rendered_prompt);
    std::string render_and_complete(TemplateId id, const Bindings& bindings);

    // One vector per input text, all of the configured dimension.
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

    const GatewayConfig& config() const { return config_; }

    // Call accounting, used by tests and provenance.
    int completion_calls() const { return completion_calls_.load(); }
    int embedding_calls() const { return embedding_calls_.load(); }
    int embedded_texts() const { return embedded_texts_.load(); }
    int completion_calls_for(TemplateId id) const;
    int max_in_flight() const;

private:
    class ConcurrencyGate;

    std::string live_complete(const std::string& prompt);
    std::vector<EmbeddingVector> live_embed(const std::vector<std::string>& texts);
    std::string api_key() const;  // AuthError when the env variable is unset

    GatewayConfig config_;
    MockScript script_;
    std::unique_ptr<ConcurrencyGate> gate_;
    std::atomic<int> completion_calls_{0};
    std::atomic<int> embedding_calls_{0};
    std::atomic<int> embedded_texts_{0};
    std::array<std::atomic<int>, kTemplateCount> calls_by_template_{};
};

}  // namespace causalrag
