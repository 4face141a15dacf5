#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "causalrag/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "causalrag/digest.hpp"
#include "causalrag/errors.hpp"
#include "causalrag/json.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

std::string_view to_string(GatewayMode mode) {
    return mode == GatewayMode::Live ? "live" : "mock";
}

GatewayMode gateway_mode_from_string(std::string_view s) {
    if (s == "live") return GatewayMode::Live;
    if (s == "mock") return GatewayMode::Mock;
    throw FormatError("unknown gateway mode: " + std::string(s));
}

// ---------------------------------------------------------------- MockScript

MockScript MockScript::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("mock script not found: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

MockScript MockScript::from_json_text(const std::string& json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw FormatError(std::string("mock script is not valid JSON: ") + e.what());
    }
    MockScript script;
    if (doc.contains("fallback")) script.set_fallback(doc.at("fallback").get<std::string>());
    for (const auto& entry : doc.value("entries", Json::array())) {
        const TemplateId id = template_id_from_string(entry.at("template").get<std::string>());
        const std::string response = entry.at("response").get<std::string>();
        if (entry.contains("digest")) {
            script.add_exact(id, entry.at("digest").get<std::string>(), response);
        } else if (entry.contains("contains")) {
            script.add_contains(id, entry.at("contains").get<std::string>(), response);
        } else {
            script.add_default(id, response);
        }
    }
    return script;
}

void MockScript::add_exact(TemplateId id, std::string digest_hex, std::string response) {
    entries_.push_back(Entry{id, std::move(digest_hex), std::nullopt, std::move(response)});
}

void MockScript::add_contains(TemplateId id, std::string needle, std::string response) {
    entries_.push_back(Entry{id, std::nullopt, std::move(needle), std::move(response)});
}

void MockScript::add_default(TemplateId id, std::string response) {
    entries_.push_back(Entry{id, std::nullopt, std::nullopt, std::move(response)});
}

void MockScript::set_fallback(std::string response) { fallback_ = std::move(response); }

std::optional<std::string> MockScript::lookup(TemplateId id,
                                              const std::string& rendered_prompt) const {
    const std::string digest = sha256_hex(rendered_prompt);
    for (const Entry& e : entries_) {
        if (e.id == id && e.digest && *e.digest == digest) return e.response;
    }
    for (const Entry& e : entries_) {
        if (e.id == id && e.contains && rendered_prompt.find(*e.contains) != std::string::npos)
            return e.response;
    }
    for (const Entry& e : entries_) {
        if (e.id == id && !e.digest && !e.contains) return e.response;
    }
    return fallback_;
}

// ----------------------------------------------------------- mock embeddings

namespace {

// Adds `weight` times a unit vector whose direction is a pure function of
// `seed_text`. mt19937_64 output is pinned by the standard, so the direction
// is identical on every platform.
void add_hash_direction(const std::string& seed_text, double weight, std::vector<double>& acc) {
    const auto digest = sha256_bytes(seed_text);
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) seed |= static_cast<std::uint64_t>(digest[i]) << (8 * i);
    std::mt19937_64 rng(seed);
    std::vector<double> v(acc.size());
    double norm2 = 0.0;
    for (auto& x : v) {
        // top 53 bits -> [0, 1) -> [-1, 1)
        x = static_cast<double>(rng() >> 11) * (2.0 / 9007199254740992.0) - 1.0;
        norm2 += x * x;
    }
    const double scale = weight / std::sqrt(norm2);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i] * scale;
}

}  // namespace

EmbeddingVector mock_embedding(const std::string& text, int dim) {
    if (dim <= 0) throw ContractError("embedding dimension must be positive");
    std::vector<double> acc(static_cast<std::size_t>(dim), 0.0);
    add_hash_direction("text\x1f" + text, 0.25, acc);
    for (const auto& token : text::tokenize(text)) add_hash_direction("tok\x1f" + token, 1.0, acc);
    double norm2 = 0.0;
    for (double x : acc) norm2 += x * x;
    const double scale = 1.0 / std::sqrt(norm2);  // > 0: the text direction is always present
    EmbeddingVector out(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) out[static_cast<std::size_t>(i)] = static_cast<float>(acc[static_cast<std::size_t>(i)] * scale);
    return out;
}

// ------------------------------------------------------------ConcurrencyGate

class Gateway::ConcurrencyGate {
public:
    explicit ConcurrencyGate(int limit) : limit_(limit > 0 ? limit : 1) {}

    class Guard {
    public:
        explicit Guard(ConcurrencyGate& gate) : gate_(&gate) { gate_->acquire(); }
        ~Guard() { gate_->release(); }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        ConcurrencyGate* gate_;
    };

    int max_seen() {
        std::lock_guard<std::mutex> lock(mutex_);
        return max_seen_;
    }

private:
    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] { return in_flight_ < limit_; });
        ++in_flight_;
        if (in_flight_ > max_seen_) max_seen_ = in_flight_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            --in_flight_;
        }
        cv_.notify_one();
    }

    std::mutex mutex_;
    std::condition_variable cv_;
    const int limit_;
    int in_flight_ = 0;
    int max_seen_ = 0;
};

// -------------------------------------------------------------------- Gateway

Gateway::Gateway(GatewayConfig config) : config_(std::move(config)) {
    if (config_.embedding_dim <= 0) throw ContractError("embedding dimension must be positive");
    gate_ = std::make_unique<ConcurrencyGate>(config_.max_concurrent);
    if (config_.mode == GatewayMode::Mock && !config_.mock_script_path.empty())
        script_ = MockScript::from_file(config_.mock_script_path);
}

Gateway::Gateway(GatewayConfig config, MockScript script) : Gateway(std::move(config)) {
    script_ = std::move(script);
}

Gateway::~Gateway() = default;

int Gateway::completion_calls_for(TemplateId id) const {
    return calls_by_template_[static_cast<std::size_t>(id)].load();
}

int Gateway::max_in_flight() const { return gate_->max_seen(); }

std::string Gateway::render_and_complete(TemplateId id, const Bindings& bindings) {
    return complete(id, render_template(id, bindings));
}

std::string Gateway::complete(TemplateId id, const std::string& rendered_prompt) {
    ConcurrencyGate::Guard guard(*gate_);
    completion_calls_.fetch_add(1);
    calls_by_template_[static_cast<std::size_t>(id)].fetch_add(1);
    if (config_.mode == GatewayMode::Mock) {
        auto response = script_.lookup(id, rendered_prompt);
        if (!response)
            throw MockMissError("mock miss for template " + std::string(to_string(id)) +
                                " (prompt digest " + sha256_hex(rendered_prompt) + ")");
        return *response;
    }
    return live_complete(rendered_prompt);
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) throw ContractError("embed requires a non-empty text list");
    ConcurrencyGate::Guard guard(*gate_);
    embedding_calls_.fetch_add(1);
    embedded_texts_.fetch_add(static_cast<int>(texts.size()));
    if (config_.mode == GatewayMode::Mock) {
        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        for (const auto& t : texts) out.push_back(mock_embedding(t, config_.embedding_dim));
        return out;
    }
    return live_embed(texts);
}

// ------------------------------------------------------------ live transport

namespace {

struct ParsedEndpoint {
    std::string host;  // scheme://host[:port]
    std::string base_path;
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw ContractError("endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    ParsedEndpoint parsed;
    if (path_start == std::string::npos) {
        parsed.host = endpoint;
    } else {
        parsed.host = endpoint.substr(0, path_start);
        parsed.base_path = endpoint.substr(path_start);
        while (!parsed.base_path.empty() && parsed.base_path.back() == '/')
            parsed.base_path.pop_back();
    }
    return parsed;
}

bool is_transient_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

}  // namespace

std::string Gateway::api_key() const {
    const char* key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
        throw AuthError("API key environment variable is not set: " + config_.api_key_env);
    return key;
}

namespace {

// Runs one HTTP POST per attempt with exponential backoff on transient
// failures; returns the parsed body of the first successful response.
Json post_with_retries(const GatewayConfig& config, const std::string& path, const Json& payload,
                       const std::string& key) {
    const ParsedEndpoint endpoint = parse_endpoint(config.endpoint);
    httplib::Client client(endpoint.host);
    const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
    client.set_connection_timeout(timeout_s.count() > 0 ? timeout_s : std::chrono::seconds(1));
    client.set_read_timeout(timeout_s.count() > 0 ? timeout_s : std::chrono::seconds(1));
    client.set_bearer_token_auth(key);

    const std::string body = payload.dump();
    std::string last_failure;
    auto backoff = config.initial_backoff;
    const int attempts = config.max_retries + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(backoff);
            backoff = std::min(backoff * 2, std::chrono::milliseconds(4000));
        }
        auto result = client.Post(endpoint.base_path + path, body, "application/json");
        if (!result) {
            last_failure = "connection failure (" + httplib::to_string(result.error()) + ")";
            continue;
        }
        if (result->status == 200) {
            try {
                return Json::parse(result->body);
            } catch (const Json::parse_error& e) {
                throw ProtocolError(std::string("provider returned invalid JSON: ") + e.what());
            }
        }
        if (result->status == 401 || result->status == 403)
            throw AuthError("provider rejected credentials (HTTP " +
                            std::to_string(result->status) + ")");
        if (!is_transient_status(result->status))
            throw ProtocolError("provider returned HTTP " + std::to_string(result->status) + ": " +
                                result->body);
        last_failure = "HTTP " + std::to_string(result->status);
    }
    throw TransportError("transport failed after " + std::to_string(attempts) +
                         " attempt(s): " + last_failure);
}

}  // namespace

std::string Gateway::live_complete(const std::string& prompt) {
    Json payload = {
        {"model", config_.model},
        {"messages", Json::array({Json{{"role", "user"}, {"content", prompt}}})},
        {"max_tokens", config_.max_completion_tokens},
        {"temperature", 0},
    };
    const Json response = post_with_retries(config_, "/chat/completions", payload, api_key());
    try {
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const Json::exception&) {
        throw ProtocolError("chat completion response missing choices[0].message.content");
    }
}

std::vector<EmbeddingVector> Gateway::live_embed(const std::vector<std::string>& texts) {
    Json payload = {
        {"model", config_.embedding_model},
        {"input", texts},
    };
    const Json response = post_with_retries(config_, "/embeddings", payload, api_key());
    std::vector<EmbeddingVector> out(texts.size());
    try {
        const auto& data = response.at("data");
        if (data.size() != texts.size())
            throw ProtocolError("embedding response count mismatch: expected " +
                                std::to_string(texts.size()) + ", got " +
                                std::to_string(data.size()));
        for (const auto& item : data) {
            const auto index = item.at("index").get<std::size_t>();
            if (index >= out.size()) throw ProtocolError("embedding response index out of range");
            EmbeddingVector vec = item.at("embedding").get<EmbeddingVector>();
            if (static_cast<int>(vec.size()) != config_.embedding_dim)
                throw ProtocolError("embedding dimension " + std::to_string(vec.size()) +
                                    " does not match configured dimension " +
                                    std::to_string(config_.embedding_dim));
            out[index] = std::move(vec);
        }
    } catch (const Json::exception&) {
        throw ProtocolError("embedding response missing data[].embedding");
    }
    return out;
}

}  // namespace causalrag
