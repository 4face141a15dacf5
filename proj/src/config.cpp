#include "causalrag/config.hpp"

#include <fstream>
#include <sstream>

#include "causalrag/errors.hpp"
#include "causalrag/json.hpp"

namespace causalrag {

AppConfig AppConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    AppConfig config;
    config.apply_json_text(buf.str());
    return config;
}

void AppConfig::apply_json_text(const std::string& json_text) {
    Json doc;
    try {
        doc = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw FormatError("config file is not valid JSON: " + std::string(e.what()));
    }
    if (doc.contains("gateway")) {
        const auto& g = doc.at("gateway");
        if (g.contains("endpoint")) gateway.endpoint = g.at("endpoint").get<std::string>();
        if (g.contains("model")) gateway.model = g.at("model").get<std::string>();
        if (g.contains("embedding_model"))
            gateway.embedding_model = g.at("embedding_model").get<std::string>();
        if (g.contains("api_key_env")) gateway.api_key_env = g.at("api_key_env").get<std::string>();
        if (g.contains("max_retries")) gateway.max_retries = g.at("max_retries").get<int>();
        if (g.contains("timeout_ms"))
            gateway.timeout = std::chrono::milliseconds(g.at("timeout_ms").get<int>());
        if (g.contains("initial_backoff_ms"))
            gateway.initial_backoff = std::chrono::milliseconds(g.at("initial_backoff_ms").get<int>());
        if (g.contains("mode")) gateway.mode = gateway_mode_from_string(g.at("mode").get<std::string>());
        if (g.contains("max_completion_tokens"))
            gateway.max_completion_tokens = g.at("max_completion_tokens").get<int>();
        if (g.contains("max_concurrent")) gateway.max_concurrent = g.at("max_concurrent").get<int>();
        if (g.contains("mock_script")) gateway.mock_script_path = g.at("mock_script").get<std::string>();
    }
    if (doc.contains("embedding_dim")) gateway.embedding_dim = doc.at("embedding_dim").get<int>();
    if (doc.contains("retrieval")) {
        const auto& r = doc.at("retrieval");
        if (r.contains("k")) retrieval.k = r.at("k").get<int>();
        if (r.contains("s")) retrieval.s = r.at("s").get<int>();
    }
    if (doc.contains("response_type")) response_type = doc.at("response_type").get<std::string>();
    if (doc.contains("segmentation")) {
        const auto& s = doc.at("segmentation");
        if (s.contains("max_chars")) segmentation.max_chars = s.at("max_chars").get<int>();
        if (s.contains("overlap_chars")) segmentation.overlap_chars = s.at("overlap_chars").get<int>();
    }
    if (doc.contains("paths")) {
        const auto& p = doc.at("paths");
        if (p.contains("index_root")) paths.index_root = p.at("index_root").get<std::string>();
        if (p.contains("dataset")) paths.dataset = p.at("dataset").get<std::string>();
        if (p.contains("report_out")) paths.report_out = p.at("report_out").get<std::string>();
    }
}

}  // namespace causalrag
