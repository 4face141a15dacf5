#pragma once

#include <filesystem>
#include <string>

#include "causalrag/gateway.hpp"
#include "causalrag/indexer.hpp"
#include "causalrag/retriever.hpp"

namespace causalrag {

// Operator configuration: defaults, overridden by the config file, overridden
// by command-line flags.
struct AppConfig {
    GatewayConfig gateway;
    RetrievalParams retrieval;  // k = 3, s = 3
    std::string response_type = "multiple paragraphs";
    SegmentationConfig segmentation;
    struct Paths {
        std::string index_root = "index";
        std::string dataset;
        std::string report_out;
    } paths;

    static AppConfig from_file(const std::filesystem::path& path);
    void apply_json_text(const std::string& json_text);
};

}  // namespace causalrag
