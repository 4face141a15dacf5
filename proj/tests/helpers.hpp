#pragma once

// Shared test helpers: independent oracles, random fixtures, temp dirs and a
// subprocess runner for CLI tests. Oracles stay deliberately naive and
// separate from the library implementations they check.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "causalrag/embedding.hpp"
#include "causalrag/gateway.hpp"
#include "causalrag/graph.hpp"
#include "causalrag/indexer.hpp"

namespace testutil {

// ------------------------------------------------------------------- oracles

// Shortest hop distances by exhaustive edge relaxation (Bellman-Ford style),
// independent of the BFS in the library.
inline std::map<causalrag::NodeId, int> expand_oracle(const causalrag::KnowledgeGraph& graph,
                                                      const std::set<causalrag::NodeId>& seeds,
                                                      int max_hops) {
    constexpr int kInf = 1 << 20;
    std::map<causalrag::NodeId, int> dist;
    for (const auto& [id, node] : graph.nodes()) dist[id] = kInf;
    for (const auto& seed : seeds) dist[seed] = 0;
    for (std::size_t round = 0; round < graph.node_count(); ++round) {
        bool changed = false;
        for (const auto& [key, edge] : graph.edges()) {
            const int ds = dist[edge.source];
            const int dt = dist[edge.target];
            if (ds + 1 < dt) {
                dist[edge.target] = ds + 1;
                changed = true;
            }
            if (dt + 1 < ds) {
                dist[edge.source] = dt + 1;
                changed = true;
            }
        }
        if (!changed) break;
    }
    std::map<causalrag::NodeId, int> result;
    for (const auto& [id, d] : dist) {
        if (d <= max_hops) result[id] = d;
    }
    return result;
}

// Full sort over every matching entry, the top_k oracle.
inline std::vector<causalrag::ScoredKey> top_k_oracle(const causalrag::VectorIndex& index,
                                                      const causalrag::EmbeddingVector& query,
                                                      int k, causalrag::EntryKind kind) {
    std::vector<causalrag::ScoredKey> all;
    for (const auto& entry : index.entries()) {
        if (entry.kind != kind) continue;
        all.push_back({entry.key, causalrag::cosine_similarity(query, entry.vector)});
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.key < b.key;
    });
    if (static_cast<int>(all.size()) > k) all.resize(static_cast<std::size_t>(k));
    return all;
}

// ---------------------------------------------------------- random fixtures

inline causalrag::KnowledgeGraph random_graph(std::mt19937& rng, int max_nodes, int max_edges) {
    causalrag::KnowledgeGraph graph;
    std::uniform_int_distribution<int> node_count(1, max_nodes);
    const int n = node_count(rng);
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) {
        labels.push_back("node " + std::to_string(i));
        graph.upsert_node(labels.back(), "", "seg");
    }
    if (n < 2) return graph;
    std::uniform_int_distribution<int> edge_count(0, max_edges);
    std::uniform_int_distribution<int> pick(0, n - 1);
    const int m = edge_count(rng);
    for (int i = 0; i < m; ++i) {
        const int a = pick(rng);
        const int b = pick(rng);
        if (a == b) continue;
        graph.add_edge(labels[static_cast<std::size_t>(a)], labels[static_cast<std::size_t>(b)],
                       "rel" + std::to_string(i % 3), "seg");
    }
    return graph;
}

inline std::set<causalrag::NodeId> random_seeds(std::mt19937& rng,
                                                const causalrag::KnowledgeGraph& graph,
                                                int max_seeds) {
    std::vector<causalrag::NodeId> ids;
    for (const auto& [id, node] : graph.nodes()) ids.push_back(id);
    std::uniform_int_distribution<int> count(1, std::min<int>(max_seeds, static_cast<int>(ids.size())));
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    std::set<causalrag::NodeId> seeds;
    const int want = count(rng);
    while (static_cast<int>(seeds.size()) < want) seeds.insert(ids[pick(rng)]);
    return seeds;
}

// --------------------------------------------------------------------- misc

inline causalrag::GatewayConfig mock_config(int dim = 32) {
    causalrag::GatewayConfig config;
    config.mode = causalrag::GatewayMode::Mock;
    config.embedding_dim = dim;
    return config;
}

struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               ("causalrag_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

inline std::string shell_quote(const std::string& arg) {
    std::string quoted = "'";
    for (char c : arg) {
        if (c == '\'')
            quoted += "'\\''";
        else
            quoted += c;
    }
    quoted += "'";
    return quoted;
}

// Runs the CLI with SOURCE_DATE_EPOCH pinned; stderr is discarded.
inline CommandResult run_cli(const std::vector<std::string>& args) {
    std::string command = "SOURCE_DATE_EPOCH=0 " + shell_quote(CAUSALRAG_CLI_PATH);
    for (const auto& arg : args) command += " " + shell_quote(arg);
    command += " 2>/dev/null";
    FILE* pipe = popen(command.c_str(), "r");
    CommandResult result;
    if (pipe == nullptr) return result;
    char buffer[4096];
    std::size_t n = 0;
    while ((n = fread(buffer, 1, sizeof(buffer), pipe)) > 0) result.output.append(buffer, n);
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline std::filesystem::path fixtures_dir() { return CAUSALRAG_FIXTURES_DIR; }

}  // namespace testutil
