#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "causalrag/gateway.hpp"
#include "causalrag/graph.hpp"
#include "causalrag/indexer.hpp"
#include "causalrag/retriever.hpp"

namespace causalrag {

struct CausalPath {
    std::vector<NodeId> nodes;           // length >= 2
    std::vector<std::string> relations;  // one per hop
    std::vector<bool> inferred;          // per hop: no backing edge in the subgraph
    std::string rationale;
};

struct CausalReport {
    std::vector<CausalPath> paths;
    std::set<NodeId> refined_nodes;  // union of the kept paths' nodes
    std::string narrative;
    int hallucination_warnings = 0;  // paths dropped for naming nodes outside the subgraph
    int parse_warnings = 0;
};

struct CausalSummary {
    std::string text;
    std::vector<int> source_paths;  // 1-based indices into the report's paths
};

struct Answer {
    std::string text;
    std::string prompt_digest;  // sha256 of the final rendered prompt
    CausalSummary summary;
    CausalReport report;
    RetrievedSubgraph retrieval;
};

// Fixed summary text for a report with no causal paths.
inline constexpr std::string_view kNoCausalEvidenceSummary = "no causal evidence found";

// Deterministic textual serialization of a subgraph for the causal_discovery
// prompt's network-data section.
std::string serialize_graph_data(const KnowledgeGraph& graph);

// Numbered paths plus narrative, the causal_summary prompt's report section.
std::string serialize_report(const CausalReport& report);

// Asks the model for a causality analysis report over the retrieved subgraph
// and parses it. Paths naming nodes outside the subgraph are dropped and
// counted; an unparseable report is re-prompted once, then fails.
CausalReport discover_causal_paths(const RetrievedSubgraph& retrieved, Gateway& gateway);

CausalSummary summarize_causal(const CausalReport& report, const std::string& query,
                               const std::string& response_type, Gateway& gateway);

// Full query-time pipeline: retrieve, discover, summarize, generate.
Answer answer_query(const std::string& query, const LoadedIndex& index, RetrievalParams params,
                    const std::string& response_type, Gateway& gateway);

// Same pipeline from an already retrieved subgraph.
Answer answer_from_subgraph(const std::string& query, RetrievedSubgraph retrieved,
                            const std::string& response_type, Gateway& gateway);

}  // namespace causalrag
