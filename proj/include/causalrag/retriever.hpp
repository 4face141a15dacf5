#pragma once

#include <map>
#include <string>
#include <vector>

#include "causalrag/gateway.hpp"
#include "causalrag/graph.hpp"
#include "causalrag/indexer.hpp"

namespace causalrag {

struct RetrievalParams {
    int k = 3;  // seed nodes matched to the query
    int s = 3;  // expansion hops along the base graph
};

void validate(const RetrievalParams& params);  // ContractError

struct SeedMatch {
    NodeId id;
    double score = 0.0;
};

struct RetrievedSubgraph {
    std::vector<SeedMatch> seeds;    // top_k order: descending score, ascending id
    std::map<NodeId, int> frontier;  // node -> minimum hop distance from any seed
    KnowledgeGraph subgraph;
    RetrievalParams params;
    std::vector<std::string> warnings;
};

struct ChunkMatch {
    std::string segment_id;
    std::string text;
    double score = 0.0;
};

struct ChunkContext {
    std::vector<ChunkMatch> chunks;  // scores non-increasing
};

// Embeds the query once, seeds the k nearest graph nodes, expands s hops and
// materializes the induced subgraph. Deterministic given deterministic
// embeddings.
RetrievedSubgraph retrieve_causal_context(const std::string& query, const LoadedIndex& index,
                                          RetrievalParams params, Gateway& gateway);

// Regular-RAG baseline: top-k segments by cosine similarity alone.
ChunkContext retrieve_baseline(const std::string& query, const LoadedIndex& index, int k,
                               Gateway& gateway);

}  // namespace causalrag
