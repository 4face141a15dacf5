#include "causalrag/retriever.hpp"

#include <set>

#include "causalrag/errors.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

void validate(const RetrievalParams& params) {
    if (params.k < 1) throw ContractError("retrieval parameter k must be >= 1");
    if (params.s < 0) throw ContractError("retrieval parameter s must be >= 0");
}

RetrievedSubgraph retrieve_causal_context(const std::string& query, const LoadedIndex& index,
                                          RetrievalParams params, Gateway& gateway) {
    validate(params);
    if (text::trim(query).empty()) throw ContractError("query is empty");
    if (index.graph.empty())
        throw EmptyIndexError("index has no graph nodes: " + index.document.id);

    RetrievedSubgraph result;
    result.params = params;
    if (static_cast<std::size_t>(params.k) > index.graph.node_count())
        result.warnings.push_back("graph has fewer than k nodes; all " +
                                  std::to_string(index.graph.node_count()) +
                                  " nodes become seeds");

    const EmbeddingVector query_vec = gateway.embed({query}).front();
    for (const ScoredKey& match : index.vectors.top_k(query_vec, params.k, EntryKind::Node))
        result.seeds.push_back(SeedMatch{NodeId{match.key}, match.score});

    std::set<NodeId> seed_ids;
    for (const SeedMatch& seed : result.seeds) seed_ids.insert(seed.id);
    result.frontier = index.graph.expand_hops(seed_ids, params.s);

    std::set<NodeId> frontier_ids;
    for (const auto& [id, dist] : result.frontier) frontier_ids.insert(id);
    result.subgraph = index.graph.induced_subgraph(frontier_ids);
    return result;
}

ChunkContext retrieve_baseline(const std::string& query, const LoadedIndex& index, int k,
                               Gateway& gateway) {
    if (k < 1) throw ContractError("retrieval parameter k must be >= 1");
    if (text::trim(query).empty()) throw ContractError("query is empty");
    if (index.vectors.count(EntryKind::Chunk) == 0)
        throw EmptyIndexError("index has no chunk vectors: " + index.document.id);

    const EmbeddingVector query_vec = gateway.embed({query}).front();
    ChunkContext context;
    for (const ScoredKey& match : index.vectors.top_k(query_vec, k, EntryKind::Chunk)) {
        const Segment* segment = index.find_segment(match.key);
        if (segment == nullptr)
            throw CorruptionError("chunk vector without segment text: " + match.key);
        context.chunks.push_back(ChunkMatch{match.key, segment->text, match.score});
    }
    return context;
}

}  // namespace causalrag
