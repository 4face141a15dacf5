#include "causalrag/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "causalrag/errors.hpp"

namespace causalrag {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.size() != b.size())
        throw ContractError("cosine similarity dimension mismatch: " + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()));
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a[i];
        const double y = b[i];
        dot += x * y;
        norm_a += x * x;
        norm_b += y * y;
    }
    if (norm_a == 0.0 || norm_b == 0.0)
        throw DegenerateInputError("cosine similarity of a zero-norm vector");
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

std::string_view to_string(EntryKind kind) {
    return kind == EntryKind::Node ? "node" : "chunk";
}

EntryKind entry_kind_from_string(std::string_view s) {
    if (s == "node") return EntryKind::Node;
    if (s == "chunk") return EntryKind::Chunk;
    throw FormatError("unknown vector entry kind: " + std::string(s));
}

VectorIndex::VectorIndex(int dim) : dim_(dim) {
    if (dim <= 0) throw ContractError("vector index dimension must be positive");
}

void VectorIndex::add(std::string key, EntryKind kind, EmbeddingVector vector) {
    if (dim_ <= 0) throw ContractError("vector index dimension not set");
    if (static_cast<int>(vector.size()) != dim_)
        throw ContractError("vector dimension " + std::to_string(vector.size()) +
                            " does not match index dimension " + std::to_string(dim_));
    if (key.empty()) throw ContractError("vector entry key is empty");
    if (std::all_of(vector.begin(), vector.end(), [](float v) { return v == 0.0f; }))
        throw DegenerateInputError("vector entry has zero norm: " + key);
    if (!keys_.emplace(kind, key).second)
        throw ContractError("duplicate vector entry key: " + key);
    entries_.push_back(IndexEntry{std::move(key), kind, std::move(vector)});
}

std::vector<ScoredKey> VectorIndex::top_k(const EmbeddingVector& query, int k,
                                          EntryKind kind) const {
    if (k < 0) throw ContractError("top_k requires k >= 0");
    if (static_cast<int>(query.size()) != dim_)
        throw ContractError("query dimension " + std::to_string(query.size()) +
                            " does not match index dimension " + std::to_string(dim_));
    std::vector<ScoredKey> scored;
    for (const IndexEntry& e : entries_) {
        if (e.kind != kind) continue;
        scored.push_back(ScoredKey{e.key, cosine_similarity(query, e.vector)});
    }
    std::sort(scored.begin(), scored.end(), [](const ScoredKey& a, const ScoredKey& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.key < b.key;
    });
    if (static_cast<int>(scored.size()) > k) scored.resize(static_cast<std::size_t>(k));
    return scored;
}

std::size_t VectorIndex::count(EntryKind kind) const {
    return static_cast<std::size_t>(std::count_if(
        entries_.begin(), entries_.end(), [kind](const IndexEntry& e) { return e.kind == kind; }));
}

}  // namespace causalrag
