#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace causalrag {

using EmbeddingVector = std::vector<float>;

// dot(a, b) / (|a|·|b|), accumulated in double. ContractError on dimension
// mismatch, DegenerateInputError when either vector has zero norm.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

enum class EntryKind { Node, Chunk };

std::string_view to_string(EntryKind kind);
EntryKind entry_kind_from_string(std::string_view s);

struct IndexEntry {
    std::string key;
    EntryKind kind = EntryKind::Node;
    EmbeddingVector vector;

    bool operator==(const IndexEntry&) const = default;
};

struct ScoredKey {
    std::string key;
    double score = 0.0;

    bool operator==(const ScoredKey&) const = default;
};

// Exact exhaustive-scan cosine-similarity store over node and chunk vectors.
// Append-only while indexing (single writer), then frozen; queries are
// read-only and safe under concurrent readers.
class VectorIndex {
public:
    VectorIndex() = default;
    explicit VectorIndex(int dim);

    // Rejects dimension mismatches, zero vectors and duplicate keys per kind.
    void add(std::string key, EntryKind kind, EmbeddingVector vector);

    // The min(k, matching entries) best matches by descending cosine
    // similarity; ties broken by ascending key. Deterministic.
    std::vector<ScoredKey> top_k(const EmbeddingVector& query, int k, EntryKind kind) const;

    int dim() const { return dim_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t count(EntryKind kind) const;
    const std::vector<IndexEntry>& entries() const { return entries_; }

    bool operator==(const VectorIndex&) const = default;

private:
    int dim_ = 0;
    std::vector<IndexEntry> entries_;
    std::set<std::pair<EntryKind, std::string>> keys_;  // uniqueness per kind
};

}  // namespace causalrag
