#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "causalrag/embedding.hpp"
#include "causalrag/gateway.hpp"
#include "causalrag/graph.hpp"

namespace causalrag {

struct DocumentMeta {
    std::string domain;
    int token_count = 0;  // approximate, whitespace tokenization

    bool operator==(const DocumentMeta&) const = default;
};

struct Document {
    std::string id;
    std::string title;
    std::string text;
    DocumentMeta meta;

    bool operator==(const Document&) const = default;
};

struct Segment {
    std::string id;
    std::string document_id;
    std::string text;
    int ordinal = 0;

    bool operator==(const Segment&) const = default;
};

inline constexpr int kIndexFormatVersion = 1;

struct IndexManifest {
    int version = kIndexFormatVersion;
    int embedding_dim = 0;
    std::vector<std::string> document_ids;
    std::string graph_checksum;  // hex digest of the graph file bytes
    std::string digest_algorithm = "sha256";
    int segment_max_chars = 0;
    int segment_overlap_chars = 0;
    std::string created_at;  // ISO-8601 UTC; honors SOURCE_DATE_EPOCH

    bool operator==(const IndexManifest&) const = default;
};

struct SegmentationConfig {
    int max_chars = 1200;
    int overlap_chars = 100;
};

Document load_document(const std::filesystem::path& file);

// A single file, or every *.txt file of a directory in filename order.
std::vector<Document> load_corpus(const std::filesystem::path& file_or_dir);

// Covers the text in order with segments of at most max_chars, consecutive
// segments sharing exactly overlap_chars characters; split points prefer
// sentence boundaries within a lookback window.
std::vector<Segment> segment_document(const Document& doc, const SegmentationConfig& config);

// De-overlapped concatenation; exact inverse of segment_document.
std::string reconstruct_document(const std::vector<Segment>& segments, int overlap_chars);

struct ExtractionResult {
    KnowledgeGraph graph;
    std::vector<std::string> warnings;
};

// Per segment: renders graph_extraction, parses "entity | relation | entity"
// triples (and "entity | description" lines), canonicalizes and merges nodes
// across segments. Malformed lines are skipped and counted; a segment whose
// non-empty response has no parseable line is a warning, and extraction fails
// only when every segment is unparseable that way.
ExtractionResult extract_graph(const std::vector<Segment>& segments, Gateway& gateway);

struct LoadedIndex {
    IndexManifest manifest;
    KnowledgeGraph graph;
    VectorIndex vectors;
    Document document;
    std::vector<Segment> segments;

    const Segment* find_segment(std::string_view id) const;
};

struct BuildResult {
    std::filesystem::path dir;
    int nodes = 0;
    int edges = 0;
    int segments = 0;
    std::vector<std::string> warnings;
};

// Offline pipeline: segment, extract, embed every node ("label: description")
// and segment text, persist under out_root/<doc.id>/. Deterministic and
// idempotent in mock mode. A partially written directory is removed on
// failure.
BuildResult build_index(const Document& doc, const SegmentationConfig& config, Gateway& gateway,
                        const std::filesystem::path& out_root);

void save_index(const std::filesystem::path& dir, IndexManifest manifest,
                const KnowledgeGraph& graph, const VectorIndex& vectors, const Document& document,
                const std::vector<Segment>& segments);

// Verifies the manifest version and graph checksum and every structural
// invariant before returning.
LoadedIndex load_index(const std::filesystem::path& dir);

std::string make_timestamp();  // ISO-8601 UTC, honoring SOURCE_DATE_EPOCH

}  // namespace causalrag
