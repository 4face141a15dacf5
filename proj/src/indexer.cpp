#include "causalrag/indexer.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "causalrag/digest.hpp"
#include "causalrag/errors.hpp"
#include "causalrag/json.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

namespace fs = std::filesystem;

// ------------------------------------------------------------------ documents

Document load_document(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw NotFoundError("cannot read document: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    Document doc;
    doc.id = file.stem().string();
    doc.text = buf.str();
    if (text::trim(doc.text).empty()) throw ContractError("document is empty: " + file.string());
    for (const auto& line : text::lines_of(doc.text)) {
        const std::string trimmed = text::trim(line);
        if (!trimmed.empty()) {
            doc.title = trimmed.substr(0, 120);
            break;
        }
    }
    doc.meta.token_count = text::approx_token_count(doc.text);
    return doc;
}

std::vector<Document> load_corpus(const fs::path& file_or_dir) {
    if (!fs::exists(file_or_dir))
        throw NotFoundError("input does not exist: " + file_or_dir.string());
    if (fs::is_regular_file(file_or_dir)) return {load_document(file_or_dir)};

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(file_or_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw NotFoundError("no documents (*.txt) found in: " + file_or_dir.string());
    std::vector<Document> docs;
    docs.reserve(files.size());
    for (const auto& f : files) docs.push_back(load_document(f));
    return docs;
}

// --------------------------------------------------------------- segmentation

namespace {

constexpr std::size_t kSentenceLookback = 200;

bool is_sentence_cut(const std::string& t, std::size_t pos) {
    // a cut directly after '\n', or after '.', '!' or '?' followed by space
    const char before = t[pos - 1];
    if (before == '\n') return true;
    if (before == '.' || before == '!' || before == '?') {
        return pos == t.size() || t[pos] == ' ' || t[pos] == '\n' || t[pos] == '\t';
    }
    return false;
}

bool is_utf8_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

std::string segment_id_for(const std::string& doc_id, int ordinal) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%04d", ordinal);
    return doc_id + buf;
}

}  // namespace

std::vector<Segment> segment_document(const Document& doc, const SegmentationConfig& config) {
    if (config.overlap_chars < 0) throw ContractError("overlap_chars must be non-negative");
    if (config.max_chars <= config.overlap_chars)
        throw ContractError("max_chars must exceed overlap_chars");

    const std::string& t = doc.text;
    const auto n = t.size();
    const auto max_chars = static_cast<std::size_t>(config.max_chars);
    const auto overlap = static_cast<std::size_t>(config.overlap_chars);

    std::vector<Segment> segments;
    std::size_t start = 0;
    int ordinal = 0;
    while (true) {
        std::size_t end = std::min(start + max_chars, n);
        if (end < n) {
            // every candidate cut must leave room for the next segment to advance
            const std::size_t min_cut = start + overlap + 1;
            std::size_t window_lo = std::max(min_cut, end > kSentenceLookback ? end - kSentenceLookback : min_cut);
            std::size_t cut = 0;
            for (std::size_t p = end; p > window_lo; --p) {
                if (is_sentence_cut(t, p)) {
                    cut = p;
                    break;
                }
            }
            if (cut != 0) {
                end = cut;
            } else {
                while (end > min_cut && is_utf8_continuation(t[end])) --end;
            }
        }
        segments.push_back(Segment{segment_id_for(doc.id, ordinal), doc.id,
                                   t.substr(start, end - start), ordinal});
        if (end == n) break;
        start = end - overlap;
        ++ordinal;
    }
    return segments;
}

std::string reconstruct_document(const std::vector<Segment>& segments, int overlap_chars) {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string& text = segments[i].text;
        if (i == 0) {
            out += text;
        } else {
            out += text.substr(std::min(text.size(), static_cast<std::size_t>(overlap_chars)));
        }
    }
    return out;
}

// ----------------------------------------------------------------- extraction

ExtractionResult extract_graph(const std::vector<Segment>& segments, Gateway& gateway) {
    if (segments.empty()) throw ContractError("extract_graph requires at least one segment");

    ExtractionResult result;
    std::size_t unparseable = 0;
    for (const Segment& segment : segments) {
        const std::string response =
            gateway.render_and_complete(TemplateId::GraphExtraction, {{"input_text", segment.text}});
        if (text::trim(response).empty()) {
            result.warnings.push_back("segment " + segment.id + ": empty extraction response");
            continue;
        }
        bool parsed_any = false;
        for (const std::string& raw_line : text::lines_of(response)) {
            const std::string line = text::trim(raw_line);
            if (line.empty()) continue;
            std::vector<std::string> fields = text::split(line, '|');
            for (auto& f : fields) f = text::trim(f);
            const bool all_non_empty =
                std::all_of(fields.begin(), fields.end(), [](const auto& f) { return !f.empty(); });
            if (fields.size() == 3 && all_non_empty) {
                if (NodeId::from_label(fields[0]) == NodeId::from_label(fields[2])) {
                    result.warnings.push_back("segment " + segment.id +
                                              ": self-loop triple skipped: " + line);
                    continue;
                }
                result.graph.add_edge(fields[0], fields[2], fields[1], segment.id);
                parsed_any = true;
            } else if (fields.size() == 2 && all_non_empty) {
                result.graph.upsert_node(fields[0], fields[1], segment.id);
                parsed_any = true;
            } else {
                result.warnings.push_back("segment " + segment.id +
                                          ": malformed extraction line skipped: " + line);
            }
        }
        if (!parsed_any) {
            ++unparseable;
            result.warnings.push_back("segment " + segment.id + ": unparseable extraction response");
        }
    }
    if (unparseable == segments.size())
        throw ExtractionFailedError("graph extraction failed for every segment");
    return result;
}

// ---------------------------------------------------------------- persistence

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kGraphFile = "graph.json";
constexpr const char* kVectorsFile = "vectors.json";
constexpr const char* kSegmentsFile = "segments.json";

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ContractError("cannot write file: " + path.string());
    out << content;
    if (!out) throw ContractError("failed writing file: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json graph_to_json(const KnowledgeGraph& graph) {
    Json nodes = Json::array();
    for (const auto& [id, node] : graph.nodes()) {
        nodes.push_back(Json{{"id", id.value},
                             {"label", node.label},
                             {"description", node.description},
                             {"source_segments", node.source_segments}});
    }
    Json edges = Json::array();
    for (const auto& [key, edge] : graph.edges()) {
        edges.push_back(Json{{"source", edge.source.value},
                             {"target", edge.target.value},
                             {"relation", edge.relation},
                             {"source_segments", edge.source_segments}});
    }
    return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

KnowledgeGraph graph_from_json(const Json& doc) {
    KnowledgeGraph graph;
    for (const auto& n : doc.at("nodes")) {
        GraphNode node;
        node.id = NodeId{n.at("id").get<std::string>()};
        node.label = n.at("label").get<std::string>();
        node.description = n.at("description").get<std::string>();
        node.source_segments = n.at("source_segments").get<std::vector<std::string>>();
        graph.restore_node(std::move(node));
    }
    for (const auto& e : doc.at("edges")) {
        GraphEdge edge;
        edge.source = NodeId{e.at("source").get<std::string>()};
        edge.target = NodeId{e.at("target").get<std::string>()};
        edge.relation = e.at("relation").get<std::string>();
        edge.source_segments = e.at("source_segments").get<std::vector<std::string>>();
        graph.restore_edge(std::move(edge));
    }
    return graph;
}

Json vectors_to_json(const VectorIndex& vectors) {
    Json entries = Json::array();
    for (const IndexEntry& e : vectors.entries()) {
        entries.push_back(
            Json{{"key", e.key}, {"kind", std::string(to_string(e.kind))}, {"values", e.vector}});
    }
    return Json{{"dim", vectors.dim()}, {"entries", std::move(entries)}};
}

VectorIndex vectors_from_json(const Json& doc) {
    VectorIndex vectors(doc.at("dim").get<int>());
    for (const auto& e : doc.at("entries")) {
        vectors.add(e.at("key").get<std::string>(),
                    entry_kind_from_string(e.at("kind").get<std::string>()),
                    e.at("values").get<EmbeddingVector>());
    }
    return vectors;
}

Json manifest_to_json(const IndexManifest& m) {
    return Json{{"version", m.version},
                {"embedding_dim", m.embedding_dim},
                {"document_ids", m.document_ids},
                {"graph_checksum", m.graph_checksum},
                {"digest_algorithm", m.digest_algorithm},
                {"segment_max_chars", m.segment_max_chars},
                {"segment_overlap_chars", m.segment_overlap_chars},
                {"created_at", m.created_at}};
}

IndexManifest manifest_from_json(const Json& doc) {
    IndexManifest m;
    m.version = doc.at("version").get<int>();
    m.embedding_dim = doc.at("embedding_dim").get<int>();
    m.document_ids = doc.at("document_ids").get<std::vector<std::string>>();
    m.graph_checksum = doc.at("graph_checksum").get<std::string>();
    m.digest_algorithm = doc.at("digest_algorithm").get<std::string>();
    m.segment_max_chars = doc.at("segment_max_chars").get<int>();
    m.segment_overlap_chars = doc.at("segment_overlap_chars").get<int>();
    m.created_at = doc.at("created_at").get<std::string>();
    return m;
}

Json parse_json_file(const fs::path& path) {
    try {
        return Json::parse(read_file(path));
    } catch (const Json::parse_error& e) {
        throw CorruptionError(path.string() + " is not valid JSON: " + e.what());
    }
}

}  // namespace

std::string make_timestamp() {
    std::time_t now = std::time(nullptr);
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long value = std::strtoll(epoch, &end, 10);
        if (end != epoch) now = static_cast<std::time_t>(value);
    }
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

const Segment* LoadedIndex::find_segment(std::string_view id) const {
    for (const Segment& s : segments) {
        if (s.id == id) return &s;
    }
    return nullptr;
}

void save_index(const fs::path& dir, IndexManifest manifest, const KnowledgeGraph& graph,
                const VectorIndex& vectors, const Document& document,
                const std::vector<Segment>& segments) {
    fs::create_directories(dir);
    const std::string graph_bytes = graph_to_json(graph).dump(2) + "\n";
    manifest.graph_checksum = sha256_hex(graph_bytes);
    write_file(dir / kGraphFile, graph_bytes);
    write_file(dir / kVectorsFile, vectors_to_json(vectors).dump(2) + "\n");

    Json segs = Json::array();
    for (const Segment& s : segments) {
        segs.push_back(Json{{"id", s.id}, {"ordinal", s.ordinal}, {"text", s.text}});
    }
    Json seg_doc = Json{{"document",
                         Json{{"id", document.id},
                              {"title", document.title},
                              {"text", document.text},
                              {"meta",
                               Json{{"domain", document.meta.domain},
                                    {"token_count", document.meta.token_count}}}}},
                        {"segments", std::move(segs)}};
    write_file(dir / kSegmentsFile, seg_doc.dump(2) + "\n");
    write_file(dir / kManifestFile, manifest_to_json(manifest).dump(2) + "\n");
}

LoadedIndex load_index(const fs::path& dir) {
    if (!fs::exists(dir / kManifestFile))
        throw NotFoundError("no index manifest at: " + dir.string());

    LoadedIndex index;
    index.manifest = manifest_from_json(parse_json_file(dir / kManifestFile));
    if (index.manifest.version != kIndexFormatVersion)
        throw FormatError("incompatible index format version " +
                          std::to_string(index.manifest.version) + " (expected " +
                          std::to_string(kIndexFormatVersion) + ")");

    const std::string graph_bytes = read_file(dir / kGraphFile);
    if (sha256_hex(graph_bytes) != index.manifest.graph_checksum)
        throw CorruptionError("graph checksum mismatch in " + dir.string());
    Json graph_doc;
    try {
        graph_doc = Json::parse(graph_bytes);
    } catch (const Json::parse_error& e) {
        throw CorruptionError("graph file is not valid JSON: " + std::string(e.what()));
    }
    index.graph = graph_from_json(graph_doc);

    const Json vec_doc = parse_json_file(dir / kVectorsFile);
    try {
        index.vectors = vectors_from_json(vec_doc);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw CorruptionError("vectors file malformed: " + std::string(e.what()));
    }
    if (index.vectors.dim() != index.manifest.embedding_dim)
        throw FormatError("vector dimension " + std::to_string(index.vectors.dim()) +
                          " does not match manifest embedding_dim " +
                          std::to_string(index.manifest.embedding_dim));

    const Json seg_doc = parse_json_file(dir / kSegmentsFile);
    const auto& d = seg_doc.at("document");
    index.document.id = d.at("id").get<std::string>();
    index.document.title = d.at("title").get<std::string>();
    index.document.text = d.at("text").get<std::string>();
    index.document.meta.domain = d.at("meta").at("domain").get<std::string>();
    index.document.meta.token_count = d.at("meta").at("token_count").get<int>();
    for (const auto& s : seg_doc.at("segments")) {
        index.segments.push_back(Segment{s.at("id").get<std::string>(), index.document.id,
                                         s.at("text").get<std::string>(),
                                         s.at("ordinal").get<int>()});
    }

    // structural invariants: node <-> entry correspondence per kind
    std::size_t node_entries = 0;
    std::size_t chunk_entries = 0;
    for (const IndexEntry& e : index.vectors.entries()) {
        if (e.kind == EntryKind::Node) {
            ++node_entries;
            if (!index.graph.contains(NodeId{e.key}))
                throw CorruptionError("vector entry for unknown node: " + e.key);
        } else {
            ++chunk_entries;
            if (index.find_segment(e.key) == nullptr)
                throw CorruptionError("vector entry for unknown segment: " + e.key);
        }
    }
    if (node_entries != index.graph.node_count())
        throw CorruptionError("node embedding count " + std::to_string(node_entries) +
                              " does not match graph node count " +
                              std::to_string(index.graph.node_count()));
    if (chunk_entries != index.segments.size())
        throw CorruptionError("chunk embedding count " + std::to_string(chunk_entries) +
                              " does not match segment count " +
                              std::to_string(index.segments.size()));
    return index;
}

BuildResult build_index(const Document& doc, const SegmentationConfig& config, Gateway& gateway,
                        const fs::path& out_root) {
    const fs::path dir = out_root / doc.id;
    try {
        const std::vector<Segment> segments = segment_document(doc, config);
        ExtractionResult extraction = extract_graph(segments, gateway);

        VectorIndex vectors(gateway.config().embedding_dim);
        if (!extraction.graph.empty()) {
            std::vector<std::string> node_texts;
            std::vector<const GraphNode*> node_order;
            for (const auto& [id, node] : extraction.graph.nodes()) {
                node_order.push_back(&node);
                node_texts.push_back(node.description.empty()
                                         ? node.label
                                         : node.label + ": " + node.description);
            }
            const auto node_vecs = gateway.embed(node_texts);
            for (std::size_t i = 0; i < node_order.size(); ++i)
                vectors.add(node_order[i]->id.value, EntryKind::Node, node_vecs[i]);
        }
        std::vector<std::string> chunk_texts;
        for (const Segment& s : segments) chunk_texts.push_back(s.text);
        const auto chunk_vecs = gateway.embed(chunk_texts);
        for (std::size_t i = 0; i < segments.size(); ++i)
            vectors.add(segments[i].id, EntryKind::Chunk, chunk_vecs[i]);

        IndexManifest manifest;
        manifest.embedding_dim = gateway.config().embedding_dim;
        manifest.document_ids = {doc.id};
        manifest.segment_max_chars = config.max_chars;
        manifest.segment_overlap_chars = config.overlap_chars;
        manifest.created_at = make_timestamp();
        save_index(dir, manifest, extraction.graph, vectors, doc, segments);

        return BuildResult{dir, static_cast<int>(extraction.graph.node_count()),
                           static_cast<int>(extraction.graph.edge_count()),
                           static_cast<int>(segments.size()), std::move(extraction.warnings)};
    } catch (...) {
        std::error_code ec;
        fs::remove_all(dir, ec);
        throw;
    }
}

}  // namespace causalrag
