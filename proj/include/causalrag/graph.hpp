#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace causalrag {

// Canonicalized entity identifier: trimmed, case-folded, whitespace-collapsed
// label. Totally ordered; the order is used for tie-breaking everywhere.
struct NodeId {
    std::string value;

    static NodeId from_label(std::string_view label);
    auto operator<=>(const NodeId&) const = default;
};

struct GraphNode {
    NodeId id;
    std::string label;        // display form of the first mention
    std::string description;  // merged from all mentions; may be empty
    std::vector<std::string> source_segments;  // sorted, unique

    bool operator==(const GraphNode&) const = default;
};

struct GraphEdge {
    NodeId source;
    NodeId target;
    std::string relation;
    std::vector<std::string> source_segments;  // sorted, unique

    bool operator==(const GraphEdge&) const = default;
};

using EdgeKey = std::tuple<NodeId, NodeId, std::string>;

// Entity/relation graph extracted from text. Single-writer while it is being
// built; read-only afterwards and safe under concurrent readers.
class KnowledgeGraph {
public:
    // Inserts or merges a node. Merging keeps the first display label,
    // concatenates new descriptions with "; " and unions source segments.
    NodeId upsert_node(std::string_view label, std::string_view description = {},
                       std::string_view segment_id = {});

    // Adds a directed edge, upserting both endpoints. Duplicate
    // (source, target, relation) triples merge their source segments.
    void add_edge(std::string_view source_label, std::string_view target_label,
                  std::string_view relation, std::string_view segment_id = {});

    // Strict insertion used when deserializing: payload copied verbatim.
    void restore_node(GraphNode node);
    void restore_edge(GraphEdge edge);

    bool contains(const NodeId& id) const;
    const GraphNode& node_at(const NodeId& id) const;  // NotFoundError

    // All nodes connected to `id` by an edge in either direction.
    std::set<NodeId> neighbors(const NodeId& id) const;  // NotFoundError

    bool adjacent(const NodeId& a, const NodeId& b) const;

    // Every node within `max_hops` undirected steps of any seed, annotated
    // with its minimum hop distance; seeds are at distance 0.
    std::map<NodeId, int> expand_hops(const std::set<NodeId>& seeds, int max_hops) const;

    // The subgraph on exactly `keep` with every edge whose endpoints both
    // remain; payloads copied unmodified.
    KnowledgeGraph induced_subgraph(const std::set<NodeId>& keep) const;

    const std::map<NodeId, GraphNode>& nodes() const { return nodes_; }
    const std::map<EdgeKey, GraphEdge>& edges() const { return edges_; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return nodes_.empty(); }

    bool operator==(const KnowledgeGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    void require_node(const NodeId& id) const;
    void link(const NodeId& a, const NodeId& b);

    std::map<NodeId, GraphNode> nodes_;
    std::map<EdgeKey, GraphEdge> edges_;
    std::map<NodeId, std::set<NodeId>> adjacency_;  // undirected closure of edges_
};

}  // namespace causalrag
