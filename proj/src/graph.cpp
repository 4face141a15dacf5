#include "causalrag/graph.hpp"

#include <algorithm>
#include <deque>

#include "causalrag/errors.hpp"
#include "causalrag/text_util.hpp"

namespace causalrag {

namespace {

void insert_sorted_unique(std::vector<std::string>& values, std::string_view value) {
    if (value.empty()) return;
    auto it = std::lower_bound(values.begin(), values.end(), value);
    if (it == values.end() || *it != value) values.insert(it, std::string(value));
}

}  // namespace

NodeId NodeId::from_label(std::string_view label) { return NodeId{text::canonical(label)}; }

NodeId KnowledgeGraph::upsert_node(std::string_view label, std::string_view description,
                                   std::string_view segment_id) {
    NodeId id = NodeId::from_label(label);
    if (id.value.empty()) throw ContractError("node label is empty after canonicalization");

    auto [it, inserted] = nodes_.try_emplace(id);
    GraphNode& node = it->second;
    if (inserted) {
        node.id = id;
        node.label = text::collapse_whitespace(label);
    }
    const std::string desc = text::trim(description);
    if (!desc.empty()) {
        if (node.description.empty()) {
            node.description = desc;
        } else if (node.description.find(desc) == std::string::npos) {
            node.description += "; " + desc;
        }
    }
    insert_sorted_unique(node.source_segments, segment_id);
    return id;
}

void KnowledgeGraph::add_edge(std::string_view source_label, std::string_view target_label,
                              std::string_view relation, std::string_view segment_id) {
    NodeId source = upsert_node(source_label, {}, segment_id);
    NodeId target = upsert_node(target_label, {}, segment_id);
    if (source == target) throw ContractError("edge endpoints are the same node: " + source.value);

    EdgeKey key{source, target, text::trim(relation)};
    auto [it, inserted] = edges_.try_emplace(key);
    GraphEdge& edge = it->second;
    if (inserted) {
        edge.source = source;
        edge.target = target;
        edge.relation = std::get<2>(key);
    }
    insert_sorted_unique(edge.source_segments, segment_id);
    link(source, target);
}

void KnowledgeGraph::restore_node(GraphNode node) {
    if (node.id.value.empty()) throw FormatError("graph node with empty id");
    if (node.label.empty()) throw FormatError("graph node with empty label: " + node.id.value);
    if (!nodes_.try_emplace(node.id, node).second)
        throw FormatError("duplicate graph node: " + node.id.value);
}

void KnowledgeGraph::restore_edge(GraphEdge edge) {
    if (!contains(edge.source) || !contains(edge.target))
        throw FormatError("graph edge with dangling endpoint: " + edge.source.value + " -> " +
                          edge.target.value);
    if (edge.source == edge.target)
        throw FormatError("graph edge is a self-loop: " + edge.source.value);
    EdgeKey key{edge.source, edge.target, edge.relation};
    NodeId source = edge.source;
    NodeId target = edge.target;
    if (!edges_.try_emplace(key, std::move(edge)).second)
        throw FormatError("duplicate graph edge: " + source.value + " -> " + target.value);
    link(source, target);
}

bool KnowledgeGraph::contains(const NodeId& id) const { return nodes_.count(id) > 0; }

const GraphNode& KnowledgeGraph::node_at(const NodeId& id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) throw NotFoundError("unknown node: " + id.value);
    return it->second;
}

void KnowledgeGraph::require_node(const NodeId& id) const {
    if (!contains(id)) throw NotFoundError("unknown node: " + id.value);
}

void KnowledgeGraph::link(const NodeId& a, const NodeId& b) {
    adjacency_[a].insert(b);
    adjacency_[b].insert(a);
}

std::set<NodeId> KnowledgeGraph::neighbors(const NodeId& id) const {
    require_node(id);
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) return {};
    return it->second;
}

bool KnowledgeGraph::adjacent(const NodeId& a, const NodeId& b) const {
    auto it = adjacency_.find(a);
    return it != adjacency_.end() && it->second.count(b) > 0;
}

std::map<NodeId, int> KnowledgeGraph::expand_hops(const std::set<NodeId>& seeds,
                                                  int max_hops) const {
    if (max_hops < 0) throw ContractError("hop count must be non-negative");
    std::map<NodeId, int> distance;
    std::deque<NodeId> queue;
    for (const NodeId& seed : seeds) {
        require_node(seed);
        distance.emplace(seed, 0);
        queue.push_back(seed);
    }
    while (!queue.empty()) {
        NodeId current = queue.front();
        queue.pop_front();
        const int d = distance.at(current);
        if (d == max_hops) continue;
        auto it = adjacency_.find(current);
        if (it == adjacency_.end()) continue;
        for (const NodeId& next : it->second) {
            if (distance.emplace(next, d + 1).second) queue.push_back(next);
        }
    }
    return distance;
}

KnowledgeGraph KnowledgeGraph::induced_subgraph(const std::set<NodeId>& keep) const {
    KnowledgeGraph out;
    for (const NodeId& id : keep) {
        require_node(id);
        out.nodes_.emplace(id, nodes_.at(id));
    }
    for (const auto& [key, edge] : edges_) {
        if (keep.count(edge.source) > 0 && keep.count(edge.target) > 0) {
            out.edges_.emplace(key, edge);
            out.link(edge.source, edge.target);
        }
    }
    return out;
}

}  // namespace causalrag
