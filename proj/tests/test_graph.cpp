#include <doctest.h>

#include "causalrag/errors.hpp"
#include "causalrag/graph.hpp"
#include "helpers.hpp"

using namespace causalrag;

namespace {

KnowledgeGraph path_graph(const std::vector<std::string>& labels) {
    KnowledgeGraph g;
    for (const auto& label : labels) g.upsert_node(label);
    for (std::size_t i = 0; i + 1 < labels.size(); ++i)
        g.add_edge(labels[i], labels[i + 1], "next");
    return g;
}

NodeId id(const std::string& label) { return NodeId::from_label(label); }

}  // namespace

TEST_CASE("neighbors on a path graph") {
    KnowledgeGraph g = path_graph({"a", "b", "c"});
    CHECK(g.neighbors(id("b")) == std::set<NodeId>{id("a"), id("c")});
    CHECK(g.neighbors(id("a")) == std::set<NodeId>{id("b")});
}

TEST_CASE("neighbors of an isolated node is empty") {
    KnowledgeGraph g;
    g.upsert_node("x");
    CHECK(g.neighbors(id("x")).empty());
}

TEST_CASE("neighbors of an unknown node fails") {
    KnowledgeGraph g = path_graph({"a", "b"});
    CHECK_THROWS_AS(g.neighbors(id("zz")), NotFoundError);
}

TEST_CASE("neighbors equals a brute-force edge-list scan on random graphs") {
    std::mt19937 rng(1234);
    for (int round = 0; round < 25; ++round) {
        KnowledgeGraph g = testutil::random_graph(rng, 20, 40);
        for (const auto& [node_id, node] : g.nodes()) {
            std::set<NodeId> expected;
            for (const auto& [key, edge] : g.edges()) {
                if (edge.source == node_id) expected.insert(edge.target);
                if (edge.target == node_id) expected.insert(edge.source);
            }
            CHECK(g.neighbors(node_id) == expected);
        }
    }
}

TEST_CASE("expand_hops on a path graph") {
    KnowledgeGraph g = path_graph({"a", "b", "c", "d"});

    SUBCASE("single seed, s=2") {
        auto result = g.expand_hops({id("a")}, 2);
        CHECK(result == std::map<NodeId, int>{{id("a"), 0}, {id("b"), 1}, {id("c"), 2}});
    }
    SUBCASE("two seeds merge with minimum distance") {
        auto result = g.expand_hops({id("a"), id("d")}, 1);
        CHECK(result ==
              std::map<NodeId, int>{{id("a"), 0}, {id("b"), 1}, {id("c"), 1}, {id("d"), 0}});
    }
    SUBCASE("s=0 returns exactly the seeds") {
        auto result = g.expand_hops({id("b"), id("c")}, 0);
        CHECK(result == std::map<NodeId, int>{{id("b"), 0}, {id("c"), 0}});
    }
    SUBCASE("unknown seed fails") {
        CHECK_THROWS_AS(g.expand_hops({id("zz")}, 1), NotFoundError);
    }
    SUBCASE("negative hop count violates the contract") {
        CHECK_THROWS_AS(g.expand_hops({id("a")}, -1), ContractError);
    }
}

TEST_CASE("expand_hops equals brute-force reachability on random graphs") {
    std::mt19937 rng(99);
    for (int round = 0; round < 40; ++round) {
        KnowledgeGraph g = testutil::random_graph(rng, 50, 120);
        const auto seeds = testutil::random_seeds(rng, g, 4);
        for (int s = 0; s <= 4; ++s) {
            CHECK(g.expand_hops(seeds, s) == testutil::expand_oracle(g, seeds, s));
        }
    }
}

TEST_CASE("expand_hops is monotone in s and in seeds") {
    std::mt19937 rng(7);
    for (int round = 0; round < 20; ++round) {
        KnowledgeGraph g = testutil::random_graph(rng, 30, 60);
        const auto seeds = testutil::random_seeds(rng, g, 4);

        auto previous = g.expand_hops(seeds, 0);
        for (int s = 1; s <= 4; ++s) {
            auto current = g.expand_hops(seeds, s);
            for (const auto& [node_id, dist] : previous) {
                REQUIRE(current.count(node_id) == 1);
                CHECK(current.at(node_id) == dist);  // distances agree on the intersection
            }
            previous = std::move(current);
        }

        std::set<NodeId> fewer = seeds;
        fewer.erase(fewer.begin());
        if (!fewer.empty()) {
            auto small = g.expand_hops(fewer, 3);
            auto large = g.expand_hops(seeds, 3);
            for (const auto& [node_id, dist] : small) CHECK(large.count(node_id) == 1);
        }
    }
}

TEST_CASE("induced_subgraph") {
    KnowledgeGraph g;
    g.add_edge("a", "b", "r1");
    g.add_edge("b", "c", "r2");
    g.add_edge("c", "a", "r3");

    SUBCASE("all nodes is the identity") {
        auto sub = g.induced_subgraph({id("a"), id("b"), id("c")});
        CHECK(sub == g);
    }
    SUBCASE("empty set gives the empty graph") {
        auto sub = g.induced_subgraph({});
        CHECK(sub.empty());
        CHECK(sub.edge_count() == 0);
    }
    SUBCASE("triangle restricted to two nodes keeps one edge") {
        auto sub = g.induced_subgraph({id("a"), id("b")});
        CHECK(sub.node_count() == 2);
        REQUIRE(sub.edge_count() == 1);
        const auto& edge = sub.edges().begin()->second;
        CHECK(edge.source == id("a"));
        CHECK(edge.target == id("b"));
        CHECK(edge.relation == "r1");
    }
    SUBCASE("unknown node fails") {
        CHECK_THROWS_AS(g.induced_subgraph({id("zz")}), NotFoundError);
    }
    SUBCASE("idempotent") {
        const std::set<NodeId> keep{id("a"), id("c")};
        auto once = g.induced_subgraph(keep);
        auto twice = once.induced_subgraph(keep);
        CHECK(once == twice);
    }
}

TEST_CASE("node merging unions descriptions and source segments") {
    KnowledgeGraph g;
    g.upsert_node("Buyer Attention", "what buyers look at", "seg1");
    g.upsert_node("buyer  attention", "focus during a pitch", "seg2");
    g.upsert_node("BUYER ATTENTION", "", "seg2");

    REQUIRE(g.node_count() == 1);
    const GraphNode& node = g.node_at(id("buyer attention"));
    CHECK(node.label == "Buyer Attention");
    CHECK(node.description == "what buyers look at; focus during a pitch");
    CHECK(node.source_segments == std::vector<std::string>{"seg1", "seg2"});
}

TEST_CASE("duplicate edges are stored once") {
    KnowledgeGraph g;
    g.add_edge("a", "b", "causes", "seg1");
    g.add_edge("A ", "b", "causes", "seg2");
    g.add_edge("a", "b", "enables", "seg1");
    CHECK(g.edge_count() == 2);
    const GraphEdge& edge = g.edges().begin()->second;
    CHECK(edge.source_segments == std::vector<std::string>{"seg1", "seg2"});
}

TEST_CASE("self-loops are rejected") {
    KnowledgeGraph g;
    CHECK_THROWS_AS(g.add_edge("a", "A", "loops"), ContractError);
}

TEST_CASE("empty canonical labels are rejected") {
    KnowledgeGraph g;
    CHECK_THROWS_AS(g.upsert_node("   "), ContractError);
}
