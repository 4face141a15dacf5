#include <doctest.h>

#include <random>

#include "causalrag/embedding.hpp"
#include "causalrag/errors.hpp"
#include "helpers.hpp"

using namespace causalrag;

TEST_CASE("cosine similarity basics") {
    CHECK(cosine_similarity({1.0f, 0.0f}, {1.0f, 0.0f}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cosine_similarity({1.0f, 0.0f}, {0.0f, 1.0f}) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(cosine_similarity({1.0f, 2.0f, 2.0f}, {2.0f, 1.0f, 2.0f}) ==
          doctest::Approx(8.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("cosine similarity errors") {
    CHECK_THROWS_AS(cosine_similarity({1.0f, 0.0f}, {1.0f, 0.0f, 0.0f}), ContractError);
    CHECK_THROWS_AS(cosine_similarity({0.0f, 0.0f}, {1.0f, 0.0f}), DegenerateInputError);
}

TEST_CASE("cosine similarity is invariant under positive scaling") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<float> value(-1.0f, 1.0f);
    std::uniform_real_distribution<float> scale(0.1f, 50.0f);
    for (int round = 0; round < 50; ++round) {
        EmbeddingVector a(16);
        for (auto& x : a) x = value(rng);
        if (cosine_similarity(a, a) != 1.0) {}  // also ensures non-zero norm
        const float c = scale(rng);
        EmbeddingVector b(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) b[i] = c * a[i];
        CHECK(cosine_similarity(a, b) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

namespace {

VectorIndex random_index(std::mt19937& rng, int entries, int dim, EntryKind kind) {
    VectorIndex index(dim);
    std::uniform_real_distribution<float> value(-1.0f, 1.0f);
    for (int i = 0; i < entries; ++i) {
        EmbeddingVector v(static_cast<std::size_t>(dim));
        for (auto& x : v) x = value(rng);
        v[0] += 0.01f;  // keep away from the zero vector
        char key[16];
        std::snprintf(key, sizeof(key), "k%04d", i);
        index.add(key, kind, v);
    }
    return index;
}

}  // namespace

TEST_CASE("top_k basics") {
    VectorIndex index(2);
    index.add("a", EntryKind::Node, {1.0f, 0.0f});
    index.add("b", EntryKind::Node, {0.0f, 1.0f});
    index.add("c", EntryKind::Node, {1.0f, 1.0f});
    index.add("chunk0", EntryKind::Chunk, {1.0f, 0.0f});
    const EmbeddingVector query{1.0f, 0.0f};

    SUBCASE("k = 0 yields an empty list") { CHECK(index.top_k(query, 0, EntryKind::Node).empty()); }
    SUBCASE("k beyond the entry count yields everything sorted") {
        auto result = index.top_k(query, 10, EntryKind::Node);
        REQUIRE(result.size() == 3);
        CHECK(result[0].key == "a");
        CHECK(result[1].key == "c");
        CHECK(result[2].key == "b");
    }
    SUBCASE("kind filter applies") {
        auto result = index.top_k(query, 10, EntryKind::Chunk);
        REQUIRE(result.size() == 1);
        CHECK(result[0].key == "chunk0");
    }
    SUBCASE("dimension mismatch violates the contract") {
        CHECK_THROWS_AS(index.top_k({1.0f, 0.0f, 0.0f}, 1, EntryKind::Node), ContractError);
        CHECK_THROWS_AS(index.top_k(query, -1, EntryKind::Node), ContractError);
    }
}

TEST_CASE("top_k ties break by ascending key") {
    VectorIndex index(2);
    index.add("zebra", EntryKind::Node, {2.0f, 0.0f});
    index.add("apple", EntryKind::Node, {1.0f, 0.0f});
    index.add("mango", EntryKind::Node, {3.0f, 0.0f});
    auto result = index.top_k({1.0f, 0.0f}, 3, EntryKind::Node);  // all score exactly 1.0
    REQUIRE(result.size() == 3);
    CHECK(result[0].key == "apple");
    CHECK(result[1].key == "mango");
    CHECK(result[2].key == "zebra");
}

TEST_CASE("top_k equals the full-sort oracle on random indices") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<float> value(-1.0f, 1.0f);
    for (int round = 0; round < 20; ++round) {
        VectorIndex index = random_index(rng, 25, 8, EntryKind::Node);
        EmbeddingVector query(8);
        for (auto& x : query) x = value(rng);
        query[0] += 0.01f;
        for (int k : {0, 1, 3, 10, 25, 40}) {
            const auto got = index.top_k(query, k, EntryKind::Node);
            const auto expected = testutil::top_k_oracle(index, query, k, EntryKind::Node);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].key == expected[i].key);
                CHECK(got[i].score == expected[i].score);
            }
        }
    }
}

TEST_CASE("top_k scores are non-increasing and smaller k is a prefix") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<float> value(-1.0f, 1.0f);
    VectorIndex index = random_index(rng, 50, 8, EntryKind::Node);
    EmbeddingVector query(8);
    for (auto& x : query) x = value(rng);
    query[0] += 0.01f;

    const auto full = index.top_k(query, 50, EntryKind::Node);
    for (std::size_t i = 1; i < full.size(); ++i) CHECK(full[i - 1].score >= full[i].score);
    for (int k : {1, 5, 20}) {
        const auto prefix = index.top_k(query, k, EntryKind::Node);
        for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i].key == full[i].key);
    }
}

TEST_CASE("vector index add rejects bad entries") {
    VectorIndex index(3);
    index.add("a", EntryKind::Node, {1.0f, 0.0f, 0.0f});
    CHECK_THROWS_AS(index.add("a", EntryKind::Node, {0.0f, 1.0f, 0.0f}), ContractError);
    index.add("a", EntryKind::Chunk, {0.0f, 1.0f, 0.0f});  // same key, other kind is fine
    CHECK_THROWS_AS(index.add("b", EntryKind::Node, {1.0f, 0.0f}), ContractError);
    CHECK_THROWS_AS(index.add("c", EntryKind::Node, {0.0f, 0.0f, 0.0f}), DegenerateInputError);
}
